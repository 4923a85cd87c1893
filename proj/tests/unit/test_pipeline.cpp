#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <doctest.h>

#include "soccersum/pipeline/artifacts.hpp"
#include "soccersum/pipeline/config.hpp"
#include "soccersum/pipeline/fold_runner.hpp"

using namespace soccersum;
using namespace soccersum::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("soccersum_pipeline_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::trunc);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Small but complete corpus: three folds over six short matches.
const char* kTinyConfig =
    "gen.matches = 6\n"
    "gen.events_per_match = 400\n"
    "gen.events_sd = 0\n"
    "eval.folds = 3\n"
    "eval.max_folds = 1\n"
    "stage1.max_epochs = 8\n"
    "stage2.max_epochs = 8\n"
    "stage3.candidates = 3\n";

struct CliResult {
    int code;
    std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + SOCCERSUM_CLI + "\" " + args + " > \"" + (dir / "stdout.txt").string() +
                            "\" 2> \"" + err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(err)};
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config files, includes and environment overrides") {
    const fs::path dir = scratch("config");
    write_file(dir / "base.cfg", "seed = 3  # comment\nstage3.sigma = 0.2\n");
    write_file(dir / "run.cfg", "include base.cfg\n\nstage3.candidates = 4\nstage3.sigma=0.3\n");
    PipelineConfig c;
    c.apply_file(dir / "run.cfg");
    CHECK(c.seed() == 3);
    CHECK(c.candidates() == 4);
    CHECK(c.sigma() == 0.3);

    setenv("SOCCERSUM_STAGE3_SIGMA", "0.7", 1);
    const PipelineConfig e = PipelineConfig::load(dir / "run.cfg");
    unsetenv("SOCCERSUM_STAGE3_SIGMA");
    CHECK(e.sigma() == 0.7);
    CHECK(e.hash_hex() != c.hash_hex());
    fs::remove_all(dir);
}

TEST_CASE("config rejects unknown keys and malformed values") {
    PipelineConfig c;
    CHECK_THROWS_AS(c.set("stage1.windw", "5"), ConfigError);
    CHECK_THROWS_AS(c.set("stage1.window", "-1"), ConfigError);
    CHECK_THROWS_AS(c.set("gen.clean_fraction", "1.5"), ConfigError);
    CHECK_THROWS_AS(c.set("stage1.lse", "fancy"), ConfigError);
    CHECK_THROWS_AS(c.set("stage3.sigma", "abc"), ConfigError);
    const fs::path dir = scratch("badcfg");
    write_file(dir / "bad.cfg", "seed = 1\nnot a pair\n");
    CHECK_THROWS_AS(c.apply_file(dir / "bad.cfg"), ConfigError);
    CHECK_THROWS_AS(c.apply_file(dir / "missing.cfg"), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("config hash is fnv-1a over the canonical text") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    PipelineConfig a, b;
    CHECK(a.hash_hex() == b.hash_hex());
    CHECK(a.hash_hex().size() == 16);
    b.set("pad.post", "11");
    CHECK(a.hash_hex() != b.hash_hex());
    CHECK(a.canonical().find("stage1.window=5\n") != std::string::npos);
}

TEST_CASE("artifacts carry and verify the run stamp") {
    const fs::path dir = scratch("stamp");
    const RunStamp s{"abc", 7};
    write_csv(dir / "t.csv", s, {{"a", "b"}, {{"1", "2"}, {"3", "4"}}});
    const CsvTable t = read_csv(dir / "t.csv", s, "producer");
    CHECK(t.rows.size() == 2);
    CHECK(t.rows[1][t.column("b")] == "4");
    CHECK_THROWS_AS(read_csv(dir / "t.csv", {"abc", 8}, "producer"), StaleArtifact);
    CHECK_THROWS_AS(read_csv(dir / "t.csv", {"abd", 7}, "producer"), StaleArtifact);
    try {
        read_csv(dir / "none.csv", s, "gen-data");
        FAIL("expected MissingArtifact");
    } catch (const MissingArtifact& e) {
        CHECK(std::string(e.what()).find("`gen-data`") != std::string::npos);
    }

    write_json_artifact(dir / "j.json", s, {{"x", 1}});
    CHECK(read_json_artifact(dir / "j.json", s, "p").at("x") == 1);
    CHECK_THROWS_AS(read_json_artifact(dir / "j.json", {"zzz", 7}, "p"), StaleArtifact);
    CHECK(!fs::exists(dir / "j.json.tmp"));

    write_file(dir / "ragged.csv", stamp_line(s) + "\na,b\n1\n");
    CHECK_THROWS_AS(read_csv(dir / "ragged.csv", s, "p"), ParseError);
    fs::remove_all(dir);
}

TEST_CASE("feature tables round trip at six decimals") {
    const fs::path dir = scratch("features");
    FeatureTable t;
    t.metadata_columns = {"sx", "sy"};
    t.audio_columns = {"audio_zcr"};
    t.metadata = RowMatrix(2, 2, 0.1234567);
    t.audio = RowMatrix(2, 1, -2.0);
    write_feature_table(dir / "f.csv", {"h", 1}, t);
    const FeatureTable back = read_feature_table(dir / "f.csv", {"h", 1});
    CHECK(back.metadata_columns == t.metadata_columns);
    CHECK(back.audio_columns == t.audio_columns);
    CHECK(back.metadata(1, 1) == 0.123457);
    CHECK(back.audio(0, 0) == -2.0);
    fs::remove_all(dir);
}

TEST_CASE("parallel_for visits every index and rethrows the lowest failure") {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(50, 4, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
    try {
        parallel_for(20, 4, [](std::size_t i) {
            if (i == 3 || i == 11) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "3");
    }
}

TEST_CASE("tiny end-to-end run writes every artifact") {
    const fs::path dir = scratch("e2e");
    write_file(dir / "tiny.cfg", kTinyConfig);
    Workspace ws{dir / "out", PipelineConfig::load(dir / "tiny.cfg"), 2, nullptr};
    run_e2e(ws);
    for (const char* rel : {"data/dataset.json", "features/codebook.json", "models/fold0/mil.ckpt", "models/fold0/hma.ckpt",
                            "scores/fold0/scores.csv", "proposals/fold0/proposals.json", "theta/fold0/theta.csv",
                            "candidates/fold0/selection.json", "results/fold0.json", "results/results.csv",
                            "results/results.txt"})
        CHECK_MESSAGE(fs::exists(ws.root / rel), rel);
    const std::string table = slurp(ws.root / "results/results.txt");
    CHECK(table.find("LSTM MIL Pooling") != std::string::npos);
    CHECK(table.find("Best of k (Plackett-Luce)") != std::string::npos);

    // A changed config makes earlier artifacts stale.
    Workspace other = ws;
    other.config.set("stage3.sigma", "0.5");
    CHECK_THROWS_AS(summarize(other, 0), StaleArtifact);
    fs::remove_all(dir);
}

TEST_CASE("command-line exit codes") {
    const fs::path dir = scratch("cli");
    write_file(dir / "tiny.cfg", kTinyConfig);
    write_file(dir / "typo.cfg", "stage1.windw = 5\n");
    const std::string out = " --out-dir \"" + (dir / "run").string() + "\"";

    CHECK(run_cli("", dir).code == 1);
    CHECK(run_cli("frobnicate", dir).code == 1);
    CHECK(run_cli("--config \"" + (dir / "nope.cfg").string() + "\" gen-data" + out, dir).code == 1);
    const auto typo = run_cli("--config \"" + (dir / "typo.cfg").string() + "\" gen-data" + out, dir);
    CHECK(typo.code == 1);
    CHECK(typo.err.find("stage1.windw") != std::string::npos);
    CHECK(run_cli("--jobs 0 gen-data" + out, dir).code == 1);

    const auto missing = run_cli("--config \"" + (dir / "tiny.cfg").string() + "\" score-events --fold 0" + out, dir);
    CHECK(missing.code == 2);
    CHECK(missing.err.find("produced by `gen-data`") != std::string::npos);

    CHECK(run_cli("--config \"" + (dir / "tiny.cfg").string() + "\" --seed 1 gen-data" + out, dir).code == 0);
    const auto stale = run_cli("--config \"" + (dir / "tiny.cfg").string() + "\" --seed 2 extract-features" + out, dir);
    CHECK(stale.code == 2);
    CHECK(stale.err.find("stale artifact") != std::string::npos);
    CHECK(run_cli("--config \"" + (dir / "tiny.cfg").string() + "\" --seed 1 train-proposals --fold 5" + out, dir).code == 1);
    fs::remove_all(dir);
}

}  // TEST_SUITE
