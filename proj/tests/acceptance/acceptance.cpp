// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line each. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "soccersum/core/dataset.hpp"
#include "soccersum/core/random.hpp"
#include "soccersum/eval/metrics.hpp"
#include "soccersum/features/audio.hpp"
#include "soccersum/nn/tape.hpp"
#include "soccersum/stage1/mil.hpp"
#include "soccersum/stage2/hma.hpp"
#include "soccersum/stage3/ranking.hpp"

using namespace soccersum;
using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        if (pass) detail = what;
        pass = false;
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

RowMatrix random_rows(Rng& rng, std::size_t rows, std::size_t cols) {
    RowMatrix m(rows, cols);
    for (double& v : m.data()) v = rng.normal();
    return m;
}

Verdict gradient_fidelity() {
    Verdict v;
    const auto t0 = Clock::now();
    Rng rng(1001);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t in = 2 + rng.below(3), hid = 2 + rng.below(3);
        stage1::MilModel model(in, hid, 500 + trial);
        std::vector<RowMatrix> prepared;
        std::vector<stage1::Bag> bags;
        for (std::size_t m = 0; m < 2; ++m) {
            const std::size_t len = 6 + rng.below(5);
            prepared.push_back(random_rows(rng, len, in));
            for (int b = 0; b < 2; ++b) {
                const std::size_t length = 1 + rng.below(len);
                bags.push_back({m, rng.below(len - length + 1), length, static_cast<int>(rng.below(2))});
            }
        }
        auto& ps = model.params();
        worst = std::max(worst, oracle::max_gradient_error(
                                    ps,
                                    [&] {
                                        nn::Tape t(static_cast<const nn::ParamSet&>(ps));
                                        return t.scalar(stage1::mil_batch_loss(t, model, prepared, bags));
                                    },
                                    [&] {
                                        nn::Tape t(ps);
                                        t.backward(stage1::mil_batch_loss(t, model, prepared, bags));
                                    }));
    }
    for (int trial = 0; trial < 20; ++trial) {
        const stage2::HmaShape shape{2 + rng.below(3), 2 + rng.below(3), 2 + rng.below(3), 2 + rng.below(2)};
        stage2::HmaModel model(shape, 700 + trial);
        std::vector<stage2::HmaExample> ex;
        for (int e = 0; e < 3; ++e) {
            const std::size_t len = 1 + rng.below(5);
            ex.push_back({random_rows(rng, len, shape.metadata_width), random_rows(rng, len, shape.audio_width),
                          static_cast<int>(rng.below(2))});
        }
        auto& ps = model.params();
        worst = std::max(worst, oracle::max_gradient_error(
                                    ps,
                                    [&] {
                                        nn::Tape t(static_cast<const nn::ParamSet&>(ps));
                                        return t.scalar(stage2::hma_batch_loss(t, model, ex));
                                    },
                                    [&] {
                                        nn::Tape t(ps);
                                        t.backward(stage2::hma_batch_loss(t, model, ex));
                                    }));
    }
    const double secs = seconds_since(t0);
    v.require(worst < 1e-4, fmt("max relative error %.3g", worst));
    v.require(secs < 30.0, fmt("took %.1f s", secs));
    if (v.pass) v.detail = fmt("max relative error %.3g over 20+20 inputs, %.1f s", worst, secs);
    return v;
}

Verdict lse_properties() {
    Verdict v;
    Rng rng(1002);
    for (int set = 0; set < 1000 && v.pass; ++set) {
        std::vector<double> o(1 + rng.below(12));
        for (double& x : o) x = rng.uniform(0.0, 1.0);
        const double mean = std::accumulate(o.begin(), o.end(), 0.0) / static_cast<double>(o.size());
        const double mx = *std::max_element(o.begin(), o.end());
        for (double r : {1.0, 8.0, 100.0}) {
            const double s = stage1::lse_fuse(o, r);
            v.require(s >= mean - 1e-12 && s <= mx + 1e-12, fmt("set %g r=%g outside [mean, max]", set, r));
            for (std::size_t i = 0; i < o.size(); ++i) {
                auto up = o;
                up[i] += rng.uniform(1e-3, 0.5);
                v.require(stage1::lse_fuse(up, r) >= s, fmt("set %g r=%g not monotone", set, r));
            }
        }
        v.require(mx - stage1::lse_fuse(o, 100.0) <= std::log(static_cast<double>(o.size())) / 100.0 + 1e-12,
                  fmt("set %g: |S_100 - max| too large", set));
    }
    if (v.pass) v.detail = "1000 sets, r in {1, 8, 100}";
    return v;
}

Verdict attention_normalization() {
    Verdict v;
    Rng rng(1003);
    double worst = 0.0;
    for (int p = 0; p < 1000; ++p) {
        const stage2::HmaShape shape{2 + rng.below(6), 2 + rng.below(6), 2 + rng.below(5), 2 + rng.below(4)};
        const stage2::HmaModel model(shape, 900 + p);
        const std::size_t len = 1 + rng.below(20);
        const auto tr = model.run(random_rows(rng, len, shape.metadata_width), random_rows(rng, len, shape.audio_width));
        for (std::size_t i = 0; i < len; ++i)
            worst = std::max(worst, std::abs(tr.lambda_metadata[i] + tr.lambda_audio[i] - 1.0));
        worst = std::max(worst, std::abs(std::accumulate(tr.beta.begin(), tr.beta.end(), 0.0) - 1.0));
    }
    v.require(worst <= 1e-9, fmt("max deviation %.3g", worst));
    if (v.pass) v.detail = fmt("1000 proposals, max deviation %.3g", worst);
    return v;
}

Verdict plackett_luce() {
    Verdict v;
    Rng rng(1004);
    for (std::size_t P = 1; P <= 5; ++P)
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> theta(P);
            for (double& t : theta) t = rng.uniform(0.001, 1.0);
            stage3::Ranking r(P);
            std::iota(r.begin(), r.end(), 0);
            double total = 0.0;
            do total += stage3::pl_probability(theta, r);
            while (std::next_permutation(r.begin(), r.end()));
            v.require(std::abs(total - 1.0) <= 1e-12, fmt("P=%g enumeration sums to %.15g", P, total));
        }

    const std::vector<double> theta = {1.0, 2.0, 3.0, 4.0};
    const auto t0 = Clock::now();
    const int samples = 200000;
    std::map<stage3::Ranking, int> counts;
    for (int s = 0; s < samples; ++s)
        ++counts[stage3::sample_ranking(theta, 1.0, derive_seed(1004, {static_cast<std::uint64_t>(s)}))];
    const double secs = seconds_since(t0);
    stage3::Ranking r = {0, 1, 2, 3};
    double tv = 0.0;
    do {
        const auto it = counts.find(r);
        const double emp = it == counts.end() ? 0.0 : static_cast<double>(it->second) / samples;
        tv += std::abs(emp - oracle::plackett_luce(theta, r));
    } while (std::next_permutation(r.begin(), r.end()));
    tv /= 2.0;
    v.require(tv < 0.02, fmt("TV distance %.4f", tv));
    v.require(secs < 60.0, fmt("sampling took %.1f s", secs));

    const stage3::Ranking desc = {3, 2, 1, 0};
    int hits = 0;
    for (std::uint64_t s = 0; s < 10000; ++s) hits += stage3::sample_ranking(theta, 1e-6, derive_seed(2004, {s})) == desc;
    v.require(hits == 10000, fmt("descending in %g of 10000 trials", hits));
    if (v.pass) v.detail = fmt("TV %.4f over 200k samples in %.1f s, descending 10000/10000", tv, secs);
    return v;
}

Verdict matching_oracle() {
    Verdict v;
    Rng rng(1005);
    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Match m = fixture::random_timeline(rng, 60);
        const auto ref = fixture::random_actions(rng, 60, rng.below(7), 3);
        const auto pred = fixture::random_actions(rng, 60, rng.below(7), 3);
        mismatches += eval::match_summary_actions(pred, ref, m).counts.tp != oracle::best_summary_matching(pred, ref, m);
    }
    v.require(mismatches == 0, fmt("%g mismatches", mismatches));
    if (v.pass) v.detail = "1000 instances, 0 mismatches";
    return v;
}

std::vector<double> random_frame(Rng& rng, std::size_t n, double rate) {
    std::vector<double> x(n);
    const double f1 = rng.uniform(20.0, rate / 2.0 - 20.0), f2 = rng.uniform(20.0, rate / 2.0 - 20.0);
    const double a = rng.uniform(0.0, 1.0), noise = rng.uniform(0.0, 0.5);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        x[i] = noise * rng.uniform(-1.0, 1.0) + a * std::sin(2 * std::numbers::pi * f1 * t) +
               0.5 * std::cos(2 * std::numbers::pi * f2 * t + a);
    }
    return x;
}

Verdict dsp_fidelity() {
    Verdict v;
    Rng rng(1006);
    auto near = [](double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); };
    std::vector<double> prev;
    for (int trial = 0; trial < 100; ++trial) {
        const double rate = trial % 2 == 0 ? 8000.0 : 16000.0;
        const std::size_t n = static_cast<std::size_t>(0.05 * rate);
        const auto x = random_frame(rng, n, rate);
        if (prev.size() != n) prev.clear();
        const auto got = features::compute_frame_features(x, prev, rate);
        const auto want = oracle::frame_features(x, prev, rate);
        const double g[] = {got.zcr, got.energy, got.energy_entropy, got.centroid,
                            got.spread, got.spectral_entropy, got.flux, got.rolloff};
        const double w[] = {want.zcr, want.energy, want.energy_entropy, want.centroid,
                            want.spread, want.spectral_entropy, want.flux, want.rolloff};
        for (int k = 0; k < 8; ++k) v.require(near(g[k], w[k]), fmt("frame %g feature %g differs", trial, k));
        const auto mg = features::mfcc(x, rate), mw = oracle::mfcc(x, rate);
        v.require(mg.size() == mw.size(), "mfcc width");
        for (std::size_t c = 0; c < std::min(mg.size(), mw.size()); ++c)
            v.require(near(mg[c], mw[c]), fmt("frame %g mfcc %g differs", trial, static_cast<double>(c)));
        prev = x;
    }
    const double rate = 48000.0;
    const std::size_t n = 2400;
    std::vector<double> tone(n);
    for (std::size_t i = 0; i < n; ++i) tone[i] = std::sin(2 * std::numbers::pi * 1000.0 * i / rate);
    const double centroid = features::compute_frame_features(tone, std::span<const double>{}, rate).centroid;
    v.require(std::abs(centroid - 1000.0) <= rate / n, fmt("1 kHz centroid at %.2f Hz", centroid));
    if (v.pass) v.detail = fmt("100 frames within 1e-6, 1 kHz centroid at %.2f Hz", centroid);
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Run {
    fs::path dir;
    int code = -1;
    double seconds = 0.0;
};

Run run_e2e(const std::string& cli, const fs::path& work, const fs::path& config, int jobs) {
    Run r;
    r.dir = work / ("jobs" + std::to_string(jobs));
    fs::remove_all(r.dir);
    fs::create_directories(r.dir);
    const std::string cmd = "\"" + cli + "\" --config \"" + config.string() + "\" --seed 7 --jobs " +
                            std::to_string(jobs) + " --out-dir \"" + (r.dir / "run").string() + "\" e2e > \"" +
                            (r.dir / "log.txt").string() + "\" 2>&1";
    const auto t0 = Clock::now();
    const int raw = std::system(cmd.c_str());
    r.seconds = seconds_since(t0);
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

json load(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return json::parse(in);
}

Verdict end_to_end(const Run& run) {
    Verdict v;
    v.require(run.code == 0, "e2e exited with " + std::to_string(run.code));
    if (!v.pass) return v;
    const json r = load(run.dir / "run/results/fold0.json");
    const json& mil = r.at("stage1").at("mil");
    const json& tpl = r.at("stage1").at("template");
    const json& sb = r.at("soccer_baselines");
    const double missing = mil.at("missing_rate"), f2 = mil.at("f_score"), tf2 = tpl.at("f_score");
    const double hma = sb.at("hma").at("f_score"), rnd = sb.at("random").at("f_score");
    const json &goals = sb.at("goals"), &sot = sb.at("shots_on_target");
    v.require(missing <= 10.0, fmt("stage-1 missing %.2f%%", missing));
    v.require(f2 >= 0.70, fmt("stage-1 F2 %.4f", f2));
    v.require(f2 - tf2 >= 0.10, fmt("MIL F2 %.4f vs template %.4f", f2, tf2));
    v.require(hma - rnd >= 0.20, fmt("HMA F %.4f vs random %.4f", hma, rnd));
    v.require(goals.at("precision").get<double>() > goals.at("recall").get<double>(), "Only Goals: precision <= recall");
    v.require(sot.at("recall").get<double>() > sot.at("precision").get<double>(), "Shots on Target: recall <= precision");
    v.require(run.seconds <= 900.0, fmt("runtime %.0f s", run.seconds));
    if (v.pass)
        v.detail = fmt("missing %.2f%%, F2 %.4f, template F2 %.4f", missing, f2, tf2) +
                   fmt(", HMA F %.4f vs random %.4f", hma, rnd) + fmt(", %.0f s", run.seconds);
    return v;
}

Verdict ranking_order(const Run& run) {
    Verdict v;
    v.require(run.code == 0, "e2e failed");
    if (!v.pass) return v;
    const json fold = load(run.dir / "run/results/fold0.json");
    const json& r = fold.at("ranking");
    const double best = r.at("best_of_k").at("f_score"), desc = r.at("score_descending").at("f_score"),
                 rnd = r.at("random_ranking").at("f_score");
    v.require(best >= desc && desc >= rnd, fmt("best %.4f, descending %.4f, random %.4f", best, desc, rnd));
    if (v.pass) v.detail = fmt("best-of-k %.4f >= descending %.4f >= random %.4f", best, desc, rnd);
    return v;
}

// Replays the stop rule from proposal durations recomputed off the event
// timestamps with 5 s / 10 s padding.
Verdict budget_contract(const Run& run) {
    Verdict v;
    v.require(run.code == 0, "e2e failed");
    if (!v.pass) return v;
    const fs::path root = run.dir / "run";
    const Dataset ds = read_dataset(root / "data");
    std::map<std::string, const Match*> by_id;
    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < ds.matches.size(); ++i) {
        by_id[ds.matches[i].id] = &ds.matches[i];
        index_of[ds.matches[i].id] = i;
    }
    std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> spans;
    const json proposals = load(root / "proposals/fold0/proposals.json");
    for (const json& m : proposals.at("matches")) {
        auto& s = spans[m.at("match_id").get<std::string>()];
        for (const json& p : m.at("proposals")) s.emplace_back(p.at("start_index"), p.at("end_index"));
    }
    auto padded = [](const Match& m, std::size_t a, std::size_t b) { return m.events[b].t - m.events[a].t + 15.0; };

    std::size_t checked = 0;
    for (const auto& dir : fs::directory_iterator(root / "candidates/fold0")) {
        if (!dir.is_directory()) continue;
        const std::string id = dir.path().filename().string();
        v.require(by_id.count(id) && spans.count(id), "unknown match " + id);
        if (!v.pass) return v;
        const Match& m = *by_id.at(id);
        const auto& props = spans.at(id);
        double budget_ref = 0.0;
        for (const Action& a : ds.summaries[index_of.at(id)]) budget_ref += padded(m, a.start, a.end);
        for (const auto& file : fs::directory_iterator(dir.path())) {
            const json c = load(file.path()).at("candidate");
            const double budget = c.at("budget");
            v.require(std::abs(budget - budget_ref) <= 1e-5, id + ": budget differs from the reference summary");
            const auto ranking = c.at("ranking").get<std::vector<std::size_t>>();
            std::vector<std::size_t> expect;
            double total = 0.0;
            for (std::size_t idx : ranking) {
                const double d = padded(m, props.at(idx).first, props.at(idx).second);
                if (!expect.empty() && total + d > budget + 1e-6) break;
                expect.push_back(idx);
                total += d;
            }
            std::vector<std::size_t> chosen;
            double chosen_total = 0.0;
            std::size_t last_start = 0;
            for (const json& ch : c.at("chosen")) {
                const std::size_t idx = ch.at("proposal");
                const std::size_t start = ch.at("start");
                v.require(chosen.empty() || start > last_start, id + ": chosen clips out of order");
                v.require(props.at(idx).first == start, id + ": chosen span differs from the proposal");
                last_start = start;
                chosen.push_back(idx);
                chosen_total += padded(m, props.at(idx).first, props.at(idx).second);
            }
            std::sort(expect.begin(), expect.end());
            std::sort(chosen.begin(), chosen.end());
            v.require(chosen == expect, id + "/" + file.path().filename().string() + ": breaks the stop rule");
            v.require(chosen_total <= 1.1 * budget + 1e-6, id + ": total exceeds 1.1 x budget");
            v.require(std::abs(c.at("total").get<double>() - chosen_total) <= 1e-5, id + ": recorded total is wrong");
            ++checked;
        }
    }
    v.require(checked >= ds.matches.size(), "fewer candidates than matches");
    if (v.pass) v.detail = std::to_string(checked) + " candidates checked";
    return v;
}

Verdict determinism(const Run& a, const Run& b) {
    Verdict v;
    v.require(a.code == 0 && b.code == 0, "e2e failed");
    if (!v.pass) return v;
    for (const char* rel : {"results/results.csv", "results/results.txt", "results/fold0.json"}) {
        const std::string x = slurp(a.dir / "run" / rel), y = slurp(b.dir / "run" / rel);
        v.require(!x.empty() && x == y, std::string(rel) + " differs between --jobs 1 and --jobs 3");
    }
    if (v.pass) v.detail = "tables byte-identical at --jobs 1 and --jobs 3";
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::string cli;
    std::string work = "acceptance-runs";
    bool skip_e2e = false;
    app.add_option("--cli", cli, "path to the soccersum binary")->required();
    app.add_option("--work-dir", work, "scratch directory for end-to-end runs");
    app.add_flag("--skip-e2e", skip_e2e, "run only the in-process criteria");
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    auto report = [&](int n, const char* name, const std::function<Verdict()>& check) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        failures += !v.pass;
        std::printf("criterion %2d %-26s %s  %s\n", n, name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
    };

    report(1, "gradient fidelity", gradient_fidelity);
    report(2, "lse fusion", lse_properties);
    report(3, "attention normalization", attention_normalization);
    report(4, "plackett-luce", plackett_luce);
    report(5, "matching oracle", matching_oracle);
    report(9, "dsp fidelity", dsp_fidelity);
    if (skip_e2e) return failures == 0 ? 0 : 1;

    const fs::path dir = fs::absolute(work);
    fs::create_directories(dir);
    const fs::path config = dir / "acceptance.cfg";
    std::ofstream(config) << "eval.max_folds = 1\n";
    const Run one = run_e2e(cli, dir, config, 1);
    const Run three = run_e2e(cli, dir, config, 3);
    report(6, "end-to-end synthetic", [&] { return end_to_end(one); });
    report(7, "multi-summary ordering", [&] { return ranking_order(one); });
    report(8, "budget contract", [&] { return budget_contract(one); });
    report(10, "determinism", [&] { return determinism(one, three); });
    return failures == 0 ? 0 : 1;
}
