// soccersum: command-line front end of the summary pipeline.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error
// (missing, stale or malformed artifact, unfillable budget, ...).

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "soccersum/core/errors.hpp"
#include "soccersum/pipeline/fold_runner.hpp"

namespace {

using soccersum::pipeline::Workspace;

struct Options {
    std::string config;
    std::string out_dir = "soccersum-out";
    long long seed = -1;
    std::size_t jobs = 1;
    std::size_t fold = 0;
};

Workspace make_workspace(const Options& o) {
    using soccersum::pipeline::PipelineConfig;
    PipelineConfig cfg;
    if (!o.config.empty()) {
        cfg = PipelineConfig::load(o.config);
    } else {
        cfg.apply_environment();
    }
    if (o.seed >= 0) cfg.set("seed", std::to_string(o.seed));
    if (o.jobs == 0) throw CLI::ValidationError("--jobs", "must be at least 1");
    return Workspace{o.out_dir, cfg, o.jobs, &std::cout};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Soccer summary pipeline: action proposals, multimodal scoring, multi-summary sampling"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "key=value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", o.seed, "overrides the configured seed")->check(CLI::NonNegativeNumber);
    app.add_option("--jobs", o.jobs, "worker threads for per-match work")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", o.out_dir, "run directory")->capture_default_str();
    app.fallthrough();

    using Step = void (*)(const Workspace&);
    using FoldStep = void (*)(const Workspace&, std::size_t);
    struct Cmd {
        const char* name;
        const char* help;
        Step step;
        FoldStep fold_step;
    };
    const Cmd cmds[] = {
        {"gen-data", "generate the synthetic corpus", soccersum::pipeline::gen_data, nullptr},
        {"extract-features", "per-event metadata and audio features", soccersum::pipeline::extract_features, nullptr},
        {"train-proposals", "train the stage-1 MIL model of a fold", nullptr, soccersum::pipeline::train_proposals},
        {"score-events", "per-event proposal scores", nullptr, soccersum::pipeline::score_events},
        {"extract-proposals", "threshold scores into action proposals", nullptr, soccersum::pipeline::extract_proposals},
        {"train-hma", "train the stage-2 attention model of a fold", nullptr, soccersum::pipeline::train_hma},
        {"summarize", "score proposals and emit candidate summaries", nullptr, soccersum::pipeline::summarize},
        {"evaluate", "cross-validated evaluation and result tables", soccersum::pipeline::evaluate, nullptr},
        {"e2e", "run every step from data generation to the tables", soccersum::pipeline::run_e2e, nullptr},
    };
    for (const Cmd& c : cmds) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        if (c.fold_step) sub->add_option("--fold", o.fold, "fold index")->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        const Workspace ws = make_workspace(o);
        for (const Cmd& c : cmds) {
            if (!app.got_subcommand(c.name)) continue;
            if (c.step) c.step(ws);
            else c.fold_step(ws, o.fold);
        }
    } catch (const soccersum::pipeline::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const soccersum::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const soccersum::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const soccersum::VocabularyError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
