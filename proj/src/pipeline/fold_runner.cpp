#include "soccersum/pipeline/fold_runner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "soccersum/core/dataset.hpp"
#include "soccersum/core/match.hpp"
#include "soccersum/core/numeric_format.hpp"
#include "soccersum/core/random.hpp"
#include "soccersum/eval/baselines.hpp"
#include "soccersum/eval/kfold.hpp"
#include "soccersum/eval/metrics.hpp"
#include "soccersum/features/metadata.hpp"
#include "soccersum/features/wav.hpp"
#include "soccersum/nn/checkpoint.hpp"
#include "soccersum/stage1/bags.hpp"
#include "soccersum/stage1/mil.hpp"
#include "soccersum/stage1/proposals.hpp"
#include "soccersum/stage1/vocabulary.hpp"
#include "soccersum/stage2/hma.hpp"
#include "soccersum/stage3/ranking.hpp"
#include "soccersum/synth/audio_synth.hpp"
#include "soccersum/synth/generator.hpp"

namespace soccersum::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Seed stream tags.
constexpr std::uint64_t kTagBags = 0x62616773;
constexpr std::uint64_t kTagMil = 0x6d696c;
constexpr std::uint64_t kTagHma = 0x686d61;
constexpr std::uint64_t kTagCandidates = 0x63616e64;
constexpr std::uint64_t kTagBaseline = 0x62617365;
constexpr std::uint64_t kTagRandomRanking = 0x72616e6b;

std::string fold_name(std::size_t fold) { return "fold" + std::to_string(fold); }

struct Paths {
    fs::path root;
    fs::path data() const { return root / "data"; }
    fs::path features() const { return root / "features"; }
    fs::path feature_file(const std::string& id) const { return features() / (id + ".csv"); }
    fs::path codebook() const { return features() / "codebook.json"; }
    fs::path models(std::size_t f) const { return root / "models" / fold_name(f); }
    fs::path mil(std::size_t f) const { return models(f) / "mil.ckpt"; }
    fs::path hma(std::size_t f) const { return models(f) / "hma.ckpt"; }
    fs::path vocabulary(std::size_t f) const { return models(f) / "vocabulary.json"; }
    fs::path scores(std::size_t f) const { return root / "scores" / fold_name(f) / "scores.csv"; }
    fs::path proposals(std::size_t f) const { return root / "proposals" / fold_name(f) / "proposals.json"; }
    fs::path theta(std::size_t f) const { return root / "theta" / fold_name(f) / "theta.csv"; }
    fs::path candidates(std::size_t f) const { return root / "candidates" / fold_name(f); }
    fs::path candidate(std::size_t f, const std::string& id, std::size_t j) const {
        return candidates(f) / id / ("candidate_" + std::to_string(j) + ".json");
    }
    fs::path selection(std::size_t f) const { return candidates(f) / "selection.json"; }
    fs::path results() const { return root / "results"; }
};

void log(const Workspace& ws, const std::string& line) {
    if (ws.log) *ws.log << line << '\n' << std::flush;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void require(const fs::path& p, const std::string& producer) {
    if (!fs::exists(p)) throw MissingArtifact(p, producer);
}

std::string fold_cmd(const char* cmd, std::size_t fold) { return std::string(cmd) + " --fold " + std::to_string(fold); }

// ---- shared inputs -------------------------------------------------------

struct Inputs {
    Dataset dataset;
    std::vector<FeatureTable> features;
    std::vector<eval::Fold> folds;
};

Dataset load_dataset(const Workspace& ws) {
    const Paths p{ws.root};
    require(p.data() / "dataset.json", "gen-data");
    check_stamp(read_dataset_provenance(p.data()), ws.stamp(), p.data() / "dataset.json");
    return read_dataset(p.data());
}

std::vector<eval::Fold> make_folds(const Workspace& ws, std::size_t n) {
    return eval::kfold_split(n, ws.config.folds(), ws.config.seed());
}

Inputs load_inputs(const Workspace& ws) {
    Inputs in;
    in.dataset = load_dataset(ws);
    const Paths p{ws.root};
    const std::size_t n = in.dataset.matches.size();
    in.features.resize(n);
    for (std::size_t i = 0; i < n; ++i) require(p.feature_file(in.dataset.matches[i].id), "extract-features");
    parallel_for(n, ws.jobs, [&](std::size_t i) {
        in.features[i] = read_feature_table(p.feature_file(in.dataset.matches[i].id), ws.stamp());
    });
    in.folds = make_folds(ws, n);
    return in;
}

const eval::Fold& fold_of(const Inputs& in, std::size_t fold) {
    if (fold >= in.folds.size())
        throw std::invalid_argument("fold " + std::to_string(fold) + " out of range (k = " +
                                    std::to_string(in.folds.size()) + ")");
    return in.folds[fold];
}

// Usage check done before any artifact is touched.
void check_fold(const Workspace& ws, std::size_t fold) {
    if (fold >= ws.config.folds())
        throw std::invalid_argument("fold " + std::to_string(fold) + " out of range (k = " +
                                    std::to_string(ws.config.folds()) + ")");
}

// ---- feature extraction ---------------------------------------------------

std::vector<std::string> metadata_columns(const EventVocabulary& vocab, const features::QualifierCodebook& cb) {
    std::vector<std::string> cols = {"sx",        "sy",       "ex",          "ey",        "time_elapsed",
                                     "start_dist", "end_dist", "start_angle", "end_angle", "outcome"};
    for (const auto& name : vocab.names()) cols.push_back("type_" + name);
    for (std::size_t s = 0; s + 1 < cb.width(); ++s)
        cols.push_back(s < cb.codes().size() ? "qual_" + std::to_string(cb.codes()[s]) : "qual_unused" + std::to_string(s));
    cols.push_back("qual_other");
    return cols;
}

std::vector<std::string> audio_columns() {
    std::vector<std::string> cols = {"audio_zcr",      "audio_energy",           "audio_energy_entropy",
                                     "audio_centroid", "audio_spread",           "audio_spectral_entropy",
                                     "audio_flux",     "audio_rolloff"};
    for (std::size_t k = 0; k < features::kMfccCount; ++k) cols.push_back("audio_mfcc" + std::to_string(k));
    return cols;
}

RowMatrix match_audio(const Workspace& ws, const Match& m, const std::vector<Action>& summary) {
    const auto cfg = ws.config.audio();
    std::uint64_t synth_seed = 0;
    if (m.audio && synth::parse_synth_audio_reference(*m.audio, &synth_seed)) {
        const synth::SynthAudio track(m, summary, ws.config.gen(), synth_seed);
        return features::extract_match_audio_features(track.reader(), track.sample_rate(), m, cfg);
    }
    if (m.audio) {
        fs::path file = *m.audio;
        if (file.is_relative()) file = Paths{ws.root}.data() / file;
        if (!fs::exists(file)) throw DataError("match " + m.id + ": audio file not found: " + file.string());
        const features::AudioTrack track = features::read_wav(file);
        return features::extract_match_audio_features(track, m, cfg);
    }
    const features::SampleReader silence = [](long long, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
    return features::extract_match_audio_features(silence, 48000.0, m, cfg);
}

// ---- stage 1 helpers ------------------------------------------------------

json vocabulary_to_json(const stage1::ActionVocabulary& v, const EventVocabulary& types) {
    json entries = json::array();
    for (const auto& seq : v.entries()) {
        json e = json::array();
        for (auto t : seq) e.push_back(types.name(EventTypeId{t}));
        entries.push_back(std::move(e));
    }
    return json{{"entries", std::move(entries)}};
}

stage1::ActionVocabulary vocabulary_from_json(const json& j, const EventVocabulary& types) {
    stage1::ActionVocabulary v;
    for (const auto& e : j.at("entries")) {
        stage1::TypeSequence seq;
        for (const auto& name : e) seq.push_back(types.id(name.get<std::string>()).value);
        v.add(std::move(seq));
    }
    return v;
}

// Stage-1 reference: annotated actions when the corpus has them, otherwise
// vocabulary occurrences.
std::vector<Action> stage1_reference(const Dataset& ds, std::size_t i, const stage1::ActionVocabulary& vocab) {
    if (ds.has_reference_actions()) return ds.reference_actions[i];
    return stage1::find_vocabulary_occurrences(ds.matches[i], vocab);
}

stage1::ActionVocabulary train_vocabulary(const Inputs& in, const eval::Fold& fold) {
    std::vector<const Match*> matches;
    std::vector<const std::vector<Action>*> summaries;
    for (std::size_t i : fold.train) {
        matches.push_back(&in.dataset.matches[i]);
        summaries.push_back(&in.dataset.summaries[i]);
    }
    return stage1::build_action_vocabulary(matches, summaries);
}

json counts_json(const eval::Counts& c, double beta) {
    return json{{"tp", c.tp},
                {"fp", c.fp},
                {"fn", c.fn},
                {"precision", quantize6(c.precision())},
                {"recall", quantize6(c.recall())},
                {"f_score", quantize6(c.fbeta(beta))},
                {"missing_rate", quantize6(c.missing_rate())}};
}

eval::Counts counts_from_json(const json& j) {
    return {j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(), j.at("fn").get<std::size_t>()};
}

// ---- proposals and theta --------------------------------------------------

using ProposalLists = std::vector<std::vector<Action>>;

ProposalLists read_proposals(const Workspace& ws, const Inputs& in, std::size_t fold) {
    const Paths p{ws.root};
    const json j = read_json_artifact(p.proposals(fold), ws.stamp(), fold_cmd("extract-proposals", fold));
    ProposalLists out(in.dataset.matches.size());
    const auto& ms = j.at("matches");
    if (ms.size() != out.size()) throw ParseError(p.proposals(fold).string() + ": match count mismatch");
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (ms[i].at("match_id").get<std::string>() != in.dataset.matches[i].id)
            throw ParseError(p.proposals(fold).string() + ": match order mismatch");
        out[i] = actions_from_json(ms[i].at("proposals"), in.dataset.matches[i]);
    }
    return out;
}

std::vector<std::vector<double>> read_per_match_column(const fs::path& path, const RunStamp& stamp,
                                                        const std::string& producer, const Inputs& in,
                                                        const char* index_col, const char* value_col,
                                                        const std::vector<std::size_t>& expected_sizes) {
    const CsvTable t = read_csv(path, stamp, producer);
    const std::size_t cid = t.column("match_id"), cidx = t.column(index_col), cval = t.column(value_col);
    std::vector<std::vector<double>> out(in.dataset.matches.size());
    std::size_t m = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        while (m < out.size() && row[cid] != in.dataset.matches[m].id) ++m;
        if (m == out.size()) throw ParseError(path.string() + ": unexpected match '" + row[cid] + "'", r + 3);
        if (std::strtoull(row[cidx].c_str(), nullptr, 10) != out[m].size())
            throw ParseError(path.string() + ": index out of sequence", r + 3);
        out[m].push_back(std::strtod(row[cval].c_str(), nullptr));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].size() != expected_sizes[i])
            throw ParseError(path.string() + ": wrong row count for match " + in.dataset.matches[i].id);
    }
    return out;
}

std::vector<std::vector<double>> read_theta(const Workspace& ws, const Inputs& in, std::size_t fold,
                                            const ProposalLists& props) {
    std::vector<std::size_t> sizes;
    for (const auto& p : props) sizes.push_back(p.size());
    return read_per_match_column(Paths{ws.root}.theta(fold), ws.stamp(), fold_cmd("summarize", fold), in,
                                 "proposal_index", "theta", sizes);
}

stage2::HmaExample make_example(const FeatureTable& ft, const Action& a, int label) {
    return {ft.metadata.slice_rows(a.start, a.length()), ft.audio.slice_rows(a.start, a.length()), label};
}

// Positive when one ground-truth summary action holds at least half of the
// proposal's events.
int hma_label(const Action& proposal, const std::vector<Action>& summary) {
    for (const Action& g : summary) {
        const std::size_t lo = std::max(proposal.start, g.start), hi = std::min(proposal.end, g.end);
        if (lo <= hi && 2 * (hi - lo + 1) >= proposal.length()) return 1;
    }
    return 0;
}

std::vector<double> proposal_durations(const Match& m, const std::vector<Action>& props, const PaddingConfig& pad) {
    std::vector<double> d;
    d.reserve(props.size());
    for (const Action& a : props) d.push_back(quantize6(action_duration(a, m, pad)));
    return d;
}

double match_budget(const Match& m, const std::vector<Action>& summary, const PaddingConfig& pad) {
    return quantize6(summary_duration(summary, m, pad));
}

json candidate_to_json(const stage3::CandidateSummary& c, const std::vector<Action>& props) {
    json chosen = json::array();
    for (std::size_t k = 0; k < c.chosen.size(); ++k) {
        const Action& a = props[c.chosen[k]];
        chosen.push_back({{"proposal", c.chosen[k]},
                          {"start", a.start},
                          {"end", a.end},
                          {"type", std::string(to_string(a.type))},
                          {"duration", c.durations[k]}});
    }
    return json{{"sample_index", c.sample_index}, {"ranking", c.ranking},         {"chosen", std::move(chosen)},
                {"durations", c.durations},       {"total", quantize6(c.total)}, {"budget", c.budget},
                {"over_budget", c.over_budget}};
}

std::vector<Action> chosen_actions(const json& cand, const std::vector<Action>& props) {
    std::vector<Action> out;
    for (const auto& c : cand.at("chosen")) {
        const std::size_t idx = c.at("proposal").get<std::size_t>();
        if (idx >= props.size()) throw ParseError("candidate references unknown proposal");
        out.push_back(props[idx]);
    }
    return out;
}

std::vector<Action> pick(const std::vector<Action>& props, const std::vector<std::size_t>& chosen) {
    std::vector<Action> out;
    for (std::size_t i : chosen) out.push_back(props[i]);
    return out;
}

}  // namespace

// ---- subcommands ----------------------------------------------------------

void gen_data(const Workspace& ws) {
    const synth::GenConfig g = ws.config.gen();
    g.validate();
    Dataset ds;
    auto vocab = std::make_shared<const EventVocabulary>(EventVocabulary::default_vocabulary());
    ds.vocabulary = vocab;
    std::vector<synth::GeneratedMatch> out(g.matches);
    parallel_for(g.matches, ws.jobs,
                 [&](std::size_t i) { out[i] = synth::generate_match(g, i, derive_seed(g.seed, {i}), vocab); });
    for (auto& m : out) {
        ds.matches.push_back(std::move(m.match));
        ds.summaries.push_back(std::move(m.summary));
        ds.reference_actions.push_back(std::move(m.reference));
    }
    const RunStamp s = ws.stamp();
    json prov{{"config_hash", s.config_hash}, {"seed", s.seed}, {"generator", g.to_json()}};
    write_dataset(Paths{ws.root}.data(), ds, prov);
    std::size_t events = 0, actions = 0;
    for (std::size_t i = 0; i < ds.matches.size(); ++i) {
        events += ds.matches[i].size();
        actions += ds.summaries[i].size();
    }
    log(ws, "[gen-data] " + std::to_string(ds.matches.size()) + " matches, " + std::to_string(events) + " events, " +
                std::to_string(actions) + " summary actions");
}

void extract_features(const Workspace& ws) {
    const Dataset ds = load_dataset(ws);
    const Paths p{ws.root};
    const auto codebook = features::QualifierCodebook::fit(ds.matches, ws.config.qualifier_slots());
    write_json_artifact(p.codebook(), ws.stamp(), json{{"width", codebook.width()}, {"codes", codebook.codes()}});
    const auto meta_cols = metadata_columns(*ds.vocabulary, codebook);
    const auto audio_cols = audio_columns();
    parallel_for(ds.matches.size(), ws.jobs, [&](std::size_t i) {
        const Match& m = ds.matches[i];
        FeatureTable t{meta_cols, audio_cols, features::encode_match_metadata(m, codebook),
                       match_audio(ws, m, ds.summaries[i])};
        write_feature_table(p.feature_file(m.id), ws.stamp(), t);
    });
    log(ws, "[extract-features] " + std::to_string(ds.matches.size()) + " feature tables, " +
                std::to_string(meta_cols.size()) + " metadata + " + std::to_string(audio_cols.size()) +
                " audio columns");
}

void train_proposals(const Workspace& ws, std::size_t fold) {
    check_fold(ws, fold);
    const Inputs in = load_inputs(ws);
    const eval::Fold& f = fold_of(in, fold);
    const Paths p{ws.root};
    const auto vocab = train_vocabulary(in, f);
    if (vocab.empty()) throw DataError("train-proposals: training summaries are empty");

    std::vector<std::vector<Action>> positives;
    std::vector<std::vector<std::uint8_t>> labels;
    stage1::MilTrainingData data;
    for (std::size_t i : f.train) {
        const Match& m = in.dataset.matches[i];
        positives.push_back(stage1::find_vocabulary_occurrences(m, vocab));
        labels.push_back(stage1::label_events_by_vocabulary(m, vocab));
        data.train_features.push_back(in.features[i].metadata);
    }
    data.bags = stage1::sample_training_bags(positives, labels, derive_seed(ws.config.seed(), {fold, kTagBags}));
    std::vector<std::vector<Action>> val_ref;
    for (std::size_t i : f.validation) val_ref.push_back(stage1_reference(in.dataset, i, vocab));
    for (std::size_t k = 0; k < f.validation.size(); ++k) {
        const std::size_t i = f.validation[k];
        data.validation_matches.push_back(&in.dataset.matches[i]);
        data.validation_features.push_back(in.features[i].metadata);
        data.validation_reference.push_back(&val_ref[k]);
    }

    stage1::MilTrainingReport report;
    const stage1::MilModel model =
        stage1::train_mil(data, ws.config.mil(), derive_seed(ws.config.seed(), {fold, kTagMil}), &report);

    const RunStamp s = ws.stamp();
    json meta = model.metadata();
    meta["config_hash"] = s.config_hash;
    meta["seed"] = s.seed;
    fs::create_directories(p.models(fold));
    nn::save_checkpoint(p.mil(fold), model.params(), meta);
    write_json_artifact(p.vocabulary(fold), s, vocabulary_to_json(vocab, *in.dataset.vocabulary));
    json rep{{"bags", data.bags.size()},
             {"best_epoch", report.best_epoch},
             {"epochs_run", report.epochs_run},
             {"best_f2", quantize6(report.best_f2)},
             {"threshold", model.threshold},
             {"epoch_loss", report.epoch_loss},
             {"epoch_f2", report.epoch_f2},
             {"epoch_threshold", report.epoch_threshold}};
    write_json_artifact(p.models(fold) / "mil_report.json", s, rep);
    log(ws, "[train-proposals] " + fold_name(fold) + ": " + std::to_string(vocab.size()) + " vocabulary entries, " +
                std::to_string(data.bags.size()) + " bags, best epoch " + std::to_string(report.best_epoch) + "/" +
                std::to_string(report.epochs_run) + ", validation F2 " + fmt("%.4f", report.best_f2) +
                " at threshold " + fmt("%.2f", model.threshold));
}

void score_events(const Workspace& ws, std::size_t fold) {
    check_fold(ws, fold);
    const Inputs in = load_inputs(ws);
    fold_of(in, fold);
    const Paths p{ws.root};
    require(p.mil(fold), fold_cmd("train-proposals", fold));
    const json meta = nn::load_checkpoint_metadata(p.mil(fold));
    check_stamp(meta, ws.stamp(), p.mil(fold));
    stage1::MilModel model = stage1::MilModel::from_metadata(meta);
    nn::load_checkpoint(p.mil(fold), model.params());

    const std::size_t n = in.dataset.matches.size();
    std::vector<std::vector<double>> scores(n);
    parallel_for(n, ws.jobs, [&](std::size_t i) { scores[i] = stage1::score_events(model, in.features[i].metadata); });
    CsvTable t{{"match_id", "event_index", "score"}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = 0; e < scores[i].size(); ++e)
            t.rows.push_back({in.dataset.matches[i].id, std::to_string(e), format_fixed6(scores[i][e])});
    }
    write_csv(p.scores(fold), ws.stamp(), t);
    log(ws, "[score-events] " + fold_name(fold) + ": " + std::to_string(t.rows.size()) + " event scores");
}

void extract_proposals(const Workspace& ws, std::size_t fold) {
    check_fold(ws, fold);
    const Inputs in = load_inputs(ws);
    fold_of(in, fold);
    const Paths p{ws.root};
    require(p.mil(fold), fold_cmd("train-proposals", fold));
    const json meta = nn::load_checkpoint_metadata(p.mil(fold));
    check_stamp(meta, ws.stamp(), p.mil(fold));
    const double threshold = meta.at("threshold").get<double>();
    std::vector<std::size_t> sizes;
    for (const Match& m : in.dataset.matches) sizes.push_back(m.size());
    const auto scores = read_per_match_column(p.scores(fold), ws.stamp(), fold_cmd("score-events", fold), in,
                                              "event_index", "score", sizes);
    json matches = json::array();
    std::size_t total = 0;
    for (std::size_t i = 0; i < in.dataset.matches.size(); ++i) {
        const Match& m = in.dataset.matches[i];
        auto props = stage1::extract_proposals(scores[i], threshold, m);
        for (Action& a : props) a.type = action_type(a, m);
        total += props.size();
        matches.push_back({{"match_id", m.id}, {"proposals", actions_to_json(props, false)}});
    }
    write_json_artifact(p.proposals(fold), ws.stamp(), json{{"threshold", threshold}, {"matches", std::move(matches)}});
    log(ws, "[extract-proposals] " + fold_name(fold) + ": " + std::to_string(total) + " proposals at threshold " +
                fmt("%.2f", threshold));
}

void train_hma(const Workspace& ws, std::size_t fold) {
    check_fold(ws, fold);
    const Inputs in = load_inputs(ws);
    const eval::Fold& f = fold_of(in, fold);
    const Paths p{ws.root};
    const ProposalLists props = read_proposals(ws, in, fold);
    auto examples = [&](const std::vector<std::size_t>& idx) {
        std::vector<stage2::HmaExample> out;
        for (std::size_t i : idx) {
            for (const Action& a : props[i])
                out.push_back(make_example(in.features[i], a, hma_label(a, in.dataset.summaries[i])));
        }
        return out;
    };
    const auto train = examples(f.train);
    const auto val = examples(f.validation);
    stage2::HmaTrainingReport report;
    const stage2::HmaModel model =
        stage2::train_hma(train, val, ws.config.hma(), derive_seed(ws.config.seed(), {fold, kTagHma}), &report);
    const RunStamp s = ws.stamp();
    json meta = model.metadata();
    meta["config_hash"] = s.config_hash;
    meta["seed"] = s.seed;
    fs::create_directories(p.models(fold));
    nn::save_checkpoint(p.hma(fold), model.params(), meta);
    std::size_t positives = 0;
    for (const auto& e : train) positives += static_cast<std::size_t>(e.label);
    write_json_artifact(p.models(fold) / "hma_report.json", s,
                        json{{"train_proposals", train.size()},
                             {"train_positive", positives},
                             {"validation_proposals", val.size()},
                             {"best_epoch", report.best_epoch},
                             {"epochs_run", report.epochs_run},
                             {"best_f1", quantize6(report.best_f1)}});
    log(ws, "[train-hma] " + fold_name(fold) + ": " + std::to_string(train.size()) + " proposals (" +
                std::to_string(positives) + " positive), best epoch " + std::to_string(report.best_epoch) + "/" +
                std::to_string(report.epochs_run) + ", validation F1 " + fmt("%.4f", report.best_f1));
}

void summarize(const Workspace& ws, std::size_t fold) {
    check_fold(ws, fold);
    const Inputs in = load_inputs(ws);
    const eval::Fold& f = fold_of(in, fold);
    const Paths p{ws.root};
    const ProposalLists props = read_proposals(ws, in, fold);
    require(p.hma(fold), fold_cmd("train-hma", fold));
    const json meta = nn::load_checkpoint_metadata(p.hma(fold));
    check_stamp(meta, ws.stamp(), p.hma(fold));
    stage2::HmaModel model = stage2::HmaModel::from_metadata(meta);
    nn::load_checkpoint(p.hma(fold), model.params());

    const std::size_t n = in.dataset.matches.size();
    std::vector<std::vector<double>> theta(n);
    parallel_for(n, ws.jobs, [&](std::size_t i) {
        std::vector<stage2::HmaExample> ex;
        for (const Action& a : props[i]) ex.push_back(make_example(in.features[i], a, 0));
        theta[i] = stage2::score_proposals(model, ex);
        for (double& t : theta[i]) t = quantize6(t);
    });
    CsvTable t{{"match_id", "proposal_index", "theta"}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < theta[i].size(); ++k)
            t.rows.push_back({in.dataset.matches[i].id, std::to_string(k), format_fixed6(theta[i][k])});
    }
    write_csv(p.theta(fold), ws.stamp(), t);

    const std::size_t k = ws.config.candidates();
    const double sigma = ws.config.sigma();
    const auto assembly = ws.config.assembly();
    const auto pad = ws.config.padding();
    const std::uint64_t cand_seed = derive_seed(ws.config.seed(), {fold, kTagCandidates});
    // F-score of every candidate index on every validation match.
    std::vector<std::vector<double>> val_f(n);
    std::vector<char> is_val(n, 0);
    for (std::size_t i : f.validation) is_val[i] = 1;
    parallel_for(n, ws.jobs, [&](std::size_t i) {
        const Match& m = in.dataset.matches[i];
        const auto durations = proposal_durations(m, props[i], pad);
        const double budget = match_budget(m, in.dataset.summaries[i], pad);
        const auto cands = stage3::generate_candidates(theta[i], durations, props[i], budget, k, sigma, cand_seed, assembly);
        for (const auto& c : cands) {
            write_json_artifact(p.candidate(fold, m.id, c.sample_index), ws.stamp(),
                                json{{"match_id", m.id}, {"candidate", candidate_to_json(c, props[i])}});
            if (is_val[i]) {
                const auto chosen = pick(props[i], c.chosen);
                val_f[i].push_back(eval::match_summary_actions(chosen, in.dataset.summaries[i], m).counts.fbeta(1.0));
            }
        }
    });
    std::vector<double> mean_f(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i : f.validation) mean_f[j] += val_f[i][j];
        mean_f[j] = quantize6(mean_f[j] / static_cast<double>(f.validation.size()));
    }
    const std::size_t best = stage3::select_best_candidate(k, [&](std::size_t j) { return mean_f[j]; });
    write_json_artifact(p.selection(fold), ws.stamp(),
                        json{{"candidates", k}, {"best_index", best}, {"validation_mean_f_score", mean_f}});
    log(ws, "[summarize] " + fold_name(fold) + ": " + std::to_string(k) + " candidates per match, best index " +
                std::to_string(best) + " (validation mean F " + fmt("%.4f", mean_f[best]) + ")");
}

// ---- evaluation -----------------------------------------------------------

json evaluate_fold(const Workspace& ws, std::size_t fold) {
    check_fold(ws, fold);
    const Paths p{ws.root};
    if (!fs::exists(p.mil(fold))) train_proposals(ws, fold);
    if (!fs::exists(p.scores(fold))) score_events(ws, fold);
    if (!fs::exists(p.proposals(fold))) extract_proposals(ws, fold);
    if (!fs::exists(p.hma(fold))) train_hma(ws, fold);
    if (!fs::exists(p.selection(fold))) summarize(ws, fold);

    const Inputs in = load_inputs(ws);
    const eval::Fold& f = fold_of(in, fold);
    const RunStamp s = ws.stamp();
    for (const fs::path& ckpt : {p.mil(fold), p.hma(fold)}) check_stamp(nn::load_checkpoint_metadata(ckpt), s, ckpt);
    const auto vocab = vocabulary_from_json(read_json_artifact(p.vocabulary(fold), s, fold_cmd("train-proposals", fold)),
                                            *in.dataset.vocabulary);
    const ProposalLists props = read_proposals(ws, in, fold);
    const auto theta = read_theta(ws, in, fold, props);
    const json selection = read_json_artifact(p.selection(fold), s, fold_cmd("summarize", fold));
    const std::size_t best = selection.at("best_index").get<std::size_t>();
    const double decision = ws.config.hma().decision_threshold;
    const double overlap = ws.config.mil().overlap_ratio;
    const auto pad = ws.config.padding();
    const auto assembly = ws.config.assembly();

    struct PerMatch {
        eval::Counts mil, templ, hma, random, goals, sot, best, descending, random_ranking;
        std::size_t candidates = 0;
    };
    std::vector<PerMatch> per(f.test.size());
    parallel_for(f.test.size(), ws.jobs, [&](std::size_t k) {
        const std::size_t i = f.test[k];
        const Match& m = in.dataset.matches[i];
        const auto& gt = in.dataset.summaries[i];
        PerMatch& r = per[k];
        const auto ref = stage1_reference(in.dataset, i, vocab);
        r.mil = eval::overlap_match(props[i], ref, overlap).counts;
        r.templ = eval::overlap_match(stage1::template_proposals(m, vocab), ref, overlap).counts;

        std::vector<Action> positive;
        for (std::size_t q = 0; q < props[i].size(); ++q)
            if (theta[i][q] >= decision) positive.push_back(props[i][q]);
        r.hma = eval::match_summary_actions(positive, gt, m).counts;
        const std::uint64_t bseed = derive_seed(s.seed, {fold, kTagBaseline, i});
        auto baseline = [&](eval::SoccerBaseline b) {
            return eval::match_summary_actions(eval::soccer_baseline(b, props[i], bseed), gt, m).counts;
        };
        r.random = baseline(eval::SoccerBaseline::random);
        r.goals = baseline(eval::SoccerBaseline::goals);
        r.sot = baseline(eval::SoccerBaseline::shots_on_target);

        const json cand = read_json_artifact(p.candidate(fold, m.id, best), s, fold_cmd("summarize", fold));
        r.best = eval::match_summary_actions(chosen_actions(cand.at("candidate"), props[i]), gt, m).counts;
        const auto durations = proposal_durations(m, props[i], pad);
        const double budget = match_budget(m, gt, pad);
        auto ranked = [&](stage3::BaselineRanking mode, std::uint64_t seed) {
            const auto ranking = stage3::baseline_ranking(theta[i], mode, seed);
            const auto c = stage3::assemble_summary(ranking, durations, props[i], budget, assembly);
            return eval::match_summary_actions(pick(props[i], c.chosen), gt, m).counts;
        };
        r.descending = ranked(stage3::BaselineRanking::score_descending, 0);
        r.random_ranking = ranked(stage3::BaselineRanking::random, derive_seed(s.seed, {fold, kTagRandomRanking, i}));
    });

    PerMatch total;
    for (const PerMatch& r : per) {
        total.mil += r.mil;
        total.templ += r.templ;
        total.hma += r.hma;
        total.random += r.random;
        total.goals += r.goals;
        total.sot += r.sot;
        total.best += r.best;
        total.descending += r.descending;
        total.random_ranking += r.random_ranking;
    }
    json out{{"fold", fold},
             {"test_matches", f.test.size()},
             {"best_candidate_index", best},
             {"stage1", {{"mil", counts_json(total.mil, 2.0)}, {"template", counts_json(total.templ, 2.0)}}},
             {"soccer_baselines",
              {{"hma", counts_json(total.hma, 1.0)},
               {"random", counts_json(total.random, 1.0)},
               {"goals", counts_json(total.goals, 1.0)},
               {"shots_on_target", counts_json(total.sot, 1.0)}}},
             {"ranking",
              {{"best_of_k", counts_json(total.best, 1.0)},
               {"score_descending", counts_json(total.descending, 1.0)},
               {"random_ranking", counts_json(total.random_ranking, 1.0)}}}};
    write_json_artifact(p.results() / (fold_name(fold) + ".json"), s, out);
    log(ws, "[evaluate] " + fold_name(fold) + ": stage-1 F2 " + fmt("%.4f", total.mil.fbeta(2.0)) + " (template " +
                fmt("%.4f", total.templ.fbeta(2.0)) + "), HMA F " + fmt("%.4f", total.hma.fbeta(1.0)) +
                ", best-of-k F " + fmt("%.4f", total.best.fbeta(1.0)));
    return out;
}

namespace {

struct Row {
    const char* table;
    const char* method;
    const char* section;
    const char* key;
};

constexpr Row kRows[] = {
    {"proposals", "Template Matching", "stage1", "template"},
    {"proposals", "LSTM MIL Pooling", "stage1", "mil"},
    {"soccer_baselines", "Random", "soccer_baselines", "random"},
    {"soccer_baselines", "Only Goals", "soccer_baselines", "goals"},
    {"soccer_baselines", "Shots on Target", "soccer_baselines", "shots_on_target"},
    {"soccer_baselines", "HMA", "soccer_baselines", "hma"},
    {"ranking", "Random Ranking", "ranking", "random_ranking"},
    {"ranking", "Score Descending", "ranking", "score_descending"},
    {"ranking", "Best of k (Plackett-Luce)", "ranking", "best_of_k"},
};

std::string pct(double v) { return fmt("%.2f", 100.0 * v); }

}  // namespace

std::string render_results_csv(const json& totals) {
    std::string out = "table,method,tp,fp,fn,precision,recall,f_score,f2_score,missing_actions\n";
    for (const Row& r : kRows) {
        const eval::Counts c = counts_from_json(totals.at(r.section).at(r.key));
        out += std::string(r.table) + "," + r.method + "," + std::to_string(c.tp) + "," + std::to_string(c.fp) + "," +
               std::to_string(c.fn) + "," + pct(c.precision()) + "," + pct(c.recall()) + "," + pct(c.fbeta(1.0)) +
               "," + pct(c.fbeta(2.0)) + "," + fmt("%.2f", c.missing_rate()) + "\n";
    }
    return out;
}

std::string render_results_text(const json& totals) {
    std::string out;
    auto line = [&](const std::string& method, const std::vector<std::string>& cells) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-28s", method.c_str());
        out += buf;
        for (const auto& c : cells) {
            std::snprintf(buf, sizeof buf, "%18s", c.c_str());
            out += buf;
        }
        out += '\n';
    };
    auto counts = [&](const Row& r) { return counts_from_json(totals.at(r.section).at(r.key)); };

    out += "Action proposals (test shards)\n";
    line("Method", {"Missing Actions", "F2-score"});
    for (const Row& r : kRows) {
        if (std::string(r.table) != "proposals") continue;
        const auto c = counts(r);
        line(r.method, {fmt("%.2f", c.missing_rate()), pct(c.fbeta(2.0))});
    }
    out += "\nSoccer baselines (test shards)\n";
    line("Method", {"Precision", "Recall", "F-score"});
    for (const Row& r : kRows) {
        if (std::string(r.table) != "soccer_baselines") continue;
        const auto c = counts(r);
        line(r.method, {pct(c.precision()), pct(c.recall()), pct(c.fbeta(1.0))});
    }
    out += "\nRanking baselines (test shards)\n";
    line("Method", {"Missing Actions", "F-score"});
    for (const Row& r : kRows) {
        if (std::string(r.table) != "ranking") continue;
        const auto c = counts(r);
        line(r.method, {fmt("%.2f", c.missing_rate()), pct(c.fbeta(1.0))});
    }
    return out;
}

void evaluate(const Workspace& ws) {
    const Dataset ds = load_dataset(ws);
    const std::size_t n_folds = std::min(ws.config.folds(), ws.config.max_folds());
    if (n_folds == 0) throw std::invalid_argument("eval.max_folds must be at least 1");
    make_folds(ws, ds.matches.size());
    json totals = json::object();
    std::vector<std::size_t> folds;
    for (std::size_t fold = 0; fold < n_folds; ++fold) {
        const json r = evaluate_fold(ws, fold);
        folds.push_back(fold);
        for (const Row& row : kRows) {
            eval::Counts c = counts_from_json(r.at(row.section).at(row.key));
            if (totals.contains(row.section) && totals[row.section].contains(row.key))
                c += counts_from_json(totals[row.section][row.key]);
            totals[row.section][row.key] = counts_json(c, std::string(row.table) == "proposals" ? 2.0 : 1.0);
        }
    }
    const Paths p{ws.root};
    const RunStamp s = ws.stamp();
    const std::string header = stamp_line(s) + "\n# folds evaluated: " + std::to_string(n_folds) + " of " +
                               std::to_string(ws.config.folds()) + "\n";
    write_text_atomic(p.results() / "results.csv", header + render_results_csv(totals));
    write_text_atomic(p.results() / "results.txt", header + "\n" + render_results_text(totals));
    write_json_artifact(p.results() / "results.json", s, json{{"folds", folds}, {"totals", totals}});
    log(ws, "[evaluate] tables written to " + p.results().string());
    if (ws.log) *ws.log << render_results_text(totals) << std::flush;
}

void run_e2e(const Workspace& ws) {
    gen_data(ws);
    extract_features(ws);
    const std::size_t n_folds = std::min(ws.config.folds(), ws.config.max_folds());
    for (std::size_t fold = 0; fold < n_folds; ++fold) {
        train_proposals(ws, fold);
        score_events(ws, fold);
        extract_proposals(ws, fold);
        train_hma(ws, fold);
        summarize(ws, fold);
    }
    evaluate(ws);
}

}  // namespace soccersum::pipeline
