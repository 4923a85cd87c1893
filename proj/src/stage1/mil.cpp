#include "soccersum/stage1/mil.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "soccersum/core/errors.hpp"
#include "soccersum/core/random.hpp"

namespace soccersum::stage1 {

double lse_fuse(std::span<const double> o, double r, LseMode mode) {
    if (o.empty()) throw ShapeError("lse_fuse: no bag scores");
    if (!(r > 0.0)) throw DomainError("lse_fuse: r must be positive");
    const double n = static_cast<double>(o.size());
    if (mode == LseMode::literal) {
        const double mean = std::accumulate(o.begin(), o.end(), 0.0) / n;
        return std::log(r * mean) / r;
    }
    const double m = *std::max_element(o.begin(), o.end());
    double acc = 0.0;
    for (double v : o) acc += std::exp(r * (v - m));
    return m + std::log(acc / n) / r;
}

std::vector<std::pair<std::size_t, std::size_t>> sliding_windows(std::size_t events, std::size_t window,
                                                                 std::size_t stride) {
    if (window == 0 || stride == 0) throw std::invalid_argument("sliding_windows: window and stride must be positive");
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (events == 0) return out;
    if (events <= window) {
        out.emplace_back(0, events);
        return out;
    }
    std::size_t start = 0;
    for (; start + window <= events; start += stride) out.emplace_back(start, window);
    if (out.back().first + window < events) out.emplace_back(events - window, window);
    return out;
}

MilModel::MilModel(std::size_t input_width, std::size_t hidden, std::uint64_t seed) {
    lstm_ = nn::add_lstm(params_, "mil.lstm", input_width, hidden);
    out_w_ = params_.add("mil.out.W", 1, hidden, hidden);
    out_b_ = params_.add("mil.out.b", 1, 1, hidden);
    params_.init_uniform(seed);
    scaler = features::FeatureScaler::identity(input_width);
}

nn::Var MilModel::forward(nn::Tape& tape, const RowMatrix& prepared, std::size_t start, std::size_t length) const {
    if (length == 0) throw ShapeError("mil: empty bag");
    if (start + length > prepared.rows()) throw std::out_of_range("mil: bag outside feature table");
    std::vector<nn::Var> xs;
    xs.reserve(length);
    for (std::size_t k = 0; k < length; ++k) xs.push_back(tape.input(prepared.row(start + k)));
    const auto hs = nn::lstm_forward(tape, lstm_, xs);
    const nn::Var z = tape.max_pool(hs);
    return tape.sigmoid(tape.affine(out_w_, z, out_b_));
}

std::vector<double> MilModel::pooled(const RowMatrix& prepared, std::size_t start, std::size_t length) const {
    if (length == 0) throw ShapeError("mil: empty bag");
    const RowMatrix h = nn::lstm_forward(params_, lstm_, prepared.slice_rows(start, length));
    std::vector<double> z(h.row(0).begin(), h.row(0).end());
    for (std::size_t k = 1; k < h.rows(); ++k)
        for (std::size_t j = 0; j < z.size(); ++j) z[j] = std::max(z[j], h(k, j));
    return z;
}

double MilModel::bag_score(const RowMatrix& prepared, std::size_t start, std::size_t length) const {
    const auto z = pooled(prepared, start, length);
    const nn::Param& w = params_[out_w_];
    double a = params_[out_b_].value[0];
    for (std::size_t j = 0; j < z.size(); ++j) a += w.value[j] * z[j];
    return a >= 0.0 ? 1.0 / (1.0 + std::exp(-a)) : std::exp(a) / (1.0 + std::exp(a));
}

nlohmann::json MilModel::metadata() const {
    return {{"kind", "mil"},
            {"input_width", lstm_.input},
            {"hidden", lstm_.hidden},
            {"threshold", threshold},
            {"window", scoring.window},
            {"stride", scoring.stride},
            {"r", scoring.r},
            {"lse", scoring.mode == LseMode::literal ? "literal" : "standard"},
            {"scaler", scaler.to_json()}};
}

MilModel MilModel::from_metadata(const nlohmann::json& meta) {
    if (meta.value("kind", "") != "mil") throw ParseError("checkpoint is not a proposal model");
    MilModel m(meta.at("input_width").get<std::size_t>(), meta.at("hidden").get<std::size_t>(), 0);
    m.threshold = meta.at("threshold").get<double>();
    m.scoring.window = meta.at("window").get<std::size_t>();
    m.scoring.stride = meta.at("stride").get<std::size_t>();
    m.scoring.r = meta.at("r").get<double>();
    m.scoring.mode = meta.at("lse").get<std::string>() == "literal" ? LseMode::literal : LseMode::standard;
    m.scaler = features::FeatureScaler::from_json(meta.at("scaler"));
    return m;
}

std::vector<double> score_events(const MilModel& model, const RowMatrix& raw_features, const ScoringConfig& config) {
    if (config.stride >= config.window && raw_features.rows() > config.window) {
        throw std::invalid_argument("score_events: stride must be smaller than the window so bags overlap");
    }
    const RowMatrix prepared = model.prepare(raw_features);
    const std::size_t F = prepared.rows();
    const auto windows = sliding_windows(F, config.window, config.stride);
    std::vector<std::vector<double>> covering(F);
    for (const auto& [start, len] : windows) {
        const double o = model.bag_score(prepared, start, len);
        for (std::size_t i = start; i < start + len; ++i) covering[i].push_back(o);
    }
    std::vector<double> s(F);
    for (std::size_t i = 0; i < F; ++i) s[i] = lse_fuse(covering[i], config.r, config.mode);
    return s;
}

nn::Var mil_batch_loss(nn::Tape& tape, const MilModel& model, std::span<const RowMatrix> prepared,
                       std::span<const Bag> bags) {
    std::vector<nn::Var> losses;
    losses.reserve(bags.size());
    for (const Bag& b : bags) {
        const nn::Var o = model.forward(tape, prepared[b.match], b.start, b.length);
        losses.push_back(tape.bce(o, static_cast<double>(b.label)));
    }
    return tape.mean(losses);
}

namespace {

double validation_f2(const MilModel& model, const MilTrainingData& data, const MilConfig& config,
                     double* threshold_out) {
    std::vector<ScoredMatch> scored;
    scored.reserve(data.validation_matches.size());
    for (std::size_t v = 0; v < data.validation_matches.size(); ++v) {
        scored.push_back({data.validation_matches[v], score_events(model, data.validation_features[v], config.scoring),
                          data.validation_reference[v]});
    }
    const ThresholdChoice choice = select_threshold(scored, config.overlap_ratio);
    *threshold_out = choice.threshold;
    return choice.f2;
}

}  // namespace

MilModel train_mil(const MilTrainingData& data, const MilConfig& config, std::uint64_t seed,
                   MilTrainingReport* report) {
    if (data.bags.empty()) throw DataError("train_mil: no training bags");
    if (data.train_features.empty()) throw DataError("train_mil: no training matches");
    if (data.validation_matches.empty()) throw DataError("train_mil: validation split is empty");
    bool pos = false, neg = false;
    for (const Bag& b : data.bags) (b.label ? pos : neg) = true;
    if (!pos || !neg) throw DataError("train_mil: training bags must contain both classes");

    MilModel model(data.train_features.front().cols(), config.hidden, derive_seed(seed, {0x6d696c, 0}));
    model.scoring = config.scoring;
    model.scaler = features::FeatureScaler::fit(data.train_features);
    std::vector<RowMatrix> prepared;
    prepared.reserve(data.train_features.size());
    for (const RowMatrix& f : data.train_features) prepared.push_back(model.prepare(f));

    nn::AdamState adam(model.params(), config.adam);
    std::vector<double> best_values = model.params().flat_values();
    double best_f2 = -1.0;
    double best_threshold = 0.5;
    std::size_t best_epoch = 0;
    MilTrainingReport rep;

    std::vector<std::size_t> order(data.bags.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, {0x6d696c, 1}));
    std::vector<Bag> batch;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        double loss_sum = 0.0;
        for (std::size_t b0 = 0; b0 < order.size(); b0 += config.batch_size) {
            batch.clear();
            for (std::size_t k = b0; k < std::min(order.size(), b0 + config.batch_size); ++k) batch.push_back(data.bags[order[k]]);
            model.params().zero_grad();
            nn::Tape tape(model.params());
            const nn::Var loss = mil_batch_loss(tape, model, prepared, batch);
            const double l = tape.scalar(loss);
            if (!std::isfinite(l)) throw TrainingError("train_mil: non-finite loss at epoch " + std::to_string(epoch));
            loss_sum += l * static_cast<double>(batch.size());
            tape.backward(loss);
            adam.step(model.params());
        }
        double threshold = 0.5;
        const double f2 = validation_f2(model, data, config, &threshold);
        rep.epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
        rep.epoch_f2.push_back(f2);
        rep.epoch_threshold.push_back(threshold);
        rep.epochs_run = epoch;
        if (f2 > best_f2) {
            best_f2 = f2;
            best_threshold = threshold;
            best_epoch = epoch;
            best_values = model.params().flat_values();
        } else if (epoch - best_epoch >= config.patience) {
            break;
        }
    }
    model.params().set_flat_values(best_values);
    model.threshold = best_threshold;
    rep.best_epoch = best_epoch;
    rep.best_f2 = best_f2;
    if (report) *report = std::move(rep);
    return model;
}

}  // namespace soccersum::stage1
