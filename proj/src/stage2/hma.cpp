#include "soccersum/stage2/hma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "soccersum/core/errors.hpp"
#include "soccersum/core/random.hpp"
#include "soccersum/eval/metrics.hpp"

namespace soccersum::stage2 {

HmaModel::HmaModel(const HmaShape& shape, std::uint64_t seed) : shape_(shape) {
    const std::size_t H = shape.modality_hidden;
    const std::size_t C = shape.fusion_hidden;
    meta_lstm_ = nn::add_lstm(params_, "hma.meta", shape.metadata_width, H);
    audio_lstm_ = nn::add_lstm(params_, "hma.audio", shape.audio_width, H);
    attn_w_ = params_.add("hma.modality.W", 1, H, H);
    attn_b_ = params_.add("hma.modality.b", 1, 1, H);
    fusion_lstm_ = nn::add_lstm(params_, "hma.fusion", H, C);
    event_u_ = params_.add("hma.event.u", 1, C, C);
    out_w_ = params_.add("hma.out.W", 1, C, C);
    out_b_ = params_.add("hma.out.b", 1, 1, C);
    params_.init_uniform(seed);
    metadata_scaler = features::FeatureScaler::identity(shape.metadata_width);
    audio_scaler = features::FeatureScaler::identity(shape.audio_width);
}

nn::Var HmaModel::forward(nn::Tape& tape, const RowMatrix& metadata, const RowMatrix& audio, HmaTrace* trace) const {
    const std::size_t L = metadata.rows();
    if (L == 0) throw ShapeError("hma: empty proposal");
    if (audio.rows() != L) throw ShapeError("hma: metadata and audio sequences differ in length");
    std::vector<nn::Var> xm, xa;
    for (std::size_t i = 0; i < L; ++i) {
        xm.push_back(tape.input(metadata.row(i)));
        xa.push_back(tape.input(audio.row(i)));
    }
    const auto hm = nn::lstm_forward(tape, meta_lstm_, xm);
    const auto ha = nn::lstm_forward(tape, audio_lstm_, xa);

    std::vector<nn::Var> c;
    c.reserve(L);
    if (trace) {
        trace->lambda_metadata.assign(L, 0.0);
        trace->lambda_audio.assign(L, 0.0);
    }
    for (std::size_t i = 0; i < L; ++i) {
        const nn::Var logits[2] = {tape.tanh(tape.affine(attn_w_, hm[i], attn_b_)),
                                   tape.tanh(tape.affine(attn_w_, ha[i], attn_b_))};
        const nn::Var lambda = tape.softmax(tape.concat_scalars(logits));
        const nn::Var pair[2] = {hm[i], ha[i]};
        c.push_back(tape.weighted_sum(lambda, pair));
        if (trace) {
            trace->lambda_metadata[i] = tape.value(lambda)[0];
            trace->lambda_audio[i] = tape.value(lambda)[1];
        }
    }
    const auto hc = nn::lstm_forward(tape, fusion_lstm_, c);
    std::vector<nn::Var> e;
    e.reserve(L);
    for (const nn::Var& h : hc) e.push_back(tape.affine(event_u_, tape.tanh(h)));
    const nn::Var beta = tape.softmax(tape.concat_scalars(e));
    const nn::Var d = tape.weighted_sum(beta, hc);
    const nn::Var out = tape.sigmoid(tape.affine(out_w_, d, out_b_));
    if (trace) {
        trace->beta = tape.value(beta);
        trace->score = tape.scalar(out);
    }
    return out;
}

HmaTrace HmaModel::run(const RowMatrix& raw_metadata, const RowMatrix& raw_audio) const {
    nn::Tape tape(params_);
    HmaTrace trace;
    forward(tape, metadata_scaler.transform(raw_metadata), audio_scaler.transform(raw_audio), &trace);
    return trace;
}

nlohmann::json HmaModel::metadata() const {
    return {{"kind", "hma"},
            {"metadata_width", shape_.metadata_width},
            {"audio_width", shape_.audio_width},
            {"modality_hidden", shape_.modality_hidden},
            {"fusion_hidden", shape_.fusion_hidden},
            {"metadata_scaler", metadata_scaler.to_json()},
            {"audio_scaler", audio_scaler.to_json()}};
}

HmaModel HmaModel::from_metadata(const nlohmann::json& meta) {
    if (meta.value("kind", "") != "hma") throw ParseError("checkpoint is not a summarisation model");
    HmaShape s;
    s.metadata_width = meta.at("metadata_width").get<std::size_t>();
    s.audio_width = meta.at("audio_width").get<std::size_t>();
    s.modality_hidden = meta.at("modality_hidden").get<std::size_t>();
    s.fusion_hidden = meta.at("fusion_hidden").get<std::size_t>();
    HmaModel m(s, 0);
    m.metadata_scaler = features::FeatureScaler::from_json(meta.at("metadata_scaler"));
    m.audio_scaler = features::FeatureScaler::from_json(meta.at("audio_scaler"));
    return m;
}

nn::Var hma_batch_loss(nn::Tape& tape, const HmaModel& model, std::span<const HmaExample> prepared) {
    std::vector<nn::Var> losses;
    losses.reserve(prepared.size());
    for (const HmaExample& ex : prepared)
        losses.push_back(tape.bce(model.forward(tape, ex.metadata, ex.audio), static_cast<double>(ex.label)));
    return tape.mean(losses);
}

std::vector<double> score_proposals(const HmaModel& model, std::span<const HmaExample> proposals) {
    std::vector<double> theta;
    theta.reserve(proposals.size());
    for (const HmaExample& p : proposals) theta.push_back(model.score(p.metadata, p.audio));
    return theta;
}

namespace {

HmaExample prepare(const HmaModel& model, const HmaExample& ex) {
    return {model.metadata_scaler.transform(ex.metadata), model.audio_scaler.transform(ex.audio), ex.label};
}

double classification_f1(const HmaModel& model, std::span<const HmaExample> prepared, double threshold) {
    eval::Counts c;
    for (const HmaExample& ex : prepared) {
        nn::Tape tape(model.params());
        const bool predicted = tape.scalar(model.forward(tape, ex.metadata, ex.audio)) >= threshold;
        if (predicted && ex.label) ++c.tp;
        else if (predicted) ++c.fp;
        else if (ex.label) ++c.fn;
    }
    return c.fbeta(1.0);
}

}  // namespace

HmaModel train_hma(std::span<const HmaExample> train, std::span<const HmaExample> validation, const HmaConfig& config,
                   std::uint64_t seed, HmaTrainingReport* report) {
    if (train.empty()) throw DataError("train_hma: no training proposals");
    std::size_t positives = 0;
    for (const HmaExample& ex : train) positives += ex.label ? 1 : 0;
    if (positives == 0 || positives == train.size()) {
        throw DataError("train_hma: training proposals are all " + std::string(positives == 0 ? "negative" : "positive"));
    }
    if (validation.empty()) throw DataError("train_hma: validation split has no proposals");

    HmaShape shape = config.shape;
    shape.metadata_width = train.front().metadata.cols();
    shape.audio_width = train.front().audio.cols();
    HmaModel model(shape, derive_seed(seed, {0x686d61, 0}));
    {
        std::vector<RowMatrix> meta, audio;
        for (const HmaExample& ex : train) {
            meta.push_back(ex.metadata);
            audio.push_back(ex.audio);
        }
        model.metadata_scaler = features::FeatureScaler::fit(meta);
        model.audio_scaler = features::FeatureScaler::fit(audio);
    }
    std::vector<HmaExample> prepared_train, prepared_val;
    for (const HmaExample& ex : train) prepared_train.push_back(prepare(model, ex));
    for (const HmaExample& ex : validation) prepared_val.push_back(prepare(model, ex));

    nn::AdamState adam(model.params(), config.adam);
    std::vector<double> best_values = model.params().flat_values();
    double best_f1 = -1.0;
    std::size_t best_epoch = 0;
    HmaTrainingReport rep;
    std::vector<std::size_t> order(prepared_train.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, {0x686d61, 1}));
    std::vector<HmaExample> batch;
    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        double loss_sum = 0.0;
        for (std::size_t b0 = 0; b0 < order.size(); b0 += config.batch_size) {
            batch.clear();
            for (std::size_t k = b0; k < std::min(order.size(), b0 + config.batch_size); ++k)
                batch.push_back(prepared_train[order[k]]);
            model.params().zero_grad();
            nn::Tape tape(model.params());
            const nn::Var loss = hma_batch_loss(tape, model, batch);
            const double l = tape.scalar(loss);
            if (!std::isfinite(l)) throw TrainingError("train_hma: non-finite loss at epoch " + std::to_string(epoch));
            loss_sum += l * static_cast<double>(batch.size());
            tape.backward(loss);
            adam.step(model.params());
        }
        const double f1 = classification_f1(model, prepared_val, config.decision_threshold);
        rep.epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
        rep.epoch_f1.push_back(f1);
        rep.epochs_run = epoch;
        if (f1 > best_f1) {
            best_f1 = f1;
            best_epoch = epoch;
            best_values = model.params().flat_values();
        } else if (epoch - best_epoch >= config.patience) {
            break;
        }
    }
    model.params().set_flat_values(best_values);
    rep.best_epoch = best_epoch;
    rep.best_f1 = best_f1;
    if (report) *report = std::move(rep);
    return model;
}

}  // namespace soccersum::stage2
