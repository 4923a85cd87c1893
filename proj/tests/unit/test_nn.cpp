#include <cmath>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "../support/oracles.hpp"
#include "soccersum/core/errors.hpp"
#include "soccersum/core/random.hpp"
#include "soccersum/nn/adam.hpp"
#include "soccersum/nn/checkpoint.hpp"
#include "soccersum/nn/lstm.hpp"
#include "soccersum/nn/tape.hpp"
#include "soccersum/stage1/mil.hpp"
#include "soccersum/stage2/hma.hpp"

using namespace soccersum;

namespace {

RowMatrix random_rows(Rng& rng, std::size_t rows, std::size_t cols) {
    RowMatrix m(rows, cols);
    for (double& v : m.data()) v = rng.normal();
    return m;
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Textbook LSTM step with [i, f, o, g] gate blocks.
RowMatrix lstm_oracle(const nn::ParamSet& ps, const nn::LstmParams& l, const RowMatrix& x) {
    const auto& W = ps[l.W].value;
    const auto& U = ps[l.U].value;
    const auto& b = ps[l.b].value;
    const std::size_t H = l.hidden, I = l.input;
    std::vector<double> h(H, 0.0), c(H, 0.0);
    RowMatrix out(x.rows(), H);
    for (std::size_t t = 0; t < x.rows(); ++t) {
        std::vector<double> z(4 * H);
        for (std::size_t r = 0; r < 4 * H; ++r) {
            z[r] = b[r];
            for (std::size_t k = 0; k < I; ++k) z[r] += W[r * I + k] * x(t, k);
            for (std::size_t k = 0; k < H; ++k) z[r] += U[r * H + k] * h[k];
        }
        for (std::size_t j = 0; j < H; ++j) {
            c[j] = sig(z[H + j]) * c[j] + sig(z[j]) * std::tanh(z[3 * H + j]);
            h[j] = sig(z[2 * H + j]) * std::tanh(c[j]);
            out(t, j) = h[j];
        }
    }
    return out;
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("lstm forward matches the textbook recurrence") {
    nn::ParamSet ps;
    const auto l = nn::add_lstm(ps, "l", 3, 4);
    ps.init_uniform(11);
    Rng rng(12);
    const RowMatrix x = random_rows(rng, 6, 3);
    const RowMatrix expect = lstm_oracle(ps, l, x);

    const RowMatrix plain = nn::lstm_forward(ps, l, x);
    nn::Tape tape(static_cast<const nn::ParamSet&>(ps));
    std::vector<nn::Var> xs;
    for (std::size_t t = 0; t < x.rows(); ++t) xs.push_back(tape.input(x.row(t)));
    const auto hs = nn::lstm_forward(tape, l, xs);
    for (std::size_t t = 0; t < x.rows(); ++t)
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(plain(t, j) == doctest::Approx(expect(t, j)).epsilon(1e-12));
            CHECK(tape.value(hs[t])[j] == doctest::Approx(expect(t, j)).epsilon(1e-12));
        }
}

TEST_CASE("find_lstm recovers the parameter ids") {
    nn::ParamSet ps;
    const auto l = nn::add_lstm(ps, "enc", 5, 2);
    const auto f = nn::find_lstm(ps, "enc");
    CHECK(f.W == l.W);
    CHECK(f.U == l.U);
    CHECK(f.b == l.b);
    CHECK(f.input == 5);
    CHECK(f.hidden == 2);
}

TEST_CASE("max_pool breaks ties towards the lowest index") {
    nn::ParamSet ps;
    const auto w = ps.add("w", 1, 2, 2);
    ps[w].value = {1.0, 1.0};
    nn::Tape tape(ps);
    const nn::Var va = tape.input(std::vector<double>{1.0, 2.0});
    const nn::Var vb = tape.input(std::vector<double>{1.0, 3.0});
    const std::vector<nn::Var> both = {va, vb};
    const nn::Var m = tape.max_pool(both);
    CHECK(tape.value(m) == std::vector<double>{1.0, 3.0});
    tape.backward(tape.bce(tape.sigmoid(tape.affine(w, m)), 1.0));
    CHECK(tape.grad(va)[0] != 0.0);
    CHECK(tape.grad(va)[1] == 0.0);
    CHECK(tape.grad(vb)[0] == 0.0);
    CHECK(tape.grad(vb)[1] != 0.0);
}

TEST_CASE("inference tapes refuse backward") {
    nn::ParamSet ps;
    nn::Tape tape(static_cast<const nn::ParamSet&>(ps));
    const nn::Var x = tape.input(std::vector<double>{0.3});
    CHECK_THROWS(tape.backward(tape.bce(tape.sigmoid(x), 1.0)));
}

TEST_CASE("stage-1 graph gradients match central differences") {
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        stage1::MilModel model(3, 4, 100 + trial);
        std::vector<RowMatrix> prepared = {random_rows(rng, 9, 3), random_rows(rng, 7, 3)};
        const std::vector<stage1::Bag> bags = {{0, 0, 4, 1}, {0, 3, 6, 0}, {1, 2, 5, 1}};
        auto& ps = model.params();
        const double err = oracle::max_gradient_error(
            ps,
            [&] {
                nn::Tape t(static_cast<const nn::ParamSet&>(ps));
                return t.scalar(stage1::mil_batch_loss(t, model, prepared, bags));
            },
            [&] {
                nn::Tape t(ps);
                t.backward(stage1::mil_batch_loss(t, model, prepared, bags));
            });
        CHECK(err < 1e-4);
    }
}

TEST_CASE("stage-2 graph gradients match central differences") {
    Rng rng(22);
    for (int trial = 0; trial < 3; ++trial) {
        stage2::HmaShape shape{4, 3, 3, 2};
        stage2::HmaModel model(shape, 200 + trial);
        std::vector<stage2::HmaExample> ex;
        for (int e = 0; e < 3; ++e) {
            const std::size_t len = 2 + static_cast<std::size_t>(e);
            ex.push_back({random_rows(rng, len, 4), random_rows(rng, len, 3), e % 2});
        }
        auto& ps = model.params();
        const double err = oracle::max_gradient_error(
            ps,
            [&] {
                nn::Tape t(static_cast<const nn::ParamSet&>(ps));
                return t.scalar(stage2::hma_batch_loss(t, model, ex));
            },
            [&] {
                nn::Tape t(ps);
                t.backward(stage2::hma_batch_loss(t, model, ex));
            });
        CHECK(err < 1e-4);
    }
}

TEST_CASE("first adam step moves each weight by the learning rate against its gradient") {
    nn::ParamSet ps;
    const auto id = ps.add("w", 1, 3, 1);
    ps[id].value = {1.0, 1.0, 1.0};
    ps[id].grad = {0.5, -2.0, 0.0};
    nn::AdamState adam(ps, {.learning_rate = 0.1});
    adam.step(ps);
    CHECK(ps[id].value[0] == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(ps[id].value[1] == doctest::Approx(1.1).epsilon(1e-6));
    CHECK(ps[id].value[2] == 1.0);
    CHECK(adam.steps() == 1);
}

TEST_CASE("adam with a constant gradient keeps a unit normalised step") {
    nn::ParamSet ps;
    const auto id = ps.add("w", 1, 1, 1);
    ps[id].value = {0.0};
    nn::AdamState adam(ps, {.learning_rate = 0.01});
    for (int s = 0; s < 50; ++s) {
        ps[id].grad = {3.0};
        adam.step(ps);
    }
    CHECK(ps[id].value[0] == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("adam clips the global gradient norm before the moment updates") {
    nn::ParamSet ps;
    const auto id = ps.add("w", 1, 2, 1);
    nn::AdamState adam(ps, {.learning_rate = 1.0, .clip_norm = 1.0});
    const std::vector<std::vector<double>> grads = {{3.0, 4.0}, {0.3, 0.4}};
    const std::vector<std::vector<double>> seen = {{0.6, 0.8}, {0.3, 0.4}};  // after clipping
    std::vector<double> m(2, 0.0), v(2, 0.0), w(2, 0.0);
    for (std::size_t t = 1; t <= 2; ++t) {
        ps[id].grad = grads[t - 1];
        adam.step(ps);
        for (std::size_t k = 0; k < 2; ++k) {
            const double g = seen[t - 1][k];
            m[k] = 0.9 * m[k] + 0.1 * g;
            v[k] = 0.999 * v[k] + 0.001 * g * g;
            w[k] -= (m[k] / (1 - std::pow(0.9, t))) / (std::sqrt(v[k] / (1 - std::pow(0.999, t))) + 1e-8);
        }
    }
    CHECK(ps[id].value[0] == doctest::Approx(w[0]).epsilon(1e-12));
    CHECK(ps[id].value[1] == doctest::Approx(w[1]).epsilon(1e-12));
}

TEST_CASE("adam rejects non-finite gradients without touching weights") {
    nn::ParamSet ps;
    const auto id = ps.add("w", 1, 2, 1);
    ps[id].value = {1.0, 2.0};
    ps[id].grad = {0.1, std::nan("")};
    nn::AdamState adam(ps);
    CHECK_THROWS_AS(adam.step(ps), TrainingError);
    CHECK(ps[id].value == std::vector<double>{1.0, 2.0});
    CHECK(adam.steps() == 0);
}

TEST_CASE("checkpoint round trip restores values and metadata") {
    stage1::MilModel a(5, 3, 9);
    std::stringstream buf;
    nn::write_checkpoint(buf, a.params(), {{"kind", "mil"}, {"threshold", 0.42}});
    stage1::MilModel b(5, 3, 10);
    const auto meta = nn::read_checkpoint(buf, b.params());
    CHECK(meta.at("kind") == "mil");
    CHECK(meta.at("threshold").get<double>() == 0.42);
    CHECK(a.params().flat_values() == b.params().flat_values());
}

TEST_CASE("checkpoint rejects shape mismatch, bad magic and truncation") {
    stage1::MilModel a(5, 3, 9);
    std::stringstream buf;
    nn::write_checkpoint(buf, a.params(), nlohmann::json::object());
    const std::string bytes = buf.str();

    stage1::MilModel wrong(6, 3, 9);
    std::stringstream s1(bytes);
    CHECK_THROWS_AS(nn::read_checkpoint(s1, wrong.params()), ParseError);

    std::string bad = bytes;
    bad[0] = 'X';
    std::stringstream s2(bad);
    CHECK_THROWS_AS(nn::read_checkpoint(s2, a.params()), ParseError);

    std::stringstream s3(bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(nn::read_checkpoint(s3, a.params()), ParseError);
}

TEST_CASE("init_uniform respects the fan-in bound and is seeded") {
    nn::ParamSet a, b;
    a.add("w", 4, 25, 25);
    b.add("w", 4, 25, 25);
    a.init_uniform(3);
    b.init_uniform(3);
    CHECK(a.flat_values() == b.flat_values());
    for (double v : a.flat_values()) CHECK(std::abs(v) <= 0.2);
}

}  // TEST_SUITE
