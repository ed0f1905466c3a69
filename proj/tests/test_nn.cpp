#include <doctest.h>

#include <cmath>
#include <vector>

#include "loraadv/error.hpp"
#include "loraadv/nn.hpp"
#include "loraadv/random.hpp"
#include "oracles.hpp"

using namespace loraadv;

namespace {

std::vector<double> random_input(std::uint64_t seed, std::size_t n, double scale) {
    Rng r(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = scale * r.normal();
    return x;
}

Model zero_model(Arch arch) {
    Model m = build_model(arch, 1);
    for (auto p : m.parameters())
        for (auto& v : p) v = 0.0;
    return m;
}

}  // namespace

TEST_CASE("parameter counts") {
    CHECK(count_parameters(build_model(Arch::FNN, 1)) == 6522);
    CHECK(count_parameters(build_model(Arch::CNN, 1)) == 61882);
    const Model dense = oracle::linear_softmax(64, std::vector<double>(128, 0.0), {0.0, 0.0});
    CHECK(count_parameters(dense) == 130);
}

TEST_CASE("construction is deterministic per seed") {
    for (Arch a : {Arch::CNN, Arch::FNN}) {
        CHECK(model_to_json(build_model(a, 42)) == model_to_json(build_model(a, 42)));
        CHECK(model_to_json(build_model(a, 42)) != model_to_json(build_model(a, 43)));
    }
}

TEST_CASE("outputs are probability rows") {
    const Model m = build_model(Arch::CNN, 5);
    for (int s = 0; s < 20; ++s) {
        const auto x = random_input(s, kSampleValues, 0.3);
        const auto p = forward_one(m, x);
        CHECK(p[0] >= 0.0);
        CHECK(p[1] >= 0.0);
        CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto p = forward_one(zero_model(Arch::FNN), random_input(1, kSampleValues, 1.0));
    CHECK(p[0] == 0.5);
    CHECK(p[1] == 0.5);
}

TEST_CASE("malformed layer stacks are rejected") {
    Dense out;
    out.inputs = 3;
    out.units = 2;
    out.activation = Activation::SoftMax;
    out.weights.assign(6, 0.0);
    out.bias.assign(2, 0.0);
    CHECK_THROWS_AS(Model::from_layers({1, 4, 1}, {Flatten{}, out}), ConfigError);
    Dense relu_out = out;
    relu_out.inputs = 4;
    relu_out.weights.assign(8, 0.0);
    relu_out.activation = Activation::ReLU;
    CHECK_THROWS_AS(Model::from_layers({1, 4, 1}, {Flatten{}, relu_out}), ConfigError);
    CHECK_THROWS_AS(Model::from_layers({1, 4, 1}, {Flatten{}, Dropout{1.0}, relu_out}), ConfigError);
}

TEST_CASE("linear softmax matches a hand computation") {
    const std::vector<double> w{0.5, -0.25, 1.0, 2.0, -1.5, 0.75};
    const std::vector<double> b{0.1, -0.2};
    const std::vector<double> x{0.3, -0.7, 1.1};
    const Model m = oracle::linear_softmax(3, w, b);
    const double z0 = 0.1 + 0.3 * 0.5 - 0.7 * 1.0 + 1.1 * -1.5;
    const double z1 = -0.2 + 0.3 * -0.25 - 0.7 * 2.0 + 1.1 * 0.75;
    const auto ref = oracle::softmax2(z0, z1);
    const auto p = forward_one(m, x);
    CHECK(p[0] == doctest::Approx(ref[0]).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(ref[1]).epsilon(1e-14));
    CHECK(loss(m, x, 1) == doctest::Approx(-std::log(ref[1])).epsilon(1e-12));
}

TEST_CASE("training separates a linearly separable toy set") {
    Rng r(9);
    std::vector<double> xs;
    std::vector<int> ys;
    for (int i = 0; i < 200; ++i) {
        const double a = r.uniform() * 2 - 1, b = r.uniform() * 2 - 1;
        if (std::abs(a) < 0.1) continue;
        xs.push_back(a);
        xs.push_back(b);
        ys.push_back(a > 0 ? 1 : 0);
    }
    Model m = oracle::linear_softmax(2, std::vector<double>(4, 0.0), {0.0, 0.0});
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.batch_size = 8;
    cfg.epochs = 200;
    cfg.seed = 3;
    const auto res = train(m, xs, ys, cfg);
    CHECK(res.epoch_loss.size() == 200);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ys.size(); ++i)
        correct += predicted_label(forward_one(m, std::span<const double>(xs).subspan(2 * i, 2))) == ys[i];
    CHECK(correct == ys.size());
}

TEST_CASE("zero epochs leave the model untouched") {
    Model m = build_model(Arch::FNN, 11);
    const auto before = model_to_json(m);
    const auto x = random_input(2, 4 * kSampleValues, 1.0);
    const std::vector<int> y{0, 1, 0, 1};
    TrainConfig cfg;
    cfg.epochs = 0;
    const auto res = train(m, x, y, cfg);
    CHECK(res.epoch_loss.empty());
    CHECK(model_to_json(m) == before);
}

TEST_CASE("training input validation") {
    Model m = oracle::linear_softmax(2, std::vector<double>(4, 0.0), {0.0, 0.0});
    TrainConfig cfg;
    cfg.epochs = 1;
    const std::vector<double> x{1.0, 2.0, 3.0};
    const std::vector<int> y{0, 1};
    CHECK_THROWS_AS(train(m, x, y, cfg), InputError);
    const std::vector<double> x2{1.0, 2.0};
    const std::vector<int> bad{2};
    CHECK_THROWS_AS(train(m, x2, bad, cfg), InputError);
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.adam_beta2 = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("first Adam step moves each parameter by about lr against its gradient") {
    Model m = oracle::linear_softmax(2, {0.1, -0.2, 0.3, 0.4}, {0.0, 0.0});
    const auto before = model_to_json(m);
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    AdamOptimizer adam(m, cfg);
    ParamGradients g{{0.5, -2.0, 1e-3, -1e-2}, {3.0, -0.25}};
    adam.step(m, g);
    CHECK(adam.steps() == 1);
    const std::vector<double> w0{0.1, -0.2, 0.3, 0.4};
    auto params = m.parameters();
    for (std::size_t i = 0; i < 4; ++i) {
        const double expect = w0[i] - 0.1 * (g[0][i] > 0 ? 1.0 : -1.0);
        CHECK(params[0][i] == doctest::Approx(expect).epsilon(1e-5));
    }
    CHECK(params[1][0] == doctest::Approx(-0.1).epsilon(1e-6));
    CHECK(params[1][1] == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("input gradient of a zero model vanishes") {
    const Model m = zero_model(Arch::CNN);
    const auto g = input_gradient(m, random_input(4, kSampleValues, 1.0), 1);
    REQUIRE(g.size() == kSampleValues);
    for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("input gradient of a linear softmax matches the symbolic form") {
    const auto w = random_input(5, 16, 0.5);
    const std::vector<double> b{0.2, -0.1};
    const Model m = oracle::linear_softmax(8, w, b);
    for (int y : {0, 1}) {
        const auto x = random_input(6 + y, 8, 1.0);
        const auto got = input_gradient(m, x, y);
        const auto ref = oracle::linear_softmax_gradient(w, b, x, y);
        for (std::size_t i = 0; i < 8; ++i) CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
}

TEST_CASE("input gradient agrees with central differences away from ReLU kinks") {
    for (Arch a : {Arch::CNN, Arch::FNN}) {
        const Model m = build_model(a, 21);
        int checked = 0;
        for (int s = 0; s < 6; ++s) {
            const auto x = random_input(100 + s, kSampleValues, 0.5);
            if (min_relu_preactivation(m, x) < 1e-6) continue;
            const int y = s % 2;
            const auto g = input_gradient(m, x, y);
            for (std::size_t k = 0; k < kSampleValues; k += 7) {
                const double fd = oracle::fd_input(m, x, y, k, 1e-6);
                CHECK(oracle::rel_err(g[k], fd, 1e-6) < 1e-4);
                ++checked;
            }
        }
        CHECK(checked > 0);
    }
}

TEST_CASE("dropout keeps about 90 percent of units in training mode") {
    Dense d;
    d.inputs = 64;
    d.units = 2;
    d.activation = Activation::SoftMax;
    d.weights.assign(128, 0.0);
    for (std::size_t i = 0; i < 64; ++i) d.weights[2 * i] = 0.01;
    d.bias = {0.0, 0.0};
    const Model m = Model::from_layers({1, 64, 1}, {Flatten{}, Dropout{0.1}, d});
    const std::vector<double> ones(64, 1.0);
    Rng r(77);
    const int trials = 4000;
    double kept = 0.0;
    for (int t = 0; t < trials; ++t) {
        const auto p = forward_one(m, ones, Mode::Train, &r);
        kept += std::log(p[0] / p[1]) * 0.9 / 0.01;
    }
    const double mean = kept / trials;
    // Binomial(64, 0.9): sd of the mean is sqrt(64 * 0.09 / trials).
    CHECK(std::abs(mean - 57.6) < 4 * std::sqrt(64 * 0.09 / trials));
    const auto p = forward_one(m, ones);
    CHECK(std::log(p[0] / p[1]) == doctest::Approx(0.64).epsilon(1e-12));
}

TEST_CASE("model JSON round trip is exact") {
    for (Arch a : {Arch::CNN, Arch::FNN}) {
        const Model m = build_model(a, 8);
        const Model back = model_from_json(Json::parse(model_to_json(m).dump()));
        CHECK(back.arch() == a);
        const auto p = m.parameters();
        const auto q = back.parameters();
        REQUIRE(p.size() == q.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            REQUIRE(p[i].size() == q[i].size());
            for (std::size_t j = 0; j < p[i].size(); ++j) REQUIRE(p[i][j] == q[i][j]);
        }
    }
}

TEST_CASE("full-batch training on a convex problem does not increase the loss") {
    Rng r(12);
    std::vector<double> xs;
    std::vector<int> ys;
    for (int i = 0; i < 64; ++i) {
        const int y = i % 2;
        xs.push_back((y ? 0.5 : -0.5) + 0.8 * r.normal());
        xs.push_back(0.8 * r.normal());
        ys.push_back(y);
    }
    Model m = oracle::linear_softmax(2, {0.3, -0.3, 0.1, 0.2}, {0.0, 0.0});
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.batch_size = 64;
    cfg.epochs = 40;
    const auto res = train(m, xs, ys, cfg);
    for (std::size_t e = 1; e < res.epoch_loss.size(); ++e) CHECK(res.epoch_loss[e] <= res.epoch_loss[e - 1] + 1e-12);
}
