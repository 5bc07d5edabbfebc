#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "oracles.hpp"
#include "subsume/autoencoder.hpp"
#include "subsume/error.hpp"
#include "subsume/rng.hpp"

using namespace subsume;

namespace {

SparseBinaryMatrix random_binary(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                 double density = 0.35) {
    SparseBinaryMatrix m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.rows.resize(rows);
    Rng rng(seed);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c)
            if (rng.uniform() < density) m.rows[r].push_back(c);
    for (std::size_t r = 0; r < rows; ++r) {
        m.row_labels.push_back("r" + std::to_string(r));
    }
    for (std::size_t c = 0; c < cols; ++c) m.col_labels.push_back("c" + std::to_string(c));
    return m;
}

SparseBinaryMatrix identity_matrix(std::size_t n) {
    SparseBinaryMatrix m;
    m.n_rows = n;
    m.n_cols = n;
    m.rows.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        m.rows[i] = {i};
        m.row_labels.push_back("r" + std::to_string(i));
        m.col_labels.push_back("c" + std::to_string(i));
    }
    return m;
}

}  // namespace

TEST_CASE("init is deterministic with zero biases") {
    const AEParams a = init_params(4, 2, 7);
    const AEParams b = init_params(4, 2, 7);
    CHECK(a.w_in == b.w_in);
    CHECK(a.w_out == b.w_out);
    for (double x : a.b_in) CHECK(x == 0.0);
    for (double x : a.b_out) CHECK(x == 0.0);
    const AEParams c = init_params(4, 2, 8);
    CHECK(a.w_in != c.w_in);
}

TEST_CASE("init variance matches the uniform range") {
    const std::size_t n = 200, d = 50;  // n*d = 10^4
    const AEParams p = init_params(n, d, 123);
    const double bound = std::sqrt(6.0 / static_cast<double>(n + d));
    double mean = 0.0;
    for (double w : p.w_in) mean += w;
    mean /= static_cast<double>(p.w_in.size());
    double var = 0.0;
    for (double w : p.w_in) var += (w - mean) * (w - mean);
    var /= static_cast<double>(p.w_in.size());
    const double expected = (2.0 * bound) * (2.0 * bound) / 12.0;
    CHECK(var == doctest::Approx(expected).epsilon(0.2));
    for (double w : p.w_in) {
        CHECK(w >= -bound);
        CHECK(w <= bound);
    }
}

TEST_CASE("forward with zero weights gives h=0 and recon=0.5") {
    AEParams p;
    p.n = 3;
    p.d = 2;
    p.w_in.assign(6, 0.0);
    p.b_in.assign(2, 0.0);
    p.w_out.assign(6, 0.0);
    p.b_out.assign(3, 0.0);
    const std::vector<std::uint32_t> x = {0, 2};
    const AEForward f = forward(p, x);
    CHECK(f.h == std::vector<double>{0.0, 0.0});
    for (double r : f.recon) CHECK(r == 0.5);
}

TEST_CASE("forward hand case n=2 d=1") {
    AEParams p;
    p.n = 2;
    p.d = 1;
    p.w_in = {1.0, 1.0};
    p.b_in = {0.0};
    p.w_out = {0.5, -0.5};
    p.b_out = {0.0, 0.0};
    const std::vector<std::uint32_t> x = {0};  // x = [1, 0]
    const AEForward f = forward(p, x);
    CHECK(f.h == std::vector<double>{1.0});
    CHECK(f.recon[0] == doctest::Approx(1.0 / (1.0 + std::exp(-0.5))));
}

TEST_CASE("forward of the zero vector with zero biases is zero code") {
    const AEParams p = init_params(5, 3, 9);
    const AEForward f = forward(p, {});
    for (double h : f.h) CHECK(h == 0.0);
}

TEST_CASE("loss values") {
    const std::vector<double> x0 = {1.0, 0.0, 1.0, 0.0};
    const std::vector<double> half(4, 0.5);
    CHECK(bce_loss(x0, half) == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));

    CHECK(bce_loss(std::vector<double>{1.0}, std::vector<double>{0.9}) ==
          doctest::Approx(0.1053605156578263).epsilon(1e-9));

    // perfect reconstruction, clamped
    const std::vector<double> ones = {1.0, 1.0};
    CHECK(bce_loss(ones, ones) == doctest::Approx(2.0 * -std::log(1.0 - 1e-7)).epsilon(1e-6));
    CHECK(bce_loss(ones, ones) < 1e-5);
}

TEST_CASE("analytic gradient matches central finite differences") {
    const AEParams params = init_params(6, 3, 21);
    Rng rng(22);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::uint32_t> nz;
        for (std::uint32_t i = 0; i < 6; ++i)
            if (rng.uniform() < 0.5) nz.push_back(i);

        AEGradients analytic;
        analytic.zero(params.n, params.d, Exec::serial);
        accumulate_sample_gradient(params, nz, analytic);
        const AEGradients numeric = oracles::finite_difference_gradient(params, nz);

        CHECK(oracles::max_relative_error(analytic.w_in, numeric.w_in) < 1e-4);
        CHECK(oracles::max_relative_error(analytic.b_in, numeric.b_in) < 1e-4);
        CHECK(oracles::max_relative_error(analytic.w_out, numeric.w_out) < 1e-4);
        CHECK(oracles::max_relative_error(analytic.b_out, numeric.b_out) < 1e-4);
    }
}

TEST_CASE("training reduces the loss on a random matrix") {
    const SparseBinaryMatrix m = random_binary(20, 10, 77);
    AETrainConfig cfg;
    cfg.dim = 4;
    cfg.epochs = 200;
    cfg.batch_size = 8;
    cfg.seed = 3;
    const auto [params, history] = train_autoencoder(m, cfg);
    REQUIRE(history.size() == 200);
    CHECK(history.back() < history.front());

    // near-monotone early descent: at most one increase in the first 10 epochs
    int violations = 0;
    for (std::size_t e = 1; e < 10; ++e) violations += history[e] > history[e - 1];
    CHECK(violations <= 1);
}

TEST_CASE("overcomplete code nearly memorizes an identity matrix") {
    const SparseBinaryMatrix m = identity_matrix(8);
    AETrainConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 800;
    cfg.batch_size = 8;
    cfg.learning_rate = 0.01;
    cfg.seed = 5;
    const auto [params, history] = train_autoencoder(m, cfg);
    CHECK(history.back() < 0.05 * history.front());
}

TEST_CASE("training is deterministic and exec-policy independent") {
    const SparseBinaryMatrix m = random_binary(12, 9, 13);
    AETrainConfig cfg;
    cfg.dim = 3;
    cfg.epochs = 20;
    cfg.batch_size = 5;
    cfg.seed = 17;
    const auto [p1, h1] = train_autoencoder(m, cfg, Exec::openmp);
    const auto [p2, h2] = train_autoencoder(m, cfg, Exec::openmp);
    const auto [p3, h3] = train_autoencoder(m, cfg, Exec::serial);
    CHECK(p1.w_in == p2.w_in);
    CHECK(p1.w_out == p2.w_out);
    CHECK(h1 == h2);
    CHECK(p1.w_in == p3.w_in);
    CHECK(p1.w_out == p3.w_out);
    CHECK(p1.b_in == p3.b_in);
    CHECK(p1.b_out == p3.b_out);
    CHECK(h1 == h3);
}

TEST_CASE("encode matches forward row by row and is nonnegative") {
    const SparseBinaryMatrix m = random_binary(10, 7, 31);
    AETrainConfig cfg;
    cfg.dim = 3;
    cfg.epochs = 30;
    cfg.batch_size = 4;
    cfg.seed = 2;
    const auto [params, history] = train_autoencoder(m, cfg);
    const WordEmbeddingMatrix h = encode(params, m);
    REQUIRE(h.n_rows == 10);
    REQUIRE(h.dim == 3);
    Rng rng(4);
    for (int k = 0; k < 5; ++k) {
        const std::size_t r = rng.below(10);
        const AEForward f = forward(params, m.rows[r]);
        for (std::size_t j = 0; j < 3; ++j) CHECK(h.row(r)[j] == f.h[j]);
    }
    for (double v : h.data) CHECK(v >= 0.0);
}

TEST_CASE("identical matrix rows encode identically") {
    SparseBinaryMatrix m = random_binary(6, 8, 55);
    m.rows[4] = m.rows[1];  // duplicate word rows
    const AEParams params = init_params(8, 3, 6);
    const WordEmbeddingMatrix h = encode(params, m);
    for (std::size_t j = 0; j < h.dim; ++j) CHECK(h.row(4)[j] == h.row(1)[j]);
}

TEST_CASE("encode rejects mismatched widths") {
    const AEParams params = init_params(8, 3, 6);
    const SparseBinaryMatrix m = random_binary(4, 9, 1);
    CHECK_THROWS_AS(encode(params, m), ShapeMismatch);
}

TEST_CASE("params round trip through the checkpoint format") {
    const AEParams params = init_params(7, 3, 911);
    std::stringstream buffer;
    save_params(params, buffer);
    const AEParams loaded = load_params(buffer);
    CHECK(loaded.n == params.n);
    CHECK(loaded.d == params.d);
    CHECK(loaded.w_in == params.w_in);
    CHECK(loaded.b_in == params.b_in);
    CHECK(loaded.w_out == params.w_out);
    CHECK(loaded.b_out == params.b_out);
}

TEST_CASE("non-finite activations are detected") {
    AEParams p;
    p.n = 2;
    p.d = 2;
    const double inf = std::numeric_limits<double>::infinity();
    p.w_in = {inf, 0.0, -inf, 0.0};
    p.b_in = {0.0, 0.0};
    p.w_out = {1.0, 1.0, 1.0, 1.0};  // inf + -inf -> NaN downstream
    p.b_out = {0.0, 0.0};
    const std::vector<std::uint32_t> x = {0};
    CHECK_THROWS_AS(forward(p, x), NonFiniteActivation);
}

TEST_CASE("a diverging run raises instead of returning garbage") {
    // Adam's sign-like steps need an absurd rate to push weights past the
    // overflow threshold where inf - inf turns the loss into NaN.
    const SparseBinaryMatrix m = random_binary(10, 8, 41);
    AETrainConfig cfg;
    cfg.dim = 3;
    cfg.epochs = 10;
    cfg.batch_size = 4;
    cfg.learning_rate = 1e200;
    cfg.seed = 1;
    CHECK_THROWS_AS(train_autoencoder(m, cfg), DivergedLoss);
}

TEST_CASE("invalid dimensions are rejected") {
    const SparseBinaryMatrix m = random_binary(6, 4, 3);
    AETrainConfig cfg;
    cfg.dim = 0;
    CHECK_THROWS_AS(train_autoencoder(m, cfg), ConfigError);
    cfg.dim = 2;
    cfg.learning_rate = -1.0;
    CHECK_THROWS_AS(train_autoencoder(m, cfg), ConfigError);
}
