#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "support.hpp"

#include "mofuse/error.hpp"
#include "mofuse/gan.hpp"

#include <cmath>
#include <numeric>

using namespace mofuse;
using namespace mofuse::gan;
using testing::max_rel_error;
using testing::numeric_gradient;

namespace {

GanConfig small_config() {
    GanConfig cfg;
    cfg.noise_dim = 3;
    cfg.hidden = 6;
    return cfg;
}

double mean_log(const nn::Matrix& d, bool complement) {
    double s = 0.0;
    for (double v : d.data()) s += std::log(complement ? 1.0 - v : v);
    return s / static_cast<double>(d.size());
}

// Makes every discriminator output close to 0.5.
void flatten_discriminator(GanModel& model) {
    auto& last = model.discriminator.back();
    for (double& w : last.weights.data()) w *= 1e-3;
    for (double& b : last.biases) b = 0.0;
}

}  // namespace

TEST_CASE("discriminator gradient matches finite differences") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        nn::Rng rng(100 + trial);
        const auto cfg = small_config();
        const auto model = make_gan(4, cfg, rng);
        const auto real = testing::random_matrix(rng, 5, 4, 0.0, 1.0);
        const auto fake = testing::random_matrix(rng, 5, 4, 0.0, 1.0);
        const auto analytic = discriminator_gradients(model, real, fake);

        auto f = [&](const std::vector<double>& p) {
            auto d = model.discriminator;
            nn::assign_parameters(d, p);
            return -mean_log(nn::forward(d, real), false) - mean_log(nn::forward(d, fake), true);
        };
        const auto flat = nn::flatten_parameters(model.discriminator);
        CHECK(analytic.loss == doctest::Approx(f(flat)).epsilon(1e-12));
        CHECK(max_rel_error(analytic.grads.flatten(), numeric_gradient(f, flat)) < 1e-4);
    }
}

TEST_CASE("generator gradient flows through the frozen discriminator") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        nn::Rng rng(200 + trial);
        const auto cfg = small_config();
        const auto model = make_gan(4, cfg, rng);
        nn::Matrix noise(5, cfg.noise_dim);
        for (double& v : noise.data()) v = rng.normal();
        const auto analytic = generator_gradients(model, noise);

        auto f = [&](const std::vector<double>& p) {
            auto g = model.generator;
            nn::assign_parameters(g, p);
            return -mean_log(nn::forward(model.discriminator, nn::forward(g, noise)), false);
        };
        const auto flat = nn::flatten_parameters(model.generator);
        CHECK(analytic.loss == doctest::Approx(f(flat)).epsilon(1e-12));
        CHECK(analytic.grads.flatten().size() == flat.size());
        CHECK(max_rel_error(analytic.grads.flatten(), numeric_gradient(f, flat)) < 1e-4);
    }
}

TEST_CASE("losses at an indifferent discriminator") {
    nn::Rng rng(7);
    auto model = make_gan(3, GanConfig{}, rng);
    flatten_discriminator(model);
    const auto real = testing::random_matrix(rng, 32, 3, 0.0, 1.0);
    const auto fake = generate(model, 32, rng);
    CHECK(std::fabs(discriminator_gradients(model, real, fake).loss - 2.0 * std::log(2.0)) < 0.05);
    nn::Matrix noise(32, model.noise_dim);
    for (double& v : noise.data()) v = rng.normal();
    CHECK(std::fabs(generator_gradients(model, noise).loss - std::log(2.0)) < 0.05);

    CHECK_THROWS_AS(discriminator_gradients(model, real, nn::Matrix(4, 2)), DimensionError);
    CHECK_THROWS_AS(generator_gradients(model, nn::Matrix(4, 5)), DimensionError);
}

TEST_CASE("each step touches only its own network") {
    nn::Rng rng(8);
    auto model = make_gan(3, GanConfig{}, rng);
    GanOptimizers opt(model, 2e-4);
    const auto real = testing::random_matrix(rng, 16, 3, 0.0, 1.0);
    const auto fake = generate(model, 16, rng);

    const auto g_before = nn::flatten_parameters(model.generator);
    const auto d_before = nn::flatten_parameters(model.discriminator);
    const double expected = discriminator_gradients(model, real, fake).loss;
    CHECK(discriminator_step(model, opt, real, fake) == expected);
    CHECK(nn::flatten_parameters(model.generator) == g_before);
    CHECK(nn::flatten_parameters(model.discriminator) != d_before);

    const auto d_mid = nn::flatten_parameters(model.discriminator);
    nn::Matrix noise(16, model.noise_dim);
    for (double& v : noise.data()) v = rng.normal();
    generator_step(model, opt, noise);
    CHECK(nn::flatten_parameters(model.discriminator) == d_mid);
    CHECK(nn::flatten_parameters(model.generator) != g_before);
}

TEST_CASE("generator output range") {
    nn::Rng rng(9);
    const auto model = make_gan(5, GanConfig{}, rng);
    const auto out = generate(model, 50, rng);
    CHECK(out.rows() == 50);
    CHECK(out.cols() == 5);
    for (double v : out.data()) CHECK((v > 0.0 && v < 1.0));
}

TEST_CASE("toy distribution: generated mean near 0.8") {
    const auto data = testing::toy_minority(11);
    nn::Rng rng(12);
    const auto model = train_gan(data, GanConfig{}, rng);
    CHECK(model.history.size() == GanConfig{}.steps);
    for (const auto& p : model.history) {
        CHECK(std::isfinite(p.discriminator));
        CHECK(std::isfinite(p.generator));
    }
    const auto samples = generate(model, 1000, rng);
    const double mean = std::accumulate(samples.data().begin(), samples.data().end(), 0.0) / 1000.0;
    CHECK(std::fabs(mean - 0.8) < 0.1);
}

TEST_CASE("training is deterministic and validates input") {
    GanConfig cfg = small_config();
    cfg.steps = 50;
    const auto data = testing::toy_minority(3, 10);
    nn::Rng a(5), b(5);
    const auto first = train_gan(data, cfg, a);
    const auto second = train_gan(data, cfg, b);
    REQUIRE(first.history.size() == second.history.size());
    for (std::size_t i = 0; i < first.history.size(); ++i) {
        CHECK(first.history[i].discriminator == second.history[i].discriminator);
        CHECK(first.history[i].generator == second.history[i].generator);
    }
    CHECK(first.generator == second.generator);

    CHECK_THROWS_AS(train_gan(nn::Matrix(1, 1, 0.5), cfg, a), DataError);
    CHECK_THROWS_AS(train_gan(nn::Matrix(3, 1, 1.5), cfg, a), DataError);
}

TEST_CASE("latent normalizer") {
    const auto n = fit_latent_normalizer(nn::Matrix::from_rows({{0, 1}, {2, 1}}));
    CHECK(n.apply(nn::Matrix::from_rows({{0, 1}, {2, 1}})) == nn::Matrix::from_rows({{0, 0.5}, {1, 0.5}}));

    nn::Rng rng(4);
    const auto x = testing::random_matrix(rng, 40, 6, 0.0, 3.0);
    const auto fitted = fit_latent_normalizer(x);
    const auto scaled = fitted.apply(x);
    const auto back = fitted.invert(scaled);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::fabs(back.data()[i] - x.data()[i]) < 1e-12);
    for (std::size_t c = 0; c < scaled.cols(); ++c) {
        const auto col = scaled.column(c);
        CHECK(*std::min_element(col.begin(), col.end()) == 0.0);
        CHECK(*std::max_element(col.begin(), col.end()) == 1.0);
    }
}

TEST_CASE("oversampling balances the classes") {
    nn::Rng rng(6);
    const auto rows = testing::random_matrix(rng, 100, 4, 0.0, 2.0);
    std::vector<int> labels(100, 0);
    for (std::size_t i = 0; i < 10; ++i) labels[i * 10] = 1;
    std::vector<std::size_t> minority_rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) minority_rows.push_back(i);
    }
    const auto minority = nn::select_rows(rows, minority_rows);
    const auto normalizer = fit_latent_normalizer(minority);
    GanConfig cfg = small_config();
    cfg.steps = 20;
    const auto model = train_gan(normalizer.apply(minority), cfg, rng);

    const auto out = oversample_to_balance(rows, labels, model, normalizer, rng);
    CHECK(out.x.rows() == 180);
    CHECK(out.count(0) == 90);
    CHECK(out.count(1) == 90);
    CHECK(std::count(out.synthetic.begin(), out.synthetic.end(), true) == 80);
    for (std::size_t r = 0; r < 100; ++r) {
        CHECK(!out.synthetic[r]);
        CHECK(out.y[r] == labels[r]);
        for (std::size_t c = 0; c < 4; ++c) CHECK(out.x(r, c) == rows(r, c));
    }
    std::vector<std::size_t> synthetic_rows;
    for (std::size_t r = 100; r < 180; ++r) {
        CHECK(out.synthetic[r]);
        CHECK(out.y[r] == 1);
        synthetic_rows.push_back(r);
    }
    const auto renormalized = normalizer.apply(nn::select_rows(out.x, synthetic_rows));
    const auto unclipped = nn::select_rows(out.x, synthetic_rows);
    for (std::size_t r = 0; r < unclipped.rows(); ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            const double lo = normalizer.min[c];
            const double hi = normalizer.max[c];
            CHECK(((unclipped(r, c) - lo) / (hi - lo) >= 0.0 && (unclipped(r, c) - lo) / (hi - lo) <= 1.0));
            CHECK(renormalized(r, c) == doctest::Approx((unclipped(r, c) - lo) / (hi - lo)));
        }
    }

    std::vector<int> balanced(100, 0);
    for (std::size_t i = 0; i < 50; ++i) balanced[i] = 1;
    const auto same = oversample_to_balance(rows, balanced, model, normalizer, rng);
    CHECK(same.x == rows);
    CHECK(same.y == balanced);
    CHECK(std::count(same.synthetic.begin(), same.synthetic.end(), true) == 0);
}
