// Independent reference computations shared by the unit tests and the acceptance runner.

#ifndef MOFUSE_TESTS_SUPPORT_HPP
#define MOFUSE_TESTS_SUPPORT_HPP

#include "mofuse/nn/layer.hpp"
#include "mofuse/nn/matrix.hpp"
#include "mofuse/nn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace mofuse::testing {

inline double rel_error(double analytic, double numeric) {
    const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
    return std::fabs(analytic - numeric) / scale;
}

/// Central differences of f over every entry of `params`.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> params, double h = 1e-5) {
    std::vector<double> g(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double keep = params[i];
        params[i] = keep + h;
        const double up = f(params);
        params[i] = keep - h;
        const double down = f(params);
        params[i] = keep;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

inline double max_rel_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) worst = std::max(worst, rel_error(analytic[i], numeric[i]));
    return worst;
}

inline nn::Matrix random_matrix(nn::Rng& rng, std::size_t r, std::size_t c, double lo, double hi) {
    nn::Matrix m(r, c);
    for (double& v : m.data()) v = rng.uniform(lo, hi);
    return m;
}

/// Step-up definition evaluated pairwise: min over p_j >= p_i of m p_j / #{p <= p_j}.
inline std::vector<double> brute_force_bh(const std::vector<double>& p) {
    const double m = static_cast<double>(p.size());
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double best = 1.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (p[j] < p[i]) continue;
            std::size_t rank = 0;
            for (double q : p) rank += q <= p[j] ? 1 : 0;
            best = std::min(best, p[j] * (m / static_cast<double>(rank)));
        }
        out[i] = best;
    }
    return out;
}

inline double student_t_density(double x, double df) {
    const double logc = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) - 0.5 * std::log(df * M_PI);
    return std::exp(logc - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                               double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Two-sided p-value by integrating the t density over [0, |t|].
inline double t_quadrature_p(double t, double df) {
    auto f = [df](double x) { return student_t_density(x, df); };
    const double b = std::fabs(t);
    if (b == 0.0) return 1.0;
    const double fa = f(0.0), fb = f(b), fm = f(0.5 * b);
    const double whole = b / 6.0 * (fa + 4.0 * fm + fb);
    return 1.0 - 2.0 * adaptive_simpson(f, 0.0, b, fa, fm, fb, whole, 1e-13, 60);
}

/// Pairwise concordance with ties counted one half.
inline double mann_whitney_auc(const std::vector<int>& labels, const std::vector<double>& scores) {
    double concordant = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[j] != 0) continue;
            pairs += 1.0;
            if (scores[i] > scores[j]) concordant += 1.0;
            else if (scores[i] == scores[j]) concordant += 0.5;
        }
    }
    return concordant / pairs;
}

/// 200 x 20 rows generated from a rank-3 latent: U(0,1)^3 times fixed loadings plus N(0, 0.05^2).
inline nn::Matrix planted_latent_dataset(std::uint64_t seed, std::size_t rows = 200, std::size_t cols = 20,
                                         std::size_t rank = 3, double noise = 0.05) {
    nn::Rng rng(seed);
    const auto loadings = random_matrix(rng, rank, cols, -1.0, 1.0);
    const auto latent = random_matrix(rng, rows, rank, 0.0, 1.0);
    auto x = nn::matmul(latent, loadings);
    for (double& v : x.data()) v += noise * rng.normal();
    return x;
}

/// Mean squared error of predicting every column by its mean.
inline double mean_predictor_mse(const nn::Matrix& x) {
    double total = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        const auto col = x.column(c);
        double m = 0.0;
        for (double v : col) m += v;
        m /= static_cast<double>(col.size());
        for (double v : col) total += (v - m) * (v - m);
    }
    return total / static_cast<double>(x.size());
}

/// One-column minority sample tightly clustered around 0.8.
inline nn::Matrix toy_minority(std::uint64_t seed, std::size_t rows = 64) {
    nn::Rng rng(seed);
    nn::Matrix x(rows, 1);
    for (double& v : x.data()) v = std::clamp(0.8 + 0.03 * rng.normal(), 0.0, 1.0);
    return x;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("mofuse_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace mofuse::testing

#endif
