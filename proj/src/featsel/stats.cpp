#include "mofuse/featsel.hpp"

#include "mofuse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mofuse::featsel {

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return ss / static_cast<double>(values.size() - 1);
}

namespace {

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iter = 10000;
    constexpr double eps = 1e-15;
    constexpr double tiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) {
            return h;
        }
    }
    throw NumericError("incomplete beta continued fraction did not converge (a=" + std::to_string(a) +
                       ", b=" + std::to_string(b) + ", x=" + std::to_string(x) + ")");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw NumericError("incomplete beta requires a, b > 0");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw NumericError("incomplete beta requires 0 <= x <= 1, got " + std::to_string(x));
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) {
        throw NumericError("t distribution needs positive degrees of freedom");
    }
    if (std::isnan(t)) {
        throw NumericError("t statistic is NaN");
    }
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return std::clamp(regularized_incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

TTestResult welch_t_test(std::span<const double> values, std::span<const int> labels) {
    if (values.size() != labels.size()) {
        throw DimensionError("welch_t_test: " + std::to_string(values.size()) + " values but " +
                             std::to_string(labels.size()) + " labels");
    }
    std::vector<double> g1;
    std::vector<double> g0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        (labels[i] == 1 ? g1 : g0).push_back(values[i]);
    }
    if (g1.size() < 2 || g0.size() < 2) {
        throw DataError("welch_t_test needs at least 2 samples per class (got " + std::to_string(g1.size()) +
                        " and " + std::to_string(g0.size()) + ")");
    }
    const double n1 = static_cast<double>(g1.size());
    const double n0 = static_cast<double>(g0.size());
    const double m1 = mean(g1);
    const double m0 = mean(g0);
    const double q1 = sample_variance(g1) / n1;
    const double q0 = sample_variance(g0) / n0;
    const double se2 = q1 + q0;

    TTestResult out;
    if (se2 == 0.0) {
        out.df = n1 + n0 - 2.0;
        if (m1 == m0) {
            out.t = 0.0;
            out.p = 1.0;
        } else {
            out.t = m1 > m0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
            out.p = 0.0;
        }
        return out;
    }
    out.t = (m1 - m0) / std::sqrt(se2);
    out.df = se2 * se2 / (q1 * q1 / (n1 - 1.0) + q0 * q0 / (n0 - 1.0));
    out.p = student_t_two_sided_p(out.t, out.df);
    return out;
}

std::optional<double> log2_fold_change(std::span<const double> raw_values, std::span<const int> labels) {
    if (raw_values.size() != labels.size()) {
        throw DimensionError("log2_fold_change: " + std::to_string(raw_values.size()) + " values but " +
                             std::to_string(labels.size()) + " labels");
    }
    double s1 = 0.0, s0 = 0.0;
    std::size_t n1 = 0, n0 = 0;
    for (std::size_t i = 0; i < raw_values.size(); ++i) {
        if (labels[i] == 1) {
            s1 += raw_values[i];
            ++n1;
        } else {
            s0 += raw_values[i];
            ++n0;
        }
    }
    if (n1 == 0 || n0 == 0) return std::nullopt;
    const double m1 = s1 / static_cast<double>(n1);
    const double m0 = s0 / static_cast<double>(n0);
    if (!(m1 > 0.0) || !(m0 > 0.0)) return std::nullopt;
    return std::log2(m1 / m0);
}

std::vector<double> bh_adjust(std::span<const double> p_values) {
    const std::size_t m = p_values.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (!(p_values[i] >= 0.0 && p_values[i] <= 1.0)) {
            throw DataError("bh_adjust: p-value " + std::to_string(p_values[i]) + " at index " + std::to_string(i) +
                            " is outside [0, 1]");
        }
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    std::vector<double> adjusted(m);
    const double md = static_cast<double>(m);
    double running = 1.0;
    for (std::size_t k = m; k-- > 0;) {
        const double candidate = p_values[order[k]] * (md / static_cast<double>(k + 1));
        running = std::min(running, candidate);
        adjusted[order[k]] = running;
    }
    return adjusted;
}

}  // namespace mofuse::featsel
