#include "rfa/metrics.hpp"

#include <cmath>

#include "rfa/errors.hpp"

namespace rfa {
namespace {

// Continued fraction for the regularized incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3e-15;
    constexpr double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;

    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;

    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) break;
    }
    return h;
}

// Regularized incomplete beta I_x(a, b).
double betainc(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * beta_cf(a, b, x) / a;
    }
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

void require_same_size(const Vector& a, const Vector& b, const char* op) {
    if (a.size() != b.size()) {
        throw NumericError(std::string(op) + ": length mismatch");
    }
}

}  // namespace

double r_squared(const Vector& y_true, const Vector& y_pred) {
    require_same_size(y_true, y_pred, "r_squared");
    if (y_true.size() == 0) throw NumericError("r_squared: empty input");
    const double mean = y_true.mean();
    const double ss_tot = (y_true.array() - mean).square().sum();
    if (ss_tot <= 0.0) throw NumericError("r_squared: constant y_true");
    const double ss_res = (y_true - y_pred).squaredNorm();
    return 1.0 - ss_res / ss_tot;
}

double pearson_r(const Vector& a, const Vector& b) {
    require_same_size(a, b, "pearson_r");
    const Index n = a.size();
    if (n < 2) throw NumericError("pearson_r: need at least 2 points");
    const Vector da = a.array() - a.mean();
    const Vector db = b.array() - b.mean();
    const double sa = da.squaredNorm();
    const double sb = db.squaredNorm();
    if (sa <= 0.0 || sb <= 0.0) throw NumericError("pearson_r: constant input");
    const double r = da.dot(db) / std::sqrt(sa * sb);
    return std::clamp(r, -1.0, 1.0);
}

TTestResult paired_t_test(const Vector& a, const Vector& b) {
    require_same_size(a, b, "paired_t_test");
    const Index n = a.size();
    if (n < 2) throw NumericError("paired_t_test: need at least 2 pairs");
    const Vector d = a - b;
    const double mean = d.mean();
    const double var = (d.array() - mean).square().sum() / static_cast<double>(n - 1);
    if (var <= 0.0) {
        if (mean == 0.0) return {0.0, 1.0};
        throw NumericError("paired_t_test: zero-variance difference vector");
    }
    const double t = mean / std::sqrt(var / static_cast<double>(n));
    return {t, student_t_two_sided_p(t, n - 1)};
}

double student_t_two_sided_p(double t, long df) {
    if (df < 1) throw NumericError("student_t_two_sided_p: df must be >= 1");
    if (!std::isfinite(t)) return 0.0;
    const double nu = static_cast<double>(df);
    const double x = nu / (nu + t * t);
    return betainc(nu / 2.0, 0.5, x);
}

}  // namespace rfa
