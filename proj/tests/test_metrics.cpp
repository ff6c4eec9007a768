#include <doctest.h>

#include <cmath>

#include "rfa/errors.hpp"
#include "rfa/metrics.hpp"
#include "rfa/rng.hpp"

using namespace rfa;

namespace {

Vector vec(std::initializer_list<double> vals) {
    Vector v(vals.size());
    Index i = 0;
    for (double x : vals) v[i++] = x;
    return v;
}

// Independent oracle for the t p-value: numerically integrate the Student-t
// density tail with Simpson's rule on a transformed variable.
double t_pdf(double x, double nu) {
    const double c = std::exp(std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0)) /
                     std::sqrt(nu * M_PI);
    return c * std::pow(1.0 + x * x / nu, -(nu + 1.0) / 2.0);
}

double t_two_sided_p_quadrature(double t, double nu) {
    // p = 2 * P(T > |t|) = 1 - integral_{-|t|}^{|t|} pdf
    const double a = -std::fabs(t);
    const double b = std::fabs(t);
    const int steps = 20000;
    const double h = (b - a) / steps;
    double sum = t_pdf(a, nu) + t_pdf(b, nu);
    for (int i = 1; i < steps; ++i) {
        sum += (i % 2 == 1 ? 4.0 : 2.0) * t_pdf(a + i * h, nu);
    }
    return 1.0 - sum * h / 3.0;
}

}  // namespace

TEST_CASE("r_squared basics") {
    const Vector y = vec({1, 2, 3});
    CHECK(r_squared(y, y) == doctest::Approx(1.0));
    CHECK(r_squared(y, vec({2, 2, 2})) == doctest::Approx(0.0));
    // SS_res = 1, SS_tot = 2
    CHECK(r_squared(y, vec({1, 2, 4})) == doctest::Approx(0.5));
    CHECK_THROWS_AS(r_squared(vec({2, 2, 2}), y), NumericError);
    CHECK_THROWS_AS(r_squared(y, vec({1, 2})), NumericError);
}

TEST_CASE("r_squared never exceeds 1") {
    Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        Vector y(20), pred(20);
        for (Index i = 0; i < 20; ++i) {
            y[i] = rng.normal();
            pred[i] = rng.normal() * rng.uniform(0.0, 5.0);
        }
        CHECK(r_squared(y, pred) <= 1.0);
    }
}

TEST_CASE("pearson_r basics") {
    const Vector y = vec({1, 2, 3, 4});
    CHECK(pearson_r(y, 2.0 * y.array() + 1.0) == doctest::Approx(1.0));
    CHECK(pearson_r(y, -y) == doctest::Approx(-1.0));
    // Hand computation: cov sum 4, both squared sums 5 => 4/5.
    CHECK(pearson_r(y, vec({1, 3, 2, 4})) == doctest::Approx(0.8));
    CHECK_THROWS_AS(pearson_r(vec({1, 1, 1}), vec({1, 2, 3})), NumericError);
}

TEST_CASE("pearson_r is symmetric") {
    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        Vector a(15), b(15);
        for (Index i = 0; i < 15; ++i) {
            a[i] = rng.normal();
            b[i] = rng.normal();
        }
        CHECK(pearson_r(a, b) == doctest::Approx(pearson_r(b, a)).epsilon(1e-12));
    }
}

TEST_CASE("paired_t_test degenerate cases") {
    const Vector a = vec({1, 2, 3, 4});
    const auto same = paired_t_test(a, a);
    CHECK(same.t == 0.0);
    CHECK(same.p == 1.0);
    // Constant nonzero difference has zero variance: error by contract.
    CHECK_THROWS_AS(paired_t_test(a, a.array() + 2.0), NumericError);
}

TEST_CASE("paired_t_test matches the hand formula and a quadrature p-value") {
    // n = 10 pairs with a planted difference.
    Rng rng(42);
    Vector a(10), b(10);
    for (Index i = 0; i < 10; ++i) {
        b[i] = rng.normal();
        a[i] = b[i] + 0.5 + 0.8 * rng.normal();
    }
    const Vector d = a - b;
    const double mean = d.mean();
    const double sd = std::sqrt((d.array() - mean).square().sum() / 9.0);
    const double t_expected = mean / (sd / std::sqrt(10.0));

    const auto res = paired_t_test(a, b);
    CHECK(res.t == doctest::Approx(t_expected).epsilon(1e-12));
    CHECK(res.p == doctest::Approx(t_two_sided_p_quadrature(t_expected, 9.0)).epsilon(1e-6));
}

TEST_CASE("student_t_two_sided_p agrees with quadrature across df") {
    for (long df : {1L, 2L, 5L, 9L, 30L, 199L}) {
        for (double t : {0.0, 0.5, 1.3, 2.2, 4.0}) {
            CHECK(student_t_two_sided_p(t, df) ==
                  doctest::Approx(t_two_sided_p_quadrature(t, double(df))).epsilon(1e-6));
        }
    }
}
