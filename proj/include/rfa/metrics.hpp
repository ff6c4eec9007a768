#pragma once

#include "rfa/matrix.hpp"

namespace rfa {

// 1 - SS_res/SS_tot. Throws NumericError when y_true is constant.
double r_squared(const Vector& y_true, const Vector& y_pred);

// Sample Pearson correlation; throws NumericError when either input is constant.
double pearson_r(const Vector& a, const Vector& b);

struct TTestResult {
    double t;
    double p;  // two-sided
};

// Two-sided paired t-test on the per-element differences. Identical inputs
// give {0, 1}; a nonzero constant difference (zero variance) is an error.
TTestResult paired_t_test(const Vector& a, const Vector& b);

// Two-sided p-value of Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, long df);

}  // namespace rfa
