#pragma once

// Test-only oracles, independent of the library's solver paths.

#include <cmath>
#include <vector>

#include "rfa/matrix.hpp"
#include "rfa/rng.hpp"

namespace rfa::test {

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

// Centered ridge via explicit Gauss-Jordan inverse of (Xc'Xc + penalty I).
// Returns {weights..., bias} with the bias last.
inline std::vector<double> oracle_ridge(const Matrix& X, const Vector& y, double penalty) {
    const Index n = X.rows();
    const Index p = X.cols();
    std::vector<double> xm(p, 0.0);
    double ym = 0.0;
    for (Index i = 0; i < n; ++i) {
        ym += y[i];
        for (Index j = 0; j < p; ++j) xm[j] += X(i, j);
    }
    ym /= static_cast<double>(n);
    for (Index j = 0; j < p; ++j) xm[j] /= static_cast<double>(n);

    std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
    std::vector<double> rhs(p, 0.0);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) {
            const double xj = X(i, j) - xm[j];
            rhs[j] += xj * (y[i] - ym);
            for (Index k = 0; k < p; ++k) a[j][k] += xj * (X(i, k) - xm[k]);
        }
    }
    for (Index j = 0; j < p; ++j) a[j][j] += penalty;

    std::vector<std::vector<double>> inv(p, std::vector<double>(p, 0.0));
    for (Index j = 0; j < p; ++j) inv[j][j] = 1.0;
    for (Index col = 0; col < p; ++col) {
        Index pivot = col;
        for (Index r = col + 1; r < p; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double diag = a[col][col];
        for (Index c = 0; c < p; ++c) {
            a[col][c] /= diag;
            inv[col][c] /= diag;
        }
        for (Index r = 0; r < p; ++r) {
            if (r == col) continue;
            const double factor = a[r][col];
            for (Index c = 0; c < p; ++c) {
                a[r][c] -= factor * a[col][c];
                inv[r][c] -= factor * inv[col][c];
            }
        }
    }

    std::vector<double> out(p + 1, 0.0);
    for (Index r = 0; r < p; ++r) {
        double sum = 0.0;
        for (Index c = 0; c < p; ++c) sum += inv[r][c] * rhs[c];
        out[r] = sum;
    }
    double bias = ym;
    for (Index j = 0; j < p; ++j) bias -= out[j] * xm[j];
    out[p] = bias;
    return out;
}

inline Vector oracle_ridge_predict(const Matrix& X_train, const Vector& y_train,
                                   double penalty, const Matrix& X_apply) {
    const auto wb = oracle_ridge(X_train, y_train, penalty);
    Vector pred(X_apply.rows());
    for (Index i = 0; i < X_apply.rows(); ++i) {
        double sum = wb.back();
        for (Index j = 0; j < X_apply.cols(); ++j) sum += wb[j] * X_apply(i, j);
        pred[i] = sum;
    }
    return pred;
}

// Two-pass column standardization with the sample-sd convention.
inline Matrix standardize_columns(Matrix x) {
    for (Index c = 0; c < x.cols(); ++c) {
        double mean = 0.0;
        for (Index r = 0; r < x.rows(); ++r) mean += x(r, c);
        mean /= static_cast<double>(x.rows());
        double ss = 0.0;
        for (Index r = 0; r < x.rows(); ++r) ss += (x(r, c) - mean) * (x(r, c) - mean);
        const double sd = std::sqrt(ss / static_cast<double>(x.rows() - 1));
        for (Index r = 0; r < x.rows(); ++r) x(r, c) = (x(r, c) - mean) / sd;
    }
    return x;
}

}  // namespace rfa::test
