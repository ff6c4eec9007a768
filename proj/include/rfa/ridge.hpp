#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rfa/matrix.hpp"

namespace rfa {

struct RidgeFit {
    Vector weights;
    double bias = 0.0;
    double penalty = 0.0;
};

// Closed-form ridge on column-centered data; the bias is unpenalized and
// recovered analytically. penalty = 0 requires full column rank and throws
// an "ill-conditioned" NumericError otherwise. Zero-column inputs are legal
// and produce a bias-only fit.
RidgeFit ridge_fit(const Matrix& X, const Vector& y, double penalty);

Vector ridge_predict(const RidgeFit& fit, const Matrix& X);

struct PenaltySpec {
    std::vector<double> grid;      // ignored when fixed is set
    std::optional<double> fixed;

    static PenaltySpec default_grid();   // {1e-3, 1e-2, ..., 1e5}
    static PenaltySpec fixed_value(double v);
};

// Ridge with internal penalty selection: nested k-fold CV on the training
// rows over spec.grid, scored by pooled validation squared error; ties keep
// the larger penalty. The final model is refit on all rows at the winner.
RidgeFit ridge_fit_tuned(const Matrix& X, const Vector& y, const PenaltySpec& spec,
                         std::uint64_t seed, int inner_folds = 5);

}  // namespace rfa
