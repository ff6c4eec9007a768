#pragma once

#include <cstdint>

#include "rfa/matrix.hpp"

namespace rfa {

enum class PcaMethod { Exact, Randomized };

struct PcaModel {
    Vector mean;                 // column means of the training data
    Matrix basis;                // p x k, orthonormal columns
    Vector explained_variance;   // k, non-increasing
};

// Principal components of the centered input, ordered by decreasing explained
// variance. The randomized method is a seeded range finder (oversampling 10,
// two power iterations with QR re-orthonormalization) followed by an SVD of
// the projected matrix. Component signs are fixed so the entry of largest
// magnitude in each basis column is positive.
PcaModel pca_fit(const Matrix& X, int k, PcaMethod method, std::uint64_t seed);

// (X - mean) * basis.
Matrix pca_transform(const PcaModel& model, const Matrix& X);

}  // namespace rfa
