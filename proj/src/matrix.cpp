#include "rfa/matrix.hpp"

#include "rfa/errors.hpp"

namespace rfa {

void ensure_finite(const Matrix& m, const std::string& what) {
    if (!m.allFinite()) {
        throw NumericError(what + ": non-finite value (NaN/Inf) encountered");
    }
}

void ensure_finite(const Vector& v, const std::string& what) {
    if (!v.allFinite()) {
        throw NumericError(what + ": non-finite value (NaN/Inf) encountered");
    }
}

Matrix hconcat(const std::vector<Matrix>& blocks) {
    if (blocks.empty()) return Matrix(0, 0);
    const Index rows = blocks.front().rows();
    Index cols = 0;
    for (const auto& b : blocks) {
        if (b.rows() != rows) {
            throw NumericError("hconcat: row count mismatch across blocks");
        }
        cols += b.cols();
    }
    Matrix out(rows, cols);
    Index at = 0;
    for (const auto& b : blocks) {
        out.middleCols(at, b.cols()) = b;
        at += b.cols();
    }
    return out;
}

}  // namespace rfa
