#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace rfa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Throws NumericError if any entry is NaN/Inf; `what` names the offending object.
void ensure_finite(const Matrix& m, const std::string& what);
void ensure_finite(const Vector& v, const std::string& what);

// Horizontal concatenation; all blocks must share a row count. Zero-column
// blocks are allowed and contribute nothing.
Matrix hconcat(const std::vector<Matrix>& blocks);

}  // namespace rfa
