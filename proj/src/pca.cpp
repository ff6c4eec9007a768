#include "rfa/pca.hpp"

#include <algorithm>
#include <cmath>

#include "rfa/errors.hpp"
#include "rfa/rng.hpp"

namespace rfa {
namespace {

constexpr int kOversample = 10;
constexpr int kPowerIterations = 2;

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            m(i, j) = rng.normal();
        }
    }
    return m;
}

Matrix thin_q(const Matrix& m) {
    Eigen::HouseholderQR<Matrix> qr(m);
    return qr.householderQ() * Matrix::Identity(m.rows(), std::min(m.rows(), m.cols()));
}

void fix_signs(Matrix& basis) {
    for (Index j = 0; j < basis.cols(); ++j) {
        Index at = 0;
        basis.col(j).cwiseAbs().maxCoeff(&at);
        if (basis(at, j) < 0.0) basis.col(j) = -basis.col(j);
    }
}

}  // namespace

PcaModel pca_fit(const Matrix& X, int k, PcaMethod method, std::uint64_t seed) {
    const Index n = X.rows();
    const Index p = X.cols();
    if (n < 2 || p < 1) throw NumericError("pca_fit: need at least 2 rows and 1 column");
    if (k < 1 || k > std::min(n, p)) throw NumericError("pca_fit: k out of range");

    PcaModel model;
    model.mean = X.colwise().mean();
    const Matrix Xc = X.rowwise() - model.mean.transpose();
    const double scale = Xc.cwiseAbs().maxCoeff();
    if (scale <= 0.0) throw NumericError("pca_fit: zero-variance input (all rows identical)");

    const double denom = static_cast<double>(n - 1);

    if (method == PcaMethod::Exact) {
        // Eigendecompose the smaller of the two Gram matrices.
        if (p <= n) {
            const Matrix cov = (Xc.transpose() * Xc) / denom;
            Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
            model.basis = es.eigenvectors().rightCols(k).rowwise().reverse();
            model.explained_variance =
                es.eigenvalues().tail(k).reverse().cwiseMax(0.0);
        } else {
            const Matrix gram = (Xc * Xc.transpose()) / denom;
            Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
            const Vector ev = es.eigenvalues().tail(k).reverse().cwiseMax(0.0);
            const Matrix u = es.eigenvectors().rightCols(k).rowwise().reverse();
            Matrix basis(p, k);
            for (int j = 0; j < k; ++j) {
                const double sigma = std::sqrt(std::max(ev[j] * denom, 0.0));
                if (sigma <= scale * 1e-14) {
                    throw NumericError("pca_fit: rank too low for requested components");
                }
                basis.col(j) = Xc.transpose() * u.col(j) / sigma;
            }
            model.basis = basis;
            model.explained_variance = ev;
        }
    } else {
        const Index sketch = std::min<Index>(k + kOversample, std::min(n, p));
        Rng rng(mix_seed(seed, "pca-range-finder"));
        Matrix q = thin_q(Xc * gaussian_matrix(p, sketch, rng));
        for (int it = 0; it < kPowerIterations; ++it) {
            q = thin_q(Xc.transpose() * q);
            q = thin_q(Xc * q);
        }
        const Matrix b = q.transpose() * Xc;  // sketch x p
        Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinV);
        model.basis = svd.matrixV().leftCols(k);
        model.explained_variance =
            svd.singularValues().head(k).array().square() / denom;
    }

    fix_signs(model.basis);
    return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& X) {
    if (X.cols() != model.basis.rows()) {
        throw NumericError("pca_transform: column count does not match basis");
    }
    return (X.rowwise() - model.mean.transpose()) * model.basis;
}

}  // namespace rfa
