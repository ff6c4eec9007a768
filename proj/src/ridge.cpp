#include "rfa/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rfa/errors.hpp"
#include "rfa/rng.hpp"

namespace rfa {
namespace {

void check_fit_inputs(const Matrix& X, const Vector& y, double penalty) {
    if (X.rows() != y.size()) {
        throw NumericError("ridge_fit: X rows do not match y length");
    }
    if (X.rows() < 2) {
        throw NumericError("ridge_fit: need at least 2 rows");
    }
    if (penalty < 0.0) {
        throw NumericError("ridge_fit: penalty must be nonnegative");
    }
}

Vector solve_centered(const Matrix& Xc, const Vector& yc, double penalty) {
    const Index n = Xc.rows();
    const Index p = Xc.cols();
    if (p == 0) return Vector(0);
    if (penalty == 0.0) {
        // Unpenalized: least squares via column-pivoted QR, refusing rank
        // deficiency (centering caps the rank at n-1, so p >= n also fails).
        Eigen::ColPivHouseholderQR<Matrix> qr(Xc);
        if (qr.rank() < p) {
            throw NumericError("ridge_fit: ill-conditioned (singular system with penalty = 0)");
        }
        return qr.solve(yc);
    }
    if (p > n) {
        // Dual form: w = Xc' (Xc Xc' + penalty I)^-1 yc.
        Matrix kernel = Xc * Xc.transpose();
        kernel.diagonal().array() += penalty;
        return Xc.transpose() * Eigen::LLT<Matrix>(kernel).solve(yc);
    }
    Matrix gram = Xc.transpose() * Xc;
    gram.diagonal().array() += penalty;
    return Eigen::LLT<Matrix>(gram).solve(Xc.transpose() * yc);
}

// Inner-CV scorer over the penalty grid for the tall case (p <= n):
// per-fold centered Gram matrices come from subtracting fold blocks
// from the totals, so X is swept once per fold rather than once per
// (fold, penalty).
double tune_primal(const Matrix& X, const Vector& y, const std::vector<int>& fold_of,
                   int folds, const std::vector<double>& grid) {
    const Index n = X.rows();
    const Index p = X.cols();

    std::vector<Matrix> gram_f(folds, Matrix::Zero(p, p));
    std::vector<Vector> xty_f(folds, Vector::Zero(p));
    std::vector<Vector> xsum_f(folds, Vector::Zero(p));
    std::vector<double> ysum_f(folds, 0.0);
    std::vector<Index> count_f(folds, 0);

    const Matrix gram_all = X.transpose() * X;
    const Vector xty_all = X.transpose() * y;
    const Vector xsum_all = X.colwise().sum();
    const double ysum_all = y.sum();

    for (int f = 0; f < folds; ++f) {
        std::vector<Index> rows;
        for (Index i = 0; i < n; ++i) {
            if (fold_of[i] == f) rows.push_back(i);
        }
        Matrix Xf(rows.size(), p);
        Vector yf(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            Xf.row(r) = X.row(rows[r]);
            yf[r] = y[rows[r]];
        }
        gram_f[f] = Xf.transpose() * Xf;
        xty_f[f] = Xf.transpose() * yf;
        xsum_f[f] = Xf.colwise().sum();
        ysum_f[f] = yf.sum();
        count_f[f] = static_cast<Index>(rows.size());
    }

    double best_penalty = grid.back();
    double best_sse = std::numeric_limits<double>::infinity();
    for (double penalty : grid) {
        double sse = 0.0;
        for (int f = 0; f < folds; ++f) {
            const Index n_tr = n - count_f[f];
            const double ym = (ysum_all - ysum_f[f]) / static_cast<double>(n_tr);
            const Vector xm = (xsum_all - xsum_f[f]) / static_cast<double>(n_tr);
            Matrix gram = gram_all - gram_f[f] -
                          static_cast<double>(n_tr) * (xm * xm.transpose());
            gram.diagonal().array() += penalty;
            const Vector rhs = xty_all - xty_f[f] - static_cast<double>(n_tr) * ym * xm;
            const Vector w = Eigen::LLT<Matrix>(gram).solve(rhs);
            const double bias = ym - w.dot(xm);
            for (Index i = 0; i < n; ++i) {
                if (fold_of[i] != f) continue;
                const double e = y[i] - X.row(i).dot(w) - bias;
                sse += e * e;
            }
        }
        // Ties keep the larger (more regularized) penalty; the grid ascends.
        if (std::isfinite(sse) && sse <= best_sse) {
            best_sse = sse;
            best_penalty = penalty;
        }
    }
    return best_penalty;
}

// Wide case (p > n): everything runs in the dual on the n x n kernel
// G = X X', computed once. Centered kernels over row subsets are pure
// G algebra.
double tune_dual(const Matrix& X, const Vector& y, const std::vector<int>& fold_of,
                 int folds, const std::vector<double>& grid) {
    const Index n = X.rows();
    const Matrix g = X * X.transpose();

    struct FoldViews {
        std::vector<Index> train;
        std::vector<Index> val;
        Matrix kc_tt;   // centered kernel on train rows
        Matrix kc_vt;   // centered cross kernel val x train
        Vector yc_t;
        double ym = 0.0;
    };
    std::vector<FoldViews> views(folds);
    for (Index i = 0; i < n; ++i) {
        for (int f = 0; f < folds; ++f) {
            (fold_of[i] == f ? views[f].val : views[f].train).push_back(i);
        }
    }
    for (auto& v : views) {
        const Index m = static_cast<Index>(v.train.size());
        Matrix g_tt(m, m);
        Matrix g_vt(v.val.size(), m);
        Vector y_t(m);
        for (Index r = 0; r < m; ++r) {
            y_t[r] = y[v.train[r]];
            for (Index c = 0; c < m; ++c) g_tt(r, c) = g(v.train[r], v.train[c]);
        }
        for (std::size_t r = 0; r < v.val.size(); ++r) {
            for (Index c = 0; c < m; ++c) g_vt(r, c) = g(v.val[r], v.train[c]);
        }
        const Vector row_mean_t = g_tt.rowwise().sum() / static_cast<double>(m);
        const double grand = row_mean_t.sum() / static_cast<double>(m);
        v.kc_tt = g_tt;
        v.kc_tt.colwise() -= row_mean_t;
        v.kc_tt.rowwise() -= row_mean_t.transpose();
        v.kc_tt.array() += grand;
        const Vector row_mean_v = g_vt.rowwise().sum() / static_cast<double>(m);
        v.kc_vt = g_vt;
        v.kc_vt.rowwise() -= row_mean_t.transpose();
        v.kc_vt.colwise() -= row_mean_v;
        v.kc_vt.array() += grand;
        v.ym = y_t.mean();
        v.yc_t = y_t.array() - v.ym;
    }

    double best_penalty = grid.back();
    double best_sse = std::numeric_limits<double>::infinity();
    for (double penalty : grid) {
        double sse = 0.0;
        for (const auto& v : views) {
            Matrix k = v.kc_tt;
            k.diagonal().array() += penalty;
            const Vector alpha = Eigen::LLT<Matrix>(k).solve(v.yc_t);
            const Vector pred = v.kc_vt * alpha;
            for (std::size_t r = 0; r < v.val.size(); ++r) {
                const double e = y[v.val[r]] - (pred[r] + v.ym);
                sse += e * e;
            }
        }
        if (std::isfinite(sse) && sse <= best_sse) {
            best_sse = sse;
            best_penalty = penalty;
        }
    }
    return best_penalty;
}

}  // namespace

RidgeFit ridge_fit(const Matrix& X, const Vector& y, double penalty) {
    check_fit_inputs(X, y, penalty);
    const Vector col_means = X.cols() > 0 ? Vector(X.colwise().mean()) : Vector(0);
    const double y_mean = y.mean();
    const Matrix Xc = X.rowwise() - col_means.transpose();
    const Vector yc = y.array() - y_mean;

    RidgeFit fit;
    fit.penalty = penalty;
    fit.weights = solve_centered(Xc, yc, penalty);
    fit.bias = y_mean - (X.cols() > 0 ? fit.weights.dot(col_means) : 0.0);
    return fit;
}

Vector ridge_predict(const RidgeFit& fit, const Matrix& X) {
    if (X.cols() != fit.weights.size()) {
        throw NumericError("ridge_predict: column count does not match weight length");
    }
    return (X * fit.weights).array() + fit.bias;
}

PenaltySpec PenaltySpec::default_grid() {
    PenaltySpec s;
    for (int e = -3; e <= 5; ++e) s.grid.push_back(std::pow(10.0, e));
    return s;
}

PenaltySpec PenaltySpec::fixed_value(double v) {
    PenaltySpec s;
    s.fixed = v;
    return s;
}

RidgeFit ridge_fit_tuned(const Matrix& X, const Vector& y, const PenaltySpec& spec,
                         std::uint64_t seed, int inner_folds) {
    if (spec.fixed) return ridge_fit(X, y, *spec.fixed);
    if (spec.grid.empty()) throw NumericError("ridge_fit_tuned: empty penalty grid");
    for (double penalty : spec.grid) {
        if (penalty <= 0.0) {
            throw NumericError("ridge_fit_tuned: grid penalties must be positive");
        }
    }
    if (spec.grid.size() == 1) return ridge_fit(X, y, spec.grid.front());

    const Index n = X.rows();
    const Index p = X.cols();
    if (n != y.size() || n < 2) throw NumericError("ridge_fit_tuned: bad inputs");
    if (p == 0) return ridge_fit(X, y, spec.grid.front());

    const int folds = std::max(2, std::min<int>(inner_folds, static_cast<int>(n) / 2));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(seed, "ridge-inner-cv"));
    rng.shuffle(order);
    std::vector<int> fold_of(n);
    for (Index i = 0; i < n; ++i) fold_of[order[i]] = static_cast<int>(i % folds);

    const double best = p > n ? tune_dual(X, y, fold_of, folds, spec.grid)
                              : tune_primal(X, y, fold_of, folds, spec.grid);
    return ridge_fit(X, y, best);
}

}  // namespace rfa
