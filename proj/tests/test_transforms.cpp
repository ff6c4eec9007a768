#include <doctest.h>

#include <cmath>

#include "rfa/errors.hpp"
#include "rfa/rng.hpp"
#include "rfa/transforms.hpp"

using namespace rfa;

namespace {

std::vector<std::string> names_n(int n, const std::string& prefix = "f") {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

Matrix random_matrix(Index rows, Index cols, Rng& rng) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

}  // namespace

TEST_CASE("minmax maps train columns to [0,1], constants to 0.5, held-out beyond") {
    Matrix train(3, 2);
    train << 2, 7, 4, 7, 6, 7;
    const Transform t = minmax_fit(train, names_n(2));
    const Matrix scaled = t.apply(train);
    CHECK(scaled(0, 0) == doctest::Approx(0.0));
    CHECK(scaled(1, 0) == doctest::Approx(0.5));
    CHECK(scaled(2, 0) == doctest::Approx(1.0));
    CHECK(scaled.col(1).isApproxToConstant(0.5));  // constant column

    Matrix held(1, 2);
    held << 8, 9;
    const Matrix h = t.apply(held);
    CHECK(h(0, 0) == doctest::Approx(1.5));  // (8-2)/4
    CHECK(h(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("zscore standardizes training columns; held-out uses training stats") {
    Matrix train(3, 1);
    train << 1, 2, 3;
    const Transform t = zscore_fit(train, names_n(1));
    const Matrix z = t.apply(train);
    CHECK(z.col(0).mean() == doctest::Approx(0.0));
    const double sd = std::sqrt((z.col(0).array() - z.col(0).mean()).square().sum() / 2.0);
    CHECK(sd == doctest::Approx(1.0));

    // Train mean 2, sd 2: held-out 10 -> 4.
    Matrix train2(3, 1);
    train2 << 0, 2, 4;
    const Transform t2 = zscore_fit(train2, names_n(1));
    Matrix held(1, 1);
    held << 10;
    CHECK(t2.apply(held)(0, 0) == doctest::Approx(4.0));

    // Constant columns map to 0.
    Matrix constant = Matrix::Ones(4, 1);
    const Transform t3 = zscore_fit(constant, names_n(1));
    CHECK(t3.apply(constant).col(0).isApproxToConstant(0.0));
}

TEST_CASE("transform parameters ignore held-out content (no leakage)") {
    Rng rng(9);
    const Matrix train = random_matrix(20, 3, rng);
    const Matrix held_a = random_matrix(5, 3, rng);
    const Matrix held_b = 100.0 * random_matrix(5, 3, rng);

    const Transform t = zscore_fit(train, names_n(3));
    const auto& p = std::get<ZScoreParams>(t.params);
    const Transform t2 = zscore_fit(train, names_n(3));
    const auto& p2 = std::get<ZScoreParams>(t2.params);
    CHECK(p.mean == p2.mean);
    CHECK(p.sd == p2.sd);
    // Applying to wildly different held-out data is pure function application.
    CHECK(t.apply(held_a).rows() == 5);
    CHECK(t.apply(held_b).rows() == 5);
}

TEST_CASE("kbest selects by |pearson| with lexicographic tie-break") {
    Rng rng(14);
    Vector y(30);
    for (Index i = 0; i < 30; ++i) y[i] = rng.normal();

    Matrix x(30, 4);
    x.col(0) = y;                                  // |r| = 1
    x.col(1) = Vector::Ones(30);                   // constant: score 0
    for (Index i = 0; i < 30; ++i) x.col(2)[i] = rng.normal();
    x.col(3) = -y;                                 // |r| = 1

    const Transform top = kbest_fit(x, y, 1, {"d", "a", "b", "c"});
    // Columns 0 and 3 tie at |r| = 1; "c" < "d" wins.
    CHECK(top.output_names == std::vector<std::string>{"c"});

    const Transform all = kbest_fit(x, y, 4, {"d", "a", "b", "c"});
    CHECK(all.output_names == std::vector<std::string>{"d", "a", "b", "c"});  // identity
    CHECK(all.apply(x) == x);

    CHECK_THROWS_AS(kbest_fit(x, y, 0, names_n(4)), NumericError);
    CHECK_THROWS_AS(kbest_fit(x, y, 5, names_n(4)), NumericError);
}

TEST_CASE("kbest ranking matches hand-computed correlations on a 5-feature fixture") {
    // Fixed tiny fixture; correlations computed by the direct formula below.
    Matrix x(6, 5);
    x << 1, 6, 2, 0, 5,
         2, 5, 1, 0, 5,
         3, 4, 4, 1, 5,
         4, 3, 3, 0, 5,
         5, 2, 6, 1, 6,
         6, 1, 5, 0, 4;
    Vector y(6);
    y << 1.1, 1.9, 3.2, 3.8, 5.1, 6.0;
    const auto names = names_n(5);

    // Independent oracle: direct two-pass correlation per column.
    std::vector<double> expected(5, 0.0);
    for (Index c = 0; c < 5; ++c) {
        double mx = 0, my = 0;
        for (Index i = 0; i < 6; ++i) {
            mx += x(i, c);
            my += y[i];
        }
        mx /= 6;
        my /= 6;
        double sxy = 0, sxx = 0, syy = 0;
        for (Index i = 0; i < 6; ++i) {
            sxy += (x(i, c) - mx) * (y[i] - my);
            sxx += (x(i, c) - mx) * (x(i, c) - mx);
            syy += (y[i] - my) * (y[i] - my);
        }
        expected[c] = sxx > 0 ? std::fabs(sxy / std::sqrt(sxx * syy)) : 0.0;
    }
    const Vector scores = abs_correlations(x, y);
    for (Index c = 0; c < 5; ++c) CHECK(scores[c] == doctest::Approx(expected[c]).epsilon(1e-12));

    // Top-2 set from the oracle ranking.
    std::vector<std::pair<double, std::string>> ranked;
    for (Index c = 0; c < 5; ++c) ranked.push_back({-expected[c], names[c]});
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::string> want{ranked[0].second, ranked[1].second};
    std::sort(want.begin(), want.end());

    std::vector<std::string> got = kbest_fit(x, y, 2, names).output_names;
    std::sort(got.begin(), got.end());
    CHECK(got == want);
}

TEST_CASE("kbest selection is invariant to positive column rescaling") {
    Rng rng(33);
    const Matrix x = random_matrix(25, 6, rng);
    Vector y(25);
    for (Index i = 0; i < 25; ++i) y[i] = rng.normal();
    const auto base = kbest_fit(x, y, 3, names_n(6)).output_names;

    Matrix scaled = x;
    for (Index c = 0; c < 6; ++c) scaled.col(c) *= rng.uniform(0.1, 10.0);
    CHECK(kbest_fit(scaled, y, 3, names_n(6)).output_names == base);
}

TEST_CASE("reduce_group reconstructs rank-limited data and chain apply is stepwise") {
    Rng rng(41);
    // Rank-3 data: 3 latent directions.
    const Matrix latent = random_matrix(40, 3, rng);
    const Matrix loadings = random_matrix(3, 12, rng);
    const Matrix x = latent * loadings;
    Vector y = x.col(0) + x.col(5);

    const ReduceResult rr = reduce_group(x, y, 12, 3, 7, names_n(12), "g");
    CHECK(rr.reduced.cols() == 3);
    CHECK(rr.chain.output_names().size() == 3);

    // Stepwise apply equals chain apply.
    Matrix step = x;
    for (const auto& s : rr.chain.steps) step = s.apply(step);
    CHECK((step - rr.chain.apply(x)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((step - rr.reduced).cwiseAbs().maxCoeff() == 0.0);

    // 3 components capture effectively all variance of rank-3 data:
    // reconstruction through the basis is near-exact.
    const auto& pca = std::get<PcaParams>(rr.chain.steps[1].params).model;
    const Matrix centered = x.rowwise() - pca.mean.transpose();
    const Matrix reconstructed = (centered * pca.basis) * pca.basis.transpose();
    CHECK((centered - reconstructed).cwiseAbs().maxCoeff() < 1e-8);

    CHECK_THROWS_AS(reduce_group(x, y, 5, 6, 7, names_n(12), "g"), NumericError);
}

TEST_CASE("transforms serialize to JSON and back") {
    Rng rng(55);
    const Matrix train = random_matrix(15, 4, rng);
    Vector y(15);
    for (Index i = 0; i < 15; ++i) y[i] = rng.normal();

    const ReduceResult rr = reduce_group(train, y, 3, 2, 9, names_n(4), "g");
    TransformChain chain = rr.chain;
    chain.steps.insert(chain.steps.begin(), zscore_fit(train, names_n(4)));

    const auto j = chain.to_json();
    const TransformChain back = TransformChain::from_json(j);
    const Matrix held = random_matrix(6, 4, rng);
    CHECK((back.apply(held) - chain.apply(held)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.to_json() == j);

    // Width validation on apply.
    CHECK_THROWS_AS(chain.apply(random_matrix(3, 5, rng)), DataError);
}
