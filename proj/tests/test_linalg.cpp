#include <catch2/catch_amalgamated.hpp>

#include "qgraph/linalg.hpp"
#include "qgraph/random.hpp"

using namespace qgraph;
using Catch::Approx;

namespace {

Mat random_matrix(Rng& rng, int n) {
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-2.0, 2.0);
    return a;
}

Mat random_symmetric(Rng& rng, int n) {
    Mat a = random_matrix(rng, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) a(j, i) = a(i, j);
    return a;
}

// independent oracle: Leibniz expansion, fine for n <= 6
double det_leibniz(const Mat& a) {
    const int n = a.rows();
    if (n == 1) return a(0, 0);
    double det = 0.0;
    for (int j = 0; j < n; ++j) {
        Mat minor(n - 1, n - 1);
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = a(r, c);
            }
        }
        det += ((j % 2 == 0) ? 1.0 : -1.0) * a(0, j) * det_leibniz(minor);
    }
    return det;
}

}  // namespace

TEST_CASE("eigen_sym: path Laplacian has eigenvalues 0, 1, 3") {
    Mat l(3, 3);
    l(0, 0) = 1; l(0, 1) = -1;
    l(1, 0) = -1; l(1, 1) = 2; l(1, 2) = -1;
    l(2, 1) = -1; l(2, 2) = 1;
    EigenSym es = eigen_sym(l);
    REQUIRE(es.values[0] == Approx(0.0).margin(1e-12));
    REQUIRE(es.values[1] == Approx(1.0).margin(1e-12));
    REQUIRE(es.values[2] == Approx(3.0).margin(1e-12));
}

TEST_CASE("eigen_sym: zero matrix") {
    EigenSym es = eigen_sym(Mat(4, 4));
    for (double v : es.values) REQUIRE(v == 0.0);
}

TEST_CASE("eigen_sym: rejects non-symmetric input") {
    Mat a(2, 2);
    a(0, 1) = 1.0;
    REQUIRE_THROWS_AS(eigen_sym(a), Error);
}

TEST_CASE("eigen_sym: random matrices give orthonormal eigenpairs with small residual") {
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        int n = static_cast<int>(rng.integer(2, 8));
        Mat a = random_symmetric(rng, n);
        EigenSym es = eigen_sym(a);
        double scale = std::max(a.max_abs(), 1.0);

        double trace = 0.0, vsum = 0.0;
        for (int i = 0; i < n; ++i) trace += a(i, i);
        for (double v : es.values) vsum += v;
        REQUIRE(vsum == Approx(trace).margin(1e-10 * scale));

        for (int j = 0; j < n; ++j) {
            Vec v = es.vectors.col(j);
            Vec av = a * v;
            for (int i = 0; i < n; ++i)
                REQUIRE(av[i] == Approx(es.values[j] * v[i]).margin(1e-10 * scale));
            for (int j2 = 0; j2 <= j; ++j2) {
                double d = dot(v, es.vectors.col(j2));
                REQUIRE(d == Approx(j2 == j ? 1.0 : 0.0).margin(1e-11));
            }
        }
    }
}

TEST_CASE("svd: reconstruction, orthogonality and agreement with A^T A eigenvalues") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        int n = static_cast<int>(rng.integer(2, 10));
        Mat a = random_matrix(rng, n);
        Svd s = svd(a);

        for (int j = 0; j + 1 < n; ++j) REQUIRE(s.sigma[j] >= s.sigma[j + 1]);

        // A V = U Sigma
        for (int j = 0; j < n; ++j) {
            Vec av = a * s.v.col(j);
            for (int i = 0; i < n; ++i)
                REQUIRE(av[i] == Approx(s.u(i, j) * s.sigma[j]).margin(1e-10));
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double d = dot(s.v.col(i), s.v.col(j));
                REQUIRE(d == Approx(i == j ? 1.0 : 0.0).margin(1e-12));
            }

        // independent route: singular values^2 = eigenvalues of A^T A
        Mat ata = a.transposed() * a;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) ata(j, i) = ata(i, j) = 0.5 * (ata(i, j) + ata(j, i));
        EigenSym es = eigen_sym(ata);
        for (int j = 0; j < n; ++j) {
            double expected = std::sqrt(std::max(es.values[n - 1 - j], 0.0));
            REQUIRE(s.sigma[j] == Approx(expected).margin(1e-9));
        }
    }
}

TEST_CASE("svd: exact null space is detected") {
    // rank-1 matrix in R^{3x3}
    Mat a(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = (i + 1.0) * (j + 1.0);
    Svd s = svd(a);
    REQUIRE(s.sigma[1] <= 1e-12 * s.sigma[0]);
    REQUIRE(s.sigma[2] <= 1e-12 * s.sigma[0]);
    // null vectors really annihilate a
    for (int j = 1; j < 3; ++j) {
        Vec av = a * s.v.col(j);
        for (double x : av) REQUIRE(std::fabs(x) <= 1e-12 * s.sigma[0]);
    }
}

TEST_CASE("det_sign matches a Leibniz-expansion oracle") {
    Rng rng(13);
    for (int trial = 0; trial < 60; ++trial) {
        int n = static_cast<int>(rng.integer(1, 6));
        Mat a = random_matrix(rng, n);
        double d = det_leibniz(a);
        int expected = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (std::fabs(d) < 1e-10) continue;  // too close to call for the oracle
        REQUIRE(det_sign(a) == expected);
    }
    Mat singular(2, 2);
    singular(0, 0) = 1.0; singular(0, 1) = 2.0;
    singular(1, 0) = 2.0; singular(1, 1) = 4.0;
    REQUIRE(det_sign(singular) == 0);
}

TEST_CASE("cholesky and tridiagonal solvers agree with direct residual checks") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        int n = static_cast<int>(rng.integer(1, 9));
        Mat b = random_matrix(rng, n);
        Mat spd(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += b(i, k) * b(j, k);
                spd(i, j) = s + (i == j ? 0.5 : 0.0);
            }
        Vec rhs(n);
        for (double& x : rhs) x = rng.uniform(-1.0, 1.0);
        Vec x = Cholesky(spd).solve(rhs);
        Vec back = spd * x;
        for (int i = 0; i < n; ++i) REQUIRE(back[i] == Approx(rhs[i]).margin(1e-8));
    }

    // tridiagonal vs dense on the same SPD system
    int n = 7;
    Vec diag(n), off(n - 1);
    Rng rng2(19);
    for (double& d : diag) d = rng2.uniform(2.0, 4.0);
    for (double& o : off) o = rng2.uniform(-0.9, 0.9);
    Mat dense(n, n);
    for (int i = 0; i < n; ++i) dense(i, i) = diag[i];
    for (int i = 0; i + 1 < n; ++i) dense(i, i + 1) = dense(i + 1, i) = off[i];
    Vec rhs(n);
    for (double& x : rhs) x = rng2.uniform(-1.0, 1.0);
    Vec x1 = Tridiag(diag, off).solve(rhs);
    Vec x2 = Cholesky(dense).solve(rhs);
    for (int i = 0; i < n; ++i) REQUIRE(x1[i] == Approx(x2[i]).margin(1e-10));
}

TEST_CASE("orthonormal_from_gram produces orthonormal combinations") {
    Rng rng(23);
    int m = 6, d = 3;
    Mat v(m, d);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j) v(i, j) = rng.uniform(-1.0, 1.0);
    Mat gram(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) gram(i, j) = dot(v.col(i), v.col(j));
    Mat c = orthonormal_from_gram(gram);
    REQUIRE(c.cols() == d);
    Mat w = v * c;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            REQUIRE(dot(w.col(i), w.col(j)) == Approx(i == j ? 1.0 : 0.0).margin(1e-10));
}
