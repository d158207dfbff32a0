// Small dense linear algebra used throughout: cyclic Jacobi eigensolver,
// one-sided Jacobi SVD, LU determinant sign, Cholesky and tridiagonal
// factorizations. Everything here targets matrices of modest size where
// robustness matters more than speed.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgraph {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Vec = std::vector<double>;

class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

    Vec col(int j) const {
        Vec c(rows_);
        for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double x : data_) s += x * x;
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : data_) m = std::max(m, std::fabs(x));
        return m;
    }

    Mat transposed() const {
        Mat t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    Vec data_;
};

inline Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw Error("matrix product: dimension mismatch");
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Vec operator*(const Mat& a, const Vec& x) {
    if (a.cols() != static_cast<int>(x.size())) throw Error("matvec: dimension mismatch");
    Vec y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline double dot(const Vec& a, const Vec& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// Symmetric eigenproblem, cyclic Jacobi rotations.

struct EigenSym {
    Vec values;   // ascending
    Mat vectors;  // columns match values
};

// Diagonalizes a symmetric matrix by cyclic Jacobi sweeps until the
// off-diagonal Frobenius norm drops below tol * ||A||_F. Input must be
// symmetric within 1e-12 * max|A|.
inline EigenSym eigen_sym(Mat a, double tol = 1e-12) {
    const int n = a.rows();
    if (n != a.cols()) throw Error("eigen_sym: matrix not square");
    const double scale = a.max_abs();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::fabs(a(i, j) - a(j, i)) > 1e-12 * std::max(1.0, scale))
                throw Error("eigen_sym: matrix not symmetric");

    Mat v = Mat::identity(n);
    const double anorm = std::max(a.frobenius_norm(), 1e-300);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
        if (std::sqrt(off) <= tol * anorm) break;
        if (sweep == 99) throw Error("eigen_sym: Jacobi did not converge");

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::fabs(apq) <= 1e-300) { a(p, q) = a(q, p) = 0.0; continue; }
                double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
                double t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                if (theta < 0.0) t = -t;
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;

                for (int i = 0; i < n; ++i) {
                    double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int j = 0; j < n; ++j) {
                    double apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = s * apj + c * aqj;
                }
                for (int i = 0; i < n; ++i) {
                    double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
                a(p, q) = a(q, p) = 0.5 * (a(p, q) + a(q, p));
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

    EigenSym out;
    out.values.resize(n);
    out.vectors = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Singular value decomposition, one-sided Jacobi on the columns.

struct Svd {
    Mat u;       // m x n, columns orthonormal where sigma > 0
    Vec sigma;   // descending
    Mat v;       // n x n orthogonal
};

inline Svd svd(Mat a) {
    const int m = a.rows();
    const int n = a.cols();
    if (m < n) throw Error("svd: expects rows >= cols");
    Mat v = Mat::identity(n);

    bool converged = false;
    for (int sweep = 0; sweep < 60 && !converged; ++sweep) {
        converged = true;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (int i = 0; i < m; ++i) {
                    app += a(i, p) * a(i, p);
                    aqq += a(i, q) * a(i, q);
                    apq += a(i, p) * a(i, q);
                }
                double denom = std::sqrt(app * aqq);
                if (denom <= 0.0 || std::fabs(apq) <= 1e-15 * denom) continue;
                converged = false;

                double zeta = (aqq - app) / (2.0 * apq);
                double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;

                for (int i = 0; i < m; ++i) {
                    double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    Vec sigma(n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += a(i, j) * a(i, j);
        sigma[j] = std::sqrt(s);
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return sigma[i] > sigma[j]; });

    Svd out;
    out.sigma.resize(n);
    out.u = Mat(m, n);
    out.v = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        int k = order[j];
        out.sigma[j] = sigma[k];
        double inv = sigma[k] > 0.0 ? 1.0 / sigma[k] : 0.0;
        for (int i = 0; i < m; ++i) out.u(i, j) = a(i, k) * inv;
        for (int i = 0; i < n; ++i) out.v(i, j) = v(i, k);
    }
    return out;
}

// Sign of det(A) via LU with partial pivoting: -1, 0 or +1.
inline int det_sign(Mat a) {
    const int n = a.rows();
    if (n != a.cols()) throw Error("det_sign: matrix not square");
    int sign = 1;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) return 0;
        if (piv != k) {
            sign = -sign;
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
        }
        if (a(k, k) < 0.0) sign = -sign;
        for (int i = k + 1; i < n; ++i) {
            double f = a(i, k) / a(k, k);
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return sign;
}

// ---------------------------------------------------------------------------
// Dense Cholesky (SPD), lower triangular.

class Cholesky {
public:
    explicit Cholesky(Mat a) : l_(std::move(a)) {
        const int n = l_.rows();
        if (n != l_.cols()) throw Error("cholesky: matrix not square");
        for (int j = 0; j < n; ++j) {
            double d = l_(j, j);
            for (int k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
            if (d <= 0.0) throw Error("cholesky: matrix not positive definite");
            d = std::sqrt(d);
            l_(j, j) = d;
            for (int i = j + 1; i < n; ++i) {
                double s = l_(i, j);
                for (int k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
                l_(i, j) = s / d;
            }
            for (int i = 0; i < j; ++i) l_(i, j) = 0.0;
        }
    }

    Vec solve(Vec b) const {
        const int n = l_.rows();
        for (int i = 0; i < n; ++i) {
            double s = b[i];
            for (int k = 0; k < i; ++k) s -= l_(i, k) * b[k];
            b[i] = s / l_(i, i);
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = b[i];
            for (int k = i + 1; k < n; ++k) s -= l_(k, i) * b[k];
            b[i] = s / l_(i, i);
        }
        return b;
    }

private:
    Mat l_;
};

// Tridiagonal LDL^T for one SPD tridiagonal block with constant-free arrays.
class Tridiag {
public:
    Tridiag() = default;
    // diag has size n, off has size n-1 (off[i] couples i and i+1).
    Tridiag(const Vec& diag, const Vec& off) : d_(diag), l_(off.size()) {
        const std::size_t n = diag.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d_[i] <= 0.0) throw Error("tridiag: not positive definite");
            l_[i] = off[i] / d_[i];
            d_[i + 1] -= l_[i] * off[i];
        }
        if (!d_.empty() && d_.back() <= 0.0) throw Error("tridiag: not positive definite");
    }

    Vec solve(Vec b) const {
        const std::size_t n = d_.size();
        for (std::size_t i = 1; i < n; ++i) b[i] -= l_[i - 1] * b[i - 1];
        for (std::size_t i = 0; i < n; ++i) b[i] /= d_[i];
        for (std::size_t i = n - 1; i > 0; --i) b[i - 1] -= l_[i - 1] * b[i];
        return b;
    }

    std::size_t size() const { return d_.size(); }

private:
    Vec d_, l_;
};

// Coefficients C (d x r) so that the vectors {sum_i C(i,j) v_i} are
// orthonormal, given the Gram matrix of {v_i}. Directions whose Gram
// eigenvalue falls below drop_tol * max eigenvalue are discarded.
inline Mat orthonormal_from_gram(const Mat& gram, double drop_tol = 1e-12) {
    EigenSym es = eigen_sym(gram);
    const int d = gram.rows();
    double lmax = 0.0;
    for (double l : es.values) lmax = std::max(lmax, l);
    std::vector<int> keep;
    for (int j = 0; j < d; ++j)
        if (es.values[j] > drop_tol * std::max(lmax, 1e-300)) keep.push_back(j);
    Mat c(d, static_cast<int>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        double inv = 1.0 / std::sqrt(es.values[keep[j]]);
        for (int i = 0; i < d; ++i) c(i, static_cast<int>(j)) = es.vectors(i, keep[j]) * inv;
    }
    return c;
}

}  // namespace qgraph
