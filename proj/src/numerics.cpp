#include "gridcert/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "gridcert/errors.hpp"

namespace gridcert {

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(const DenseVector& d) {
    DenseMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (int i = 0; i < m.rows; ++i) m(i, i) = d[i];
    return m;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix r(a.rows, a.cols);
    for (size_t k = 0; k < r.data.size(); ++k) r.data[k] = a.data[k] + b.data[k];
    return r;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix r(a.rows, a.cols);
    for (size_t k = 0; k < r.data.size(); ++k) r.data[k] = a.data[k] - b.data[k];
    return r;
}

DenseMatrix operator-(const DenseMatrix& a) {
    DenseMatrix r(a.rows, a.cols);
    for (size_t k = 0; k < r.data.size(); ++k) r.data[k] = -a.data[k];
    return r;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix r(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

DenseVector operator*(const DenseMatrix& a, const DenseVector& x) {
    DenseVector r(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a(i, j) * x[j];
        r[i] = s;
    }
    return r;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix r(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) r(j, i) = a(i, j);
    return r;
}

double sup_norm(const DenseVector& x) {
    if (x.empty()) throw std::invalid_argument("sup_norm: empty vector");
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

double induced_norm(const DenseMatrix& a) {
    double m = 0.0;
    for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += std::abs(a(i, j));
        m = std::max(m, s);
    }
    return m;
}

LuFactorization::LuFactorization(DenseMatrix a) : lu_(std::move(a)) {
    const int n = lu_.rows;
    perm_.resize(n);
    for (int i = 0; i < n; ++i) perm_[i] = i;
    const double tol = 1e-12 * induced_norm(lu_);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(lu_(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (best <= tol) { singular_ = true; return; }
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
            std::swap(perm_[k], perm_[piv]);
        }
        const double inv_pivot = 1.0 / lu_(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = lu_(i, k) * inv_pivot;
            lu_(i, k) = f;
            if (f == 0.0) continue;
            for (int j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

DenseVector LuFactorization::solve(const DenseVector& b) const {
    const int n = lu_.rows;
    DenseVector x(n);
    for (int i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (int i = 1; i < n; ++i) {
        double s = x[i];
        for (int j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
        x[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
        x[i] = s / lu_(i, i);
    }
    return x;
}

DenseVector solve_linear(const DenseMatrix& a, const DenseVector& b) {
    if (a.rows != a.cols || static_cast<int>(b.size()) != a.rows)
        throw std::invalid_argument("solve_linear: dimension mismatch");
    LuFactorization lu(a);
    if (lu.singular()) throw SingularMatrixError("solve_linear: matrix singular to tolerance");
    return lu.solve(b);
}

DenseMatrix inverse(const DenseMatrix& a) {
    if (a.rows != a.cols) throw std::invalid_argument("inverse: matrix not square");
    const int n = a.rows;
    LuFactorization lu(a);
    if (lu.singular()) throw SingularMatrixError("inverse: matrix singular to tolerance");
    DenseMatrix inv(n, n);
    DenseVector e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        DenseVector col = lu.solve(e);
        e[j] = 0.0;
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

double inverse_sup_norm(const DenseMatrix& a) {
    return induced_norm(inverse(a));
}

namespace {

double eval_poly(const std::array<double, 4>& c, double x) {
    return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

// Bisection polish on [lo, hi] assuming a sign change; keeps the bracket tight
// around the companion-matrix estimate.
double bisect(const std::array<double, 4>& c, double lo, double hi) {
    double flo = eval_poly(c, lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = eval_poly(c, mid);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) == (fm < 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
        if (hi - lo <= 1e-16 * std::max(1.0, std::abs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double min_positive_real_root(const std::array<double, 4>& coeffs) {
    // Degree actually present after expansion.
    int deg = 3;
    while (deg > 0 && coeffs[deg] == 0.0) --deg;
    if (deg == 0) throw NoRootError("min_positive_real_root: constant polynomial has no root");

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -coeffs[i] / coeffs[deg];

    Eigen::EigenSolver<Eigen::MatrixXd> es(companion);
    std::vector<double> candidates;
    for (int i = 0; i < deg; ++i) {
        const std::complex<double> z = es.eigenvalues()[i];
        if (std::abs(z.imag()) < 1e-9 && z.real() > 0.0) candidates.push_back(z.real());
    }
    if (candidates.empty())
        throw NoRootError("min_positive_real_root: no positive real root");
    std::sort(candidates.begin(), candidates.end());

    double root = candidates.front();
    // Refine against a local sign-change bracket; stay local so the polish
    // cannot wander off to a different root.
    for (double w = 1e-9 * std::max(1.0, root); w <= 1e-3 * std::max(1.0, root); w *= 10.0) {
        const double lo = std::max(root - w, 0.0);
        const double hi = root + w;
        if ((eval_poly(coeffs, lo) < 0.0) != (eval_poly(coeffs, hi) < 0.0)) {
            root = bisect(coeffs, lo, hi);
            break;
        }
    }
    return root;
}

} // namespace gridcert
