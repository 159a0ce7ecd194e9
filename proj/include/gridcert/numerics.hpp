#pragma once

#include <array>
#include <vector>

namespace gridcert {

using DenseVector = std::vector<double>;

/// Small dense real matrix, row-major. Sized for grids of a few dozen nodes;
/// everything here favors exactness over asymptotics.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    static DenseMatrix identity(int n);
    static DenseMatrix diagonal(const DenseVector& d);

    double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

    bool empty() const { return rows == 0 || cols == 0; }
};

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseVector operator*(const DenseMatrix& a, const DenseVector& x);
DenseMatrix operator-(const DenseMatrix& a);
DenseMatrix transpose(const DenseMatrix& a);

/// max_i |x_i|; throws std::invalid_argument on an empty vector.
double sup_norm(const DenseVector& x);

/// Matrix norm induced by the sup norm: maximum absolute row sum.
double induced_norm(const DenseMatrix& a);

/// LU factorization with partial pivoting. A pivot smaller than
/// 1e-12 * induced_norm(A) declares the matrix singular.
class LuFactorization {
  public:
    explicit LuFactorization(DenseMatrix a);

    bool singular() const { return singular_; }
    int size() const { return lu_.rows; }

    /// Forward/back substitution; requires !singular().
    DenseVector solve(const DenseVector& b) const;

  private:
    DenseMatrix lu_;
    std::vector<int> perm_;
    bool singular_ = false;
};

/// Solves Ax = b by LU with partial pivoting; throws SingularMatrixError.
DenseVector solve_linear(const DenseMatrix& a, const DenseVector& b);

/// Explicit inverse; throws SingularMatrixError.
DenseMatrix inverse(const DenseMatrix& a);

/// induced_norm(A^-1), computed from the explicit inverse.
double inverse_sup_norm(const DenseMatrix& a);

/// Smallest root with positive real part and negligible imaginary part
/// (|Im| < 1e-9) of c[0] + c[1] x + c[2] x^2 + c[3] x^3, located via the
/// eigenvalues of the companion matrix and polished by bisection on a sign
/// change bracket. Throws NoRootError when no such root exists.
double min_positive_real_root(const std::array<double, 4>& coeffs);

} // namespace gridcert
