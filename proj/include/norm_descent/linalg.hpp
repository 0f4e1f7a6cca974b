#pragma once

// Dense real linear algebra for desk-scale dimensions: symmetric and skew
// matrices, a cyclic Jacobi eigensolver, and rotations generated by the
// exponential of a skew matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "norm_descent/errors.hpp"

namespace norm_descent {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool all_finite(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

/// Row-major dense matrix. General rectangular; used as scratch space and for
/// products that leave the symmetric world (rotations, off-diagonal blocks).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t d) {
        Matrix m(d, d);
        for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    double frobenius() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

    Matrix& operator*=(double c) {
        for (double& v : data_) v *= c;
        return *this;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw InputError("matrix product: inner dimensions differ");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) {
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
        return a;
    }

    friend Matrix operator-(Matrix a, const Matrix& b) {
        for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
        return a;
    }

    Vector operator*(std::span<const double> x) const {
        Vector y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Dense symmetric d×d matrix. Only the upper triangle is stored, so
/// entry(i,j) == entry(j,i) holds bit-for-bit. All entries are finite.
class SymMatrix {
public:
    explicit SymMatrix(std::size_t dim) : dim_(dim), packed_(dim * (dim + 1) / 2, 0.0) {
        if (dim == 0) throw InputError("SymMatrix: dimension must be positive");
    }

    static SymMatrix identity(std::size_t d) { return diagonal(Vector(d, 1.0)); }

    static SymMatrix diagonal(std::span<const double> diag) {
        SymMatrix m(diag.size());
        for (std::size_t i = 0; i < diag.size(); ++i) m.set(i, i, diag[i]);
        return m;
    }

    /// Builds from a full square matrix. Entries further than `tol` from their
    /// mirror are rejected; the rest are averaged with their mirror.
    static SymMatrix from_dense(const Matrix& a, double tol = 1e-12) {
        if (a.rows() != a.cols()) throw InputError("SymMatrix: matrix is not square");
        SymMatrix m(a.rows());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = i; j < a.cols(); ++j) {
                if (!(std::abs(a(i, j) - a(j, i)) <= tol))
                    throw InputError("SymMatrix: entries (" + std::to_string(i) + "," +
                                     std::to_string(j) + ") and their mirror differ by more than " +
                                     "the symmetry tolerance");
                m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
            }
        return m;
    }

    std::size_t dim() const noexcept { return dim_; }

    double operator()(std::size_t i, std::size_t j) const {
        return packed_[index(i, j)];
    }

    void set(std::size_t i, std::size_t j, double value) {
        if (!std::isfinite(value)) throw InputError("SymMatrix: non-finite entry");
        packed_[index(i, j)] = value;
    }

    Matrix to_dense() const {
        Matrix a(dim_, dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) a(i, j) = (*this)(i, j);
        return a;
    }

    Vector operator*(std::span<const double> x) const {
        if (x.size() != dim_) throw InputError("SymMatrix: vector dimension mismatch");
        Vector y(dim_, 0.0);
        for (std::size_t i = 0; i < dim_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    double trace() const {
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += (*this)(i, i);
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : packed_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Principal submatrix on the given (sorted or unsorted) index set.
    SymMatrix principal(std::span<const std::size_t> idx) const {
        SymMatrix m(idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a; b < idx.size(); ++b) m.set(a, b, (*this)(idx[a], idx[b]));
        return m;
    }

    SymMatrix scaled(double c) const {
        SymMatrix m(*this);
        for (double& v : m.packed_) v *= c;
        return m;
    }

    friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

private:
    std::size_t index(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        return i * dim_ - i * (i + 1) / 2 + j;
    }

    std::size_t dim_;
    std::vector<double> packed_;
};

/// Skew-symmetric d×d matrix; the strictly upper triangle is stored and the
/// diagonal is identically zero.
class SkewMatrix {
public:
    explicit SkewMatrix(std::size_t dim) : dim_(dim), upper_(dim * (dim - 1) / 2, 0.0) {
        if (dim == 0) throw InputError("SkewMatrix: dimension must be positive");
    }

    std::size_t dim() const noexcept { return dim_; }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        return i < j ? upper_[index(i, j)] : -upper_[index(j, i)];
    }

    /// Sets entry (i,j) for i < j; entry (j,i) becomes its negation.
    void set_upper(std::size_t i, std::size_t j, double value) {
        if (i >= j) throw InputError("SkewMatrix: set_upper requires i < j");
        upper_[index(i, j)] = value;
    }

    SkewMatrix scaled(double c) const {
        SkewMatrix s(*this);
        for (double& v : s.upper_) v *= c;
        return s;
    }

    Matrix to_dense() const {
        Matrix a(dim_, dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) a(i, j) = (*this)(i, j);
        return a;
    }

    friend bool operator==(const SkewMatrix&, const SkewMatrix&) = default;

private:
    std::size_t index(std::size_t i, std::size_t j) const {
        // row-major strictly-upper packing
        return i * dim_ - i * (i + 1) / 2 + (j - i - 1);
    }

    std::size_t dim_;
    std::vector<double> upper_;
};

/// Result of exp_skew; QᵀQ = I up to rounding.
class OrthogonalMatrix {
public:
    explicit OrthogonalMatrix(Matrix q) : q_(std::move(q)) {}

    std::size_t dim() const noexcept { return q_.rows(); }
    const Matrix& matrix() const noexcept { return q_; }
    double operator()(std::size_t i, std::size_t j) const { return q_(i, j); }

private:
    Matrix q_;
};

struct EigenDecomposition {
    Vector values;  ///< ascending
    Matrix vectors; ///< column k is the unit eigenvector for values[k]

    Vector column(std::size_t k) const {
        Vector v(vectors.rows());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = vectors(i, k);
        return v;
    }
};

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t p = 0; p < a.rows(); ++p)
        for (std::size_t q = p + 1; q < a.cols(); ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
}

} // namespace detail

inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiRelTol = 1e-14;

/// Cyclic Jacobi eigendecomposition. Stops once the off-diagonal Frobenius
/// mass is at most 1e-14·‖H‖_F; throws EigenError after 100 sweeps.
inline EigenDecomposition eigh(const SymMatrix& h) {
    const std::size_t d = h.dim();
    Matrix a = h.to_dense();
    Matrix v = Matrix::identity(d);
    const double target = kJacobiRelTol * a.frobenius();

    double off = detail::off_diagonal_norm(a);
    int sweep = 0;
    while (off > target) {
        if (sweep == kJacobiMaxSweeps)
            throw EigenError("eigensolver failed: off-diagonal residual " + std::to_string(off) +
                                 " after " + std::to_string(kJacobiMaxSweeps) + " sweeps",
                             off);
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t r = 0; r < d; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = a(p, r) = c * arp - s * arq;
                    a(r, q) = a(q, r) = s * arp + c * arq;
                }
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;

                for (std::size_t r = 0; r < d; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
        ++sweep;
        off = detail::off_diagonal_norm(a);
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    EigenDecomposition out{Vector(d), Matrix(d, d)};
    for (std::size_t k = 0; k < d; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < d; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

inline bool is_psd(const SymMatrix& h, double tol) {
    return eigh(h).values.front() >= -tol;
}

/// Largest |λ|, i.e. the spectral norm of a symmetric matrix.
inline double spectral_norm(const SymMatrix& h) {
    const auto e = eigh(h);
    return std::max(std::abs(e.values.front()), std::abs(e.values.back()));
}

/// Largest singular value of a general matrix, via the eigenvalues of MᵀM.
inline double spectral_norm(const Matrix& m) {
    const Matrix gram = m.transpose() * m;
    const double lmax = eigh(SymMatrix::from_dense(gram, 1e-9 * std::max(1.0, gram.max_abs())))
                            .values.back();
    return std::sqrt(std::max(0.0, lmax));
}

/// Gaussian skew matrix rescaled so its largest singular value is exactly π.
inline SkewMatrix random_skew(std::size_t d, std::mt19937_64& rng) {
    if (d < 2) throw InputError("random_skew: dimension must be at least 2");
    std::normal_distribution<double> normal(0.0, 1.0);
    SkewMatrix s(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) s.set_upper(i, j, normal(rng));

    const double sigma = spectral_norm(s.to_dense());
    if (!(sigma > 0.0)) throw UndefinedError("random_skew: degenerate draw");
    return s.scaled(std::numbers::pi / sigma);
}

/// exp(θ·S) by scaling and squaring with a truncated Taylor series; the
/// scaled argument has Frobenius norm ≤ 0.5 before the series is summed.
inline OrthogonalMatrix exp_skew(const SkewMatrix& s, double theta) {
    if (!std::isfinite(theta)) throw InputError("exp_skew: theta must be finite");
    const std::size_t d = s.dim();
    Matrix a = s.to_dense();
    a *= theta;

    int squarings = 0;
    double norm = a.frobenius();
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    a *= std::ldexp(1.0, -squarings);

    Matrix result = Matrix::identity(d);
    Matrix term = Matrix::identity(d);
    for (int k = 1; k <= 30; ++k) {
        term = term * a;
        term *= 1.0 / k;
        result = result + term;
        if (term.max_abs() < 1e-20) break;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return OrthogonalMatrix(std::move(result));
}

/// Q(θ)·diag(eigs)·Q(θ)ᵀ, symmetrized. An isotropic spectrum returns c·I exactly.
inline SymMatrix rotated_hessian(std::span<const double> eigs, const SkewMatrix& s, double theta) {
    if (eigs.size() != s.dim()) throw InputError("rotated_hessian: spectrum size differs from skew dimension");
    for (double e : eigs)
        if (!std::isfinite(e) || e < 0.0)
            throw InputError("rotated_hessian: eigenvalues must be finite and non-negative");

    if (std::all_of(eigs.begin(), eigs.end(), [&](double e) { return e == eigs.front(); }))
        return SymMatrix::diagonal(eigs);

    const OrthogonalMatrix rotation = exp_skew(s, theta);
    const Matrix& q = rotation.matrix();
    const std::size_t d = eigs.size();
    Matrix scaled = q;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k) scaled(i, k) *= eigs[k];
    const Matrix h = scaled * q.transpose();
    return SymMatrix::from_dense(h, std::numeric_limits<double>::infinity());
}

} // namespace norm_descent
