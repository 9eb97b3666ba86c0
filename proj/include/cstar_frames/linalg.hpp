#pragma once

// Dense complex matrices and Hermitian spectral computation.
//
// Everything above this layer (module inner products, frame operators,
// weaving operators) reduces to products, adjoints and a Hermitian
// eigensolve on ComplexMatrix.  The eigensolver is cyclic Jacobi: it is
// unconditionally convergent for Hermitian input and the matrices here are
// small (n·d up to a few hundred).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace cstar_frames {

using Complex = std::complex<double>;

/// Default absolute tolerance on eigenvalues for positivity decisions.
inline constexpr double kDefaultTol = 1e-9;

/// Relative tolerance on ‖M − M*‖_F accepted as "Hermitian".
inline constexpr double kHermitianTol = 1e-9;

class ComplexMatrix {
public:
    ComplexMatrix() : ComplexMatrix(1, 1) {}

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {
        if (rows == 0 || cols == 0)
            throw Error(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
    }

    /// Row-major entries; every entry must be finite.
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (rows == 0 || cols == 0)
            throw Error(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
        if (data_.size() != rows * cols)
            throw Error(ErrorCode::LengthMismatch, "entry count " + std::to_string(data_.size()) +
                                                       " != " + std::to_string(rows * cols));
        for (const auto& z : data_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw Error(ErrorCode::NonFinite, "matrix entries must be finite");
    }

    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        if (rows_ == 0 || cols_ == 0)
            throw Error(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                throw Error(ErrorCode::LengthMismatch, "ragged initializer list");
            data_.insert(data_.end(), r.begin(), r.end());
        }
        for (const auto& z : data_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw Error(ErrorCode::NonFinite, "matrix entries must be finite");
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

    static ComplexMatrix diagonal(const std::vector<double>& d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<Complex>& entries() const noexcept { return data_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : data_) s += std::norm(z);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : data_) m = std::max(m, std::abs(z));
        return m;
    }

    Complex trace() const {
        Complex t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
            return std::isfinite(z.real()) && std::isfinite(z.imag());
        });
    }

    ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_)
            throw Error(ErrorCode::ShapeMismatch, "block out of range");
        ComplexMatrix out(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
        return out;
    }

    void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b) {
        if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
            throw Error(ErrorCode::ShapeMismatch, "block out of range");
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_dims(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_dims(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }

    ComplexMatrix& operator*=(Complex s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(double s, ComplexMatrix a) { return a *= Complex(s); }
    friend ComplexMatrix operator-(ComplexMatrix a) { return a *= Complex(-1.0); }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_)
            throw Error(ErrorCode::ShapeMismatch,
                        "cannot multiply " + a.dims() + " by " + b.dims());
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex(0.0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

    std::string dims() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

private:
    void require_same_dims(const ComplexMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw Error(ErrorCode::ShapeMismatch, dims() + " vs " + o.dims());
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// ‖A − B‖_F; dimensions must agree.
inline double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).frobenius_norm();
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
    return 0.5 * (m + m.adjoint());
}

inline bool is_hermitian(const ComplexMatrix& m, double rel_tol = kHermitianTol) {
    return m.is_square() &&
           frobenius_distance(m, m.adjoint()) <= rel_tol * std::max(1.0, m.frobenius_norm());
}

struct SpectralResult {
    std::vector<double> eigenvalues;   // ascending
    ComplexMatrix eigenvectors;        // columns, unitary

    double min() const { return eigenvalues.front(); }
    double max() const { return eigenvalues.back(); }
};

namespace detail {

inline double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

// Cyclic complex Jacobi on an exactly Hermitian matrix.
inline SpectralResult jacobi_eigen(ComplexMatrix a, int max_sweeps = 100) {
    const std::size_t n = a.rows();
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = a.frobenius_norm();
    const double threshold = 1e-13 * scale;

    bool converged = off_diagonal_norm(a) <= threshold;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const Complex phase = apq / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // J = [[c, s·φ], [−s·φ̄, c]] on the (p, q) plane; A ← J* A J.
                const Complex jpq = s * phase;
                const Complex jqp = -s * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {  // columns: A ← A J
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * c + akq * jqp;
                    a(k, q) = akp * jpq + akq * c;
                }
                for (std::size_t k = 0; k < n; ++k) {  // rows: A ← J* A
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = c * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * c + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * c;
                }
            }
        }
        converged = off_diagonal_norm(a) <= threshold;
    }
    if (!converged)
        throw Error(ErrorCode::NoConvergence,
                    "Jacobi did not converge in " + std::to_string(max_sweeps) + " sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() < a(j, j).real();
    });

    SpectralResult out{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t c = 0; c < n; ++c) {
        out.eigenvalues[c] = a(order[c], order[c]).real();
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, c) = v(r, order[c]);
    }
    return out;
}

inline void require_square(const ComplexMatrix& m, const char* what) {
    if (!m.is_square())
        throw Error(ErrorCode::NotSquare, std::string(what) + ": got " + m.dims());
}

// Eigenvalues of (M + M*)/2 without the symmetry check.
inline SpectralResult symmetrized_eigen(const ComplexMatrix& m) {
    return jacobi_eigen(hermitian_part(m));
}

} // namespace detail

/// Full spectrum of a Hermitian matrix.  The input is symmetrized before
/// iterating; asymmetry beyond 1e-9 relative is reported, not repaired.
inline SpectralResult hermitian_eigen(const ComplexMatrix& m) {
    detail::require_square(m, "hermitian_eigen");
    const double asym = frobenius_distance(m, m.adjoint());
    if (asym > kHermitianTol * std::max(1.0, m.frobenius_norm()))
        throw Error(ErrorCode::NotHermitian,
                    "‖M − M*‖_F = " + std::to_string(asym) + " exceeds tolerance");
    return detail::symmetrized_eigen(m);
}

/// λ_min((M+M*)/2) ≥ −tol.
inline bool psd_check(const ComplexMatrix& m, double tol = kDefaultTol) {
    detail::require_square(m, "psd_check");
    return detail::symmetrized_eigen(m).min() >= -tol;
}

/// Largest singular value.  Uses the smaller of the two Gram matrices.
inline double operator_norm(const ComplexMatrix& m) {
    const ComplexMatrix gram = m.rows() < m.cols() ? m * m.adjoint() : m.adjoint() * m;
    return std::sqrt(std::max(0.0, detail::jacobi_eigen(hermitian_part(gram)).max()));
}

/// sqrt(λ_min(M*·M)), clamped at zero.
inline double sigma_min(const ComplexMatrix& m) {
    const ComplexMatrix gram = m.adjoint() * m;
    return std::sqrt(std::max(0.0, detail::jacobi_eigen(hermitian_part(gram)).min()));
}

/// Apply a real function to the spectrum: V·diag(fn(λ))·V*.
template <typename Fn>
ComplexMatrix spectral_map(const SpectralResult& spec, Fn&& fn) {
    const std::size_t n = spec.eigenvalues.size();
    const ComplexMatrix& v = spec.eigenvectors;
    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = fn(spec.eigenvalues[k]);
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex vik = v(i, k) * w;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(v(j, k));
        }
    }
    return out;
}

inline ComplexMatrix hermitian_inverse(const ComplexMatrix& m, double tol = kDefaultTol) {
    const SpectralResult spec = hermitian_eigen(m);
    if (spec.min() <= tol)
        throw Error(ErrorCode::Singular,
                    "λ_min = " + std::to_string(spec.min()) + " <= tol " + std::to_string(tol));
    return spectral_map(spec, [](double l) { return 1.0 / l; });
}

/// Positive square root of a PSD matrix; eigenvalues in [−tol, 0) are clamped.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m, double tol = kDefaultTol) {
    const SpectralResult spec = hermitian_eigen(m);
    if (spec.min() < -tol)
        throw Error(ErrorCode::NotPSD, "λ_min = " + std::to_string(spec.min()));
    return spectral_map(spec, [](double l) { return std::sqrt(std::max(0.0, l)); });
}

} // namespace cstar_frames
