#pragma once

// The Hilbert C*-module H = Aⁿ over A = M_d(ℂ).
//
// A vector f = (f_1, …, f_n) is stored as the d×(n·d) row block
// [f_1 | f_2 | … | f_n].  With the left A-action a·f = [a·f_1 | … | a·f_n]
// the inner product is ⟨f, g⟩ = rep(f)·rep(g)*, which is A-linear in the
// first slot.  A-linear maps commute with the left action, so every
// adjointable operator acts by RIGHT multiplication by an (n·d)×(n·d)
// matrix, and its adjoint is the conjugate transpose of that matrix.
//
// Positivity of an operator T is decided on mat(T): ⟨Tf, f⟩ = X·M·X* with
// X = rep(f), and X·M·X* ⪰ 0 for every d×(n·d) matrix X iff M ⪰ 0 (take X
// with a single nonzero row for necessity; factor M = R*R for sufficiency).

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "random.hpp"

namespace cstar_frames {

struct ModuleShape {
    std::size_t d = 1;  // A = M_d(ℂ)
    std::size_t n = 1;  // H = Aⁿ

    ModuleShape() = default;
    ModuleShape(std::size_t d_, std::size_t n_) : d(d_), n(n_) {
        if (d == 0 || n == 0) throw Error(ErrorCode::InvalidArgument, "module shape needs d, n >= 1");
    }

    std::size_t width() const noexcept { return n * d; }
    std::string str() const { return "d=" + std::to_string(d) + ",n=" + std::to_string(n); }

    friend bool operator==(const ModuleShape&, const ModuleShape&) = default;
};

inline void require_same_shape(const ModuleShape& a, const ModuleShape& b) {
    if (a != b) throw Error(ErrorCode::ShapeMismatch, a.str() + " vs " + b.str());
}

class ModuleVector {
public:
    explicit ModuleVector(ModuleShape shape)
        : shape_(shape), rep_(shape.d, shape.width()) {}

    ModuleVector(ModuleShape shape, ComplexMatrix rep) : shape_(shape), rep_(std::move(rep)) {
        if (rep_.rows() != shape_.d || rep_.cols() != shape_.width())
            throw Error(ErrorCode::ShapeMismatch,
                        "representation " + rep_.dims() + " does not match " + shape_.str());
    }

    /// Assemble from n blocks, each d×d.
    static ModuleVector from_blocks(ModuleShape shape, const std::vector<ComplexMatrix>& blocks) {
        if (blocks.size() != shape.n)
            throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(shape.n) + " blocks");
        ComplexMatrix rep(shape.d, shape.width());
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (blocks[i].rows() != shape.d || blocks[i].cols() != shape.d)
                throw Error(ErrorCode::ShapeMismatch, "block " + std::to_string(i) + " is " +
                                                          blocks[i].dims());
            rep.set_block(0, i * shape.d, blocks[i]);
        }
        return {shape, std::move(rep)};
    }

    static ModuleVector random(ModuleShape shape, Rng& rng) {
        return {shape, random_matrix(shape.d, shape.width(), rng)};
    }

    const ModuleShape& shape() const noexcept { return shape_; }
    const ComplexMatrix& rep() const noexcept { return rep_; }

    ComplexMatrix block(std::size_t i) const { return rep_.block(0, i * shape_.d, shape_.d, shape_.d); }

    /// Left A-action a·f.
    ModuleVector left_mul(const ComplexMatrix& a) const { return {shape_, a * rep_}; }

    ModuleVector scaled(Complex s) const { return {shape_, rep_ * s}; }

    friend ModuleVector operator+(const ModuleVector& f, const ModuleVector& g) {
        require_same_shape(f.shape_, g.shape_);
        return {f.shape_, f.rep_ + g.rep_};
    }
    friend ModuleVector operator-(const ModuleVector& f, const ModuleVector& g) {
        require_same_shape(f.shape_, g.shape_);
        return {f.shape_, f.rep_ - g.rep_};
    }

    friend bool operator==(const ModuleVector&, const ModuleVector&) = default;

private:
    ModuleShape shape_;
    ComplexMatrix rep_;
};

class ModuleOperator {
public:
    explicit ModuleOperator(ModuleShape shape) : shape_(shape), mat_(shape.width(), shape.width()) {}

    ModuleOperator(ModuleShape shape, ComplexMatrix mat) : shape_(shape), mat_(std::move(mat)) {
        if (mat_.rows() != shape_.width() || mat_.cols() != shape_.width())
            throw Error(ErrorCode::ShapeMismatch,
                        "operator matrix " + mat_.dims() + " does not match " + shape_.str());
    }

    static ModuleOperator identity(ModuleShape shape) {
        return {shape, ComplexMatrix::identity(shape.width())};
    }

    static ModuleOperator scalar(ModuleShape shape, double xi) {
        return {shape, ComplexMatrix::identity(shape.width()) * Complex(xi)};
    }

    const ModuleShape& shape() const noexcept { return shape_; }
    const ComplexMatrix& mat() const noexcept { return mat_; }

    friend ModuleOperator operator+(const ModuleOperator& a, const ModuleOperator& b) {
        require_same_shape(a.shape_, b.shape_);
        return {a.shape_, a.mat_ + b.mat_};
    }
    friend ModuleOperator operator-(const ModuleOperator& a, const ModuleOperator& b) {
        require_same_shape(a.shape_, b.shape_);
        return {a.shape_, a.mat_ - b.mat_};
    }
    friend ModuleOperator operator*(double s, const ModuleOperator& a) {
        return {a.shape_, s * a.mat_};
    }

private:
    ModuleShape shape_;
    ComplexMatrix mat_;
};

/// ⟨f, g⟩ = rep(f)·rep(g)*, a d×d algebra element.
inline ComplexMatrix inner_product(const ModuleVector& f, const ModuleVector& g) {
    require_same_shape(f.shape(), g.shape());
    return f.rep() * g.rep().adjoint();
}

/// ‖f‖ = ‖⟨f, f⟩‖^{1/2} = σ_max(rep(f)).
inline double module_norm(const ModuleVector& f) { return operator_norm(f.rep()); }

/// e_i carries 1_A in block i; ⟨e_i, e_j⟩ = δ_ij·1_A.
inline std::vector<ModuleVector> standard_basis(ModuleShape shape) {
    std::vector<ModuleVector> basis;
    basis.reserve(shape.n);
    for (std::size_t i = 0; i < shape.n; ++i) {
        ComplexMatrix rep(shape.d, shape.width());
        for (std::size_t r = 0; r < shape.d; ++r) rep(r, i * shape.d + r) = 1.0;
        basis.emplace_back(shape, std::move(rep));
    }
    return basis;
}

inline ModuleVector apply(const ModuleOperator& t, const ModuleVector& f) {
    require_same_shape(t.shape(), f.shape());
    return {f.shape(), f.rep() * t.mat()};
}

inline ModuleOperator adjoint(const ModuleOperator& t) { return {t.shape(), t.mat().adjoint()}; }

/// The operator "apply `second` after `first`": its matrix is mat(first)·mat(second).
inline ModuleOperator compose(const ModuleOperator& second, const ModuleOperator& first) {
    require_same_shape(second.shape(), first.shape());
    return {first.shape(), first.mat() * second.mat()};
}

inline bool operator_positive(const ModuleOperator& t, double tol = kDefaultTol) {
    return psd_check(t.mat(), tol);
}

inline double operator_norm(const ModuleOperator& t) { return operator_norm(t.mat()); }

/// Worst sample found by a sampling probe, with the vector that produced it.
struct ProbeResult {
    double worst = 0.0;
    std::optional<ModuleVector> witness;
    std::size_t samples = 0;
};

/// max over random x of λ_max(⟨Tx,Tx⟩ − ‖T‖²⟨x,x⟩); the inequality
/// ⟨Tx,Tx⟩ ≤ ‖T‖²⟨x,x⟩ in A says this is ≤ 0.
inline ProbeResult cauchy_schwarz_probe(const ModuleOperator& t, std::size_t sample_count,
                                        std::uint64_t seed = kDefaultSeed) {
    if (sample_count == 0) throw Error(ErrorCode::InvalidArgument, "sampleCount must be >= 1");
    Rng rng(seed);
    const double norm_sq = std::pow(operator_norm(t), 2);
    ProbeResult result{-std::numeric_limits<double>::infinity(), std::nullopt, sample_count};
    for (std::size_t s = 0; s < sample_count; ++s) {
        const ModuleVector x = ModuleVector::random(t.shape(), rng);
        const ModuleVector tx = apply(t, x);
        const ComplexMatrix gap = inner_product(tx, tx) - norm_sq * inner_product(x, x);
        const double v = detail::symmetrized_eigen(gap).max();
        if (v > result.worst) {
            result.worst = v;
            result.witness = x;
        }
    }
    return result;
}

/// max over random f of λ_max(−⟨Tf, f⟩): ≤ tol when T is positive as a
/// module operator.  Sampling counterpart of operator_positive.
inline ProbeResult module_positivity_probe(const ModuleOperator& t, std::size_t sample_count,
                                           std::uint64_t seed = kDefaultSeed) {
    if (sample_count == 0) throw Error(ErrorCode::InvalidArgument, "sampleCount must be >= 1");
    Rng rng(seed);
    ProbeResult result{-std::numeric_limits<double>::infinity(), std::nullopt, sample_count};
    for (std::size_t s = 0; s < sample_count; ++s) {
        const ModuleVector f = ModuleVector::random(t.shape(), rng);
        const double v = detail::symmetrized_eigen(-inner_product(apply(t, f), f)).max();
        if (v > result.worst) {
            result.worst = v;
            result.witness = f;
        }
    }
    return result;
}

} // namespace cstar_frames
