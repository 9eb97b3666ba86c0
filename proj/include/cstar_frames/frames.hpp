#pragma once

// Finite frames in Aⁿ: synthesis/analysis, the frame operator
// S = Σ_k rep(f_k)*·rep(f_k), optimal frame bounds, perturbation distance
// and canonical duals.

#include <cstddef>
#include <vector>

#include "module_space.hpp"

namespace cstar_frames {

class FrameSystem {
public:
    /// Rejects an empty family and mixed shapes.  Zero and repeated vectors are fine.
    explicit FrameSystem(std::vector<ModuleVector> vectors) : vectors_(std::move(vectors)) {
        if (vectors_.empty()) throw Error(ErrorCode::LengthMismatch, "a frame needs at least one vector");
        shape_ = vectors_.front().shape();
        ComplexMatrix s(shape_.width(), shape_.width());
        for (std::size_t k = 0; k < vectors_.size(); ++k) {
            require_same_shape(shape_, vectors_[k].shape());
            const ComplexMatrix& r = vectors_[k].rep();
            s += r.adjoint() * r;
        }
        frame_op_.emplace(shape_, std::move(s));
    }

    const ModuleShape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return vectors_.size(); }
    const std::vector<ModuleVector>& vectors() const noexcept { return vectors_; }
    const ModuleVector& operator[](std::size_t k) const { return vectors_[k]; }
    const ModuleOperator& frame_operator() const noexcept { return *frame_op_; }

    /// The (N·d)×(n·d) matrix stacking rep(f_1), …, rep(f_N) vertically.
    ComplexMatrix stacked() const {
        const std::size_t d = shape_.d;
        ComplexMatrix out(vectors_.size() * d, shape_.width());
        for (std::size_t k = 0; k < vectors_.size(); ++k) out.set_block(k * d, 0, vectors_[k].rep());
        return out;
    }

private:
    ModuleShape shape_;
    std::vector<ModuleVector> vectors_;
    std::optional<ModuleOperator> frame_op_;
};

inline const ModuleOperator& frame_operator(const FrameSystem& frame) { return frame.frame_operator(); }

/// {⟨f, f_k⟩}_k.
inline std::vector<ComplexMatrix> analysis(const FrameSystem& frame, const ModuleVector& f) {
    require_same_shape(frame.shape(), f.shape());
    std::vector<ComplexMatrix> coeffs;
    coeffs.reserve(frame.size());
    for (const auto& fk : frame.vectors()) coeffs.push_back(inner_product(f, fk));
    return coeffs;
}

/// Σ_k c_k·f_k with the left A-action.
inline ModuleVector synthesis(const FrameSystem& frame, const std::vector<ComplexMatrix>& coeffs) {
    if (coeffs.size() != frame.size())
        throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(frame.size()) +
                                                   " coefficients, got " + std::to_string(coeffs.size()));
    ModuleVector out(frame.shape());
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k].rows() != frame.shape().d || coeffs[k].cols() != frame.shape().d)
            throw Error(ErrorCode::ShapeMismatch, "coefficient " + std::to_string(k) + " is " +
                                                      coeffs[k].dims());
        out = out + frame[k].left_mul(coeffs[k]);
    }
    return out;
}

struct BoundsReport {
    double lower = 0.0;   // optimal A
    double upper = 0.0;   // optimal B
    bool is_frame = false;
    bool is_bessel = true;
    bool tight = false;   // A = B within tol
};

/// Optimal constants of A⟨f,f⟩ ≤ Σ⟨f,f_k⟩⟨f_k,f⟩ ≤ B⟨f,f⟩: the extreme
/// eigenvalues of mat(S), the lower one clamped at zero.
inline BoundsReport optimal_bounds(const FrameSystem& frame, double tol = kDefaultTol) {
    const SpectralResult spec = hermitian_eigen(frame.frame_operator().mat());
    BoundsReport r;
    r.lower = std::max(spec.min(), 0.0);
    r.upper = std::max(spec.max(), 0.0);
    r.is_frame = r.lower > tol;
    r.is_bessel = std::isfinite(r.upper);
    r.tight = r.is_frame && (r.upper - r.lower) <= tol * std::max(1.0, r.upper);
    return r;
}

/// ‖T_F − T_G‖: the largest singular value of the stacked difference,
/// via λ_max of the smaller Gram matrix.
inline double perturbation_distance(const FrameSystem& f, const FrameSystem& g) {
    require_same_shape(f.shape(), g.shape());
    if (f.size() != g.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(f.size()) + " vs " + std::to_string(g.size()) +
                                                   " vectors");
    return operator_norm(f.stacked() - g.stacked());
}

/// Canonical dual {S⁻¹ f_k}.
inline FrameSystem dual_frame(const FrameSystem& frame, double tol = kDefaultTol) {
    const BoundsReport bounds = optimal_bounds(frame, tol);
    if (!bounds.is_frame)
        throw Error(ErrorCode::NotAFrame, "optimal lower bound " + std::to_string(bounds.lower) +
                                              " <= tol");
    const ComplexMatrix s_inv = hermitian_inverse(frame.frame_operator().mat(), tol);
    std::vector<ModuleVector> duals;
    duals.reserve(frame.size());
    for (const auto& fk : frame.vectors()) duals.emplace_back(fk.shape(), fk.rep() * s_inv);
    return FrameSystem(std::move(duals));
}

/// Σ_k ⟨f, g_k⟩ f_k: reconstruction of f from a dual pair (f_k, g_k).
inline ModuleVector reconstruct(const FrameSystem& frame, const FrameSystem& dual, const ModuleVector& f) {
    return synthesis(frame, analysis(dual, f));
}

/// A frame of n vectors whose frame operator is the given PSD matrix:
/// the d-row blocks of S^{1/2}.
inline FrameSystem frame_from_operator(const ModuleOperator& s, double tol = kDefaultTol) {
    const ModuleShape shape = s.shape();
    const ComplexMatrix root = psd_sqrt(s.mat(), tol);
    std::vector<ModuleVector> vectors;
    vectors.reserve(shape.n);
    for (std::size_t k = 0; k < shape.n; ++k)
        vectors.emplace_back(shape, root.block(k * shape.d, 0, shape.d, shape.width()));
    return FrameSystem(std::move(vectors));
}

} // namespace cstar_frames
