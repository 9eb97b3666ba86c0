#pragma once

// Shift decompositions S = T + ξI of a frame operator and the bound
// formulas that follow from them.
//
// Conventions: all checks are done on representing matrices.  The
// ∀f-quantified inequality ‖αf − Tf‖ ≤ c‖Tf‖ is replaced by the single PSD
// test c²·MM* − (αI − M)(αI − M)* ⪰ 0 with M = mat(T); ⟨·,·⟩ of both sides
// is X·(·)·X* for X = rep(f), so the PSD test is the A-valued form of the
// inequality for every f at once.

#include <cmath>
#include <optional>
#include <string>

#include "frames.hpp"

namespace cstar_frames {

struct ShiftDecomposition {
    double xi = 0.0;
    ModuleOperator t;          // S − ξI
    ModuleOperator source_s;   // S

    ModuleOperator reconstruct() const { return t + ModuleOperator::scalar(t.shape(), xi); }
};

inline ShiftDecomposition shift_decompose(const ModuleOperator& s, double xi) {
    return {xi, s - ModuleOperator::scalar(s.shape(), xi), s};
}

inline ShiftDecomposition shift_decompose(const FrameSystem& frame, double xi) {
    return shift_decompose(frame.frame_operator(), xi);
}

/// One implication "premise ⇒ conclusion" evaluated on a concrete instance.
/// `slack` is the margin of the conclusion's inequality (≥ 0 when it holds).
struct ClaimCheck {
    bool premise = false;
    bool conclusion = false;
    double slack = 0.0;

    bool holds() const noexcept { return !premise || conclusion; }
};

struct ShiftClaimsReport {
    double xi = 0.0;
    double lower = 0.0;        // optimal A of the frame
    double upper = 0.0;        // optimal B
    double bessel_bound = 0.0; // ‖T‖ + |ξ|
    bool t_positive = false;
    ClaimCheck part1;  // T ⪰ 0, ξ > 0  ⇒  frame with lower bound ≥ ξ, upper ≤ ‖T‖+|ξ|
    ClaimCheck part2;  // always: T Hermitian and bounded
    ClaimCheck part3;  // lower bound A > 0 with ξ ≤ A  ⇒  T ⪰ 0

    bool all_hold() const noexcept { return part1.holds() && part2.holds() && part3.holds(); }
};

inline double shift_bessel_bound(const ShiftDecomposition& dec) {
    return operator_norm(dec.t) + std::abs(dec.xi);
}

inline ShiftClaimsReport check_shift_claims(const FrameSystem& frame, double xi, double tol = kDefaultTol) {
    const ShiftDecomposition dec = shift_decompose(frame, xi);
    const BoundsReport b = optimal_bounds(frame, tol);
    const SpectralResult t_spec = detail::symmetrized_eigen(dec.t.mat());

    ShiftClaimsReport r;
    r.xi = xi;
    r.lower = b.lower;
    r.upper = b.upper;
    r.bessel_bound = shift_bessel_bound(dec);
    r.t_positive = t_spec.min() >= -tol;

    r.part1.premise = r.t_positive && xi > 0.0;
    const double lower_margin = b.lower - (xi - tol);
    const double upper_margin = (r.bessel_bound + tol) - b.upper;
    r.part1.conclusion = lower_margin >= 0.0 && upper_margin >= 0.0 && b.lower > 0.0;
    r.part1.slack = std::min(lower_margin, upper_margin);

    const ComplexMatrix& m = dec.t.mat();
    const double asym = frobenius_distance(m, m.adjoint());
    r.part2.premise = true;
    r.part2.conclusion = asym <= 1e-10 * std::max(1.0, m.frobenius_norm()) && std::isfinite(operator_norm(m));
    r.part2.slack = 1e-10 * std::max(1.0, m.frobenius_norm()) - asym;

    r.part3.premise = b.lower > tol && xi <= b.lower;
    r.part3.conclusion = r.t_positive;
    r.part3.slack = t_spec.min() + tol;
    return r;
}

struct DeviationCertificate {
    double alpha = 0.0;
    double eta = 0.0;
    bool holds = false;
    double slack = 0.0;  // λ_min of the PSD witness
};

inline constexpr double kWitnessTol = 1e-9;

/// Verifies ‖αf − Tf‖ ≤ sqrt(η²/(1+η²))·‖Tf‖ for all f.
inline DeviationCertificate deviation_check(const ModuleOperator& t, double alpha, double eta) {
    if (!(eta >= 0.0)) throw Error(ErrorCode::NegativeEta, "eta = " + std::to_string(eta));
    const ComplexMatrix& m = t.mat();
    const double c_sq = eta * eta / (1.0 + eta * eta);
    const ComplexMatrix shifted = alpha * ComplexMatrix::identity(m.rows()) - m;
    const ComplexMatrix witness = c_sq * (m * m.adjoint()) - shifted * shifted.adjoint();
    const double slack = detail::symmetrized_eigen(witness).min();
    return {alpha, eta, slack >= -kWitnessTol, slack};
}

struct NormRatioPredicates {
    bool lhs = false;  // ‖f‖·‖g‖ ≤ √(1+η²)·‖⟨f,g⟩‖
    bool rhs = false;  // ‖αf − g‖ ≤ √(η²/(1+η²))·‖g‖
};

/// Both sides of the two-vector condition relating ‖⟨f,g⟩‖ to ‖αf − g‖.
/// They are evaluated independently; no equivalence is assumed.
inline NormRatioPredicates norm_ratio_predicates(const ModuleVector& f, const ModuleVector& g, double alpha, double eta,
                                      double tol = 1e-12) {
    require_same_shape(f.shape(), g.shape());
    const double nf = module_norm(f);
    const double ng = module_norm(g);
    const double fg = operator_norm(inner_product(f, g));
    const double diff = module_norm(f.scaled(alpha) - g);
    const double scale = std::max(1.0, nf * ng);
    return {nf * ng <= std::sqrt(1.0 + eta * eta) * fg + tol * scale,
            diff <= std::sqrt(eta * eta / (1.0 + eta * eta)) * ng + tol * std::max(1.0, ng)};
}

struct NormRatioAgreement {
    std::size_t samples = 0;
    std::size_t agree = 0;
    std::size_t lhs_only = 0;
    std::size_t rhs_only = 0;

    double rate() const { return samples == 0 ? 0.0 : double(agree) / double(samples); }
};

/// Agreement rate of the two predicates over random (f, g) and an (α, η) grid.
/// Half of the pairs use g = βf + small noise so both predicates get exercised.
inline NormRatioAgreement norm_ratio_agreement_probe(ModuleShape shape, const std::vector<double>& alphas,
                                          const std::vector<double>& etas, std::size_t pairs,
                                          std::uint64_t seed = kDefaultSeed) {
    Rng rng(seed);
    NormRatioAgreement out;
    for (std::size_t s = 0; s < pairs; ++s) {
        const ModuleVector f = ModuleVector::random(shape, rng);
        ModuleVector g = ModuleVector::random(shape, rng);
        if (s % 2 == 0) g = f.scaled(uniform(rng, 0.5, 2.0)) + g.scaled(uniform(rng, 0.0, 0.3));
        for (double a : alphas)
            for (double e : etas) {
                const auto p = norm_ratio_predicates(f, g, a, e);
                ++out.samples;
                if (p.lhs == p.rhs) ++out.agree;
                else if (p.lhs) ++out.lhs_only;
                else ++out.rhs_only;
            }
    }
    return out;
}

struct LowerBoundEstimate {
    double rho = 0.0;        // lower bound of ‖Tf‖/‖f‖ used in the formula
    double value = 0.0;      // L = ρ/√(1+η²) − |ξ|
    bool t_positive = false;
    bool formula_only = false;  // T has negative spectrum: L is not certified by the argument
};

/// L = ρ/√(1+η²) − |ξ| with ρ = σ_min(mat(T)) unless a smaller ρ is supplied.
inline LowerBoundEstimate shift_lower_bound(const ShiftDecomposition& dec, double eta,
                                            std::optional<double> rho = std::nullopt) {
    if (!(eta >= 0.0)) throw Error(ErrorCode::NegativeEta, "eta = " + std::to_string(eta));
    const double best = sigma_min(dec.t.mat());
    if (rho && (*rho < 0.0 || *rho > best + 1e-12))
        throw Error(ErrorCode::InvalidRho,
                    "rho = " + std::to_string(*rho) + " exceeds sigma_min = " + std::to_string(best));
    LowerBoundEstimate out;
    out.rho = rho.value_or(best);
    out.value = out.rho / std::sqrt(1.0 + eta * eta) - std::abs(dec.xi);
    out.t_positive = operator_positive(dec.t);
    out.formula_only = !out.t_positive;
    return out;
}

struct PerturbedBounds {
    bool applicable = false;  // μ < √L
    double lower_bound = 0.0; // L, the unperturbed lower estimate
    double low = 0.0;         // (√L − μ)²
    double high = 0.0;        // (μ + (‖T‖+|ξ|)^{1/2})²
    double low_alt = 0.0;     // (L − μ)², alternative reading of the lower estimate
};

/// Predicted frame bounds for any μ-perturbation of a frame with this decomposition.
inline PerturbedBounds perturbed_frame_bounds(const ShiftDecomposition& dec, double eta, double mu,
                                              std::optional<double> rho = std::nullopt) {
    if (!(mu >= 0.0)) throw Error(ErrorCode::NegativeMu, "mu = " + std::to_string(mu));
    const LowerBoundEstimate est = shift_lower_bound(dec, eta, rho);
    PerturbedBounds out;
    out.lower_bound = est.value;
    out.high = std::pow(mu + std::sqrt(shift_bessel_bound(dec)), 2);
    if (est.value > 0.0 && mu < std::sqrt(est.value)) {
        out.applicable = true;
        out.low = std::pow(std::sqrt(est.value) - mu, 2);
        out.low_alt = std::pow(std::max(est.value - mu, 0.0), 2);
    }
    return out;
}

struct DualDecomposition {
    double xi_inverse = 0.0;
    ModuleOperator t;              // S⁻¹ − ξ⁻¹I
    ModuleOperator s_inverse;
    double inverse_residual = 0.0; // ‖(T + ξ⁻¹I)·S − I‖_F
    double ts_residual = 0.0;      // ‖T·S + ξ⁻¹K‖_F
    double t_residual = 0.0;       // ‖S⁻¹ − ξ⁻¹I − T‖_F
};

/// For S = K + ξI, the decomposition S⁻¹ = T + ξ⁻¹I with T·S = −ξ⁻¹K,
/// i.e. mat(T) = −ξ⁻¹·mat(K)·mat(S)⁻¹.
inline DualDecomposition dual_decomposition(double xi, const ModuleOperator& k, const ModuleOperator& s,
                                            double tol = kDefaultTol) {
    if (xi == 0.0) throw Error(ErrorCode::XiZero, "xi must be nonzero");
    require_same_shape(k.shape(), s.shape());
    const ModuleShape shape = s.shape();
    const double consistency = frobenius_distance(k.mat() + xi * ComplexMatrix::identity(shape.width()), s.mat());
    if (consistency > 1e-10 * std::max(1.0, s.mat().frobenius_norm()))
        throw Error(ErrorCode::InconsistentDecomposition,
                    "‖K + ξI − S‖_F = " + std::to_string(consistency));

    ComplexMatrix s_inv;
    try {
        s_inv = hermitian_inverse(s.mat(), tol);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Singular) throw Error(ErrorCode::SingularS, e.what());
        throw;
    }
    const double xi_inv = 1.0 / xi;
    const ComplexMatrix eye = ComplexMatrix::identity(shape.width());

    DualDecomposition out{xi_inv, ModuleOperator(shape, (-xi_inv) * (k.mat() * s_inv)),
                          ModuleOperator(shape, s_inv)};
    const ModuleOperator shifted = out.t + ModuleOperator::scalar(shape, xi_inv);
    out.inverse_residual = frobenius_distance(compose(shifted, s).mat(), eye);
    out.ts_residual = frobenius_distance(compose(out.t, s).mat(), (-xi_inv) * k.mat());
    out.t_residual = frobenius_distance(s_inv - xi_inv * eye, out.t.mat());
    return out;
}

} // namespace cstar_frames
