#pragma once

// Concrete compact-tight frames.
//
// A finite truncation cannot tell a compact operator from a bounded one, so
// compactness is carried as metadata: a ScalarProfile k ↦ l_k with a declared
// limit.  A certificate says "S = K + ξI where K is diagonal in a permuted
// standard basis with eigenvalues l_k − ξ", and K is compact exactly when the
// profile's limit equals ξ.

#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "frames.hpp"

namespace cstar_frames {

enum class ProfileKind { Constant, Gaussian, Geometric, Power };

inline std::string to_string(ProfileKind kind) {
    switch (kind) {
    case ProfileKind::Constant: return "constant";
    case ProfileKind::Gaussian: return "gaussian";
    case ProfileKind::Geometric: return "geometric";
    case ProfileKind::Power: return "power";
    }
    return "unknown";
}

inline ProfileKind parse_profile_kind(const std::string& s) {
    if (s == "constant") return ProfileKind::Constant;
    if (s == "gaussian") return ProfileKind::Gaussian;
    if (s == "geometric") return ProfileKind::Geometric;
    if (s == "power") return ProfileKind::Power;
    throw Error(ErrorCode::InvalidProfile, "unknown profile kind '" + s + "'");
}

/// Closed-form real sequence l_k (k ≥ 1) converging to `xi`:
///   constant  ξ
///   gaussian  ξ + c·exp(−k²/2)
///   geometric ξ + c·rᵏ
///   power     ξ + c·k^(−p)
/// With `reciprocal` set the sequence is 1/l_k instead (limit 1/ξ); this is
/// how the spectrum of a canonical dual is described.
struct ScalarProfile {
    ProfileKind kind = ProfileKind::Constant;
    double xi = 0.0;
    double c = 0.0;
    double r = 0.5;
    double p = 1.0;
    bool reciprocal = false;

    static ScalarProfile constant(double xi) { return make(ProfileKind::Constant, xi, 0.0); }
    static ScalarProfile gaussian(double xi, double c) { return make(ProfileKind::Gaussian, xi, c); }
    static ScalarProfile geometric(double xi, double c, double r) {
        return make(ProfileKind::Geometric, xi, c, r);
    }
    static ScalarProfile power(double xi, double c, double p) {
        return make(ProfileKind::Power, xi, c, 0.5, p);
    }

    static ScalarProfile make(ProfileKind kind, double xi, double c, double r = 0.5, double p = 1.0,
                              bool reciprocal = false) {
        ScalarProfile out{kind, xi, c, r, p, reciprocal};
        out.validate();
        return out;
    }

    void validate() const {
        if (!std::isfinite(xi) || !std::isfinite(c) || c < 0.0)
            throw Error(ErrorCode::InvalidProfile, "need finite xi and c >= 0");
        if (kind == ProfileKind::Geometric && !(r > 0.0 && r < 1.0))
            throw Error(ErrorCode::InvalidProfile, "geometric ratio must lie in (0, 1)");
        if (kind == ProfileKind::Power && !(p > 0.0 && std::isfinite(p)))
            throw Error(ErrorCode::InvalidProfile, "power exponent must be positive");
        if (reciprocal && !(xi > 0.0))
            throw Error(ErrorCode::InvalidProfile, "reciprocal profile needs xi > 0");
    }

    /// l_k − ξ for the underlying (non-reciprocal) sequence.
    double excess(std::size_t k) const {
        const double kk = static_cast<double>(k);
        switch (kind) {
        case ProfileKind::Constant: return 0.0;
        case ProfileKind::Gaussian: return c * std::exp(-0.5 * kk * kk);
        case ProfileKind::Geometric: return c * std::pow(r, kk);
        case ProfileKind::Power: return c * std::pow(kk, -p);
        }
        return 0.0;
    }

    /// l_k for k = 1, 2, …
    double eval(std::size_t k) const {
        if (k == 0) throw Error(ErrorCode::IndexOutOfRange, "profiles are indexed from k = 1");
        const double base = xi + excess(k);
        return reciprocal ? 1.0 / base : base;
    }

    double limit() const { return reciprocal ? 1.0 / xi : xi; }

    /// sup over all k ≥ 1; every built-in sequence is monotone, so it is l_1 or the limit.
    double supremum() const { return std::max(eval(1), limit()); }
    double infimum() const { return std::min(eval(1), limit()); }

    ScalarProfile reciprocal_profile() const {
        ScalarProfile out = *this;
        out.reciprocal = !reciprocal;
        out.validate();
        return out;
    }

    ScalarProfile shifted(double new_xi) const {
        if (reciprocal) throw Error(ErrorCode::InvalidProfile, "cannot shift a reciprocal profile");
        return make(kind, new_xi, c, r, p);
    }

    friend bool operator==(const ScalarProfile&, const ScalarProfile&) = default;
};

/// S = K + ξI with K diagonal in the standard basis permuted by `permutation`:
/// K = Σ_k kappa_k·⟨·, e_{permutation[k]}⟩ e_{permutation[k]}.
struct CompactTightCert {
    double xi = 0.0;
    std::optional<ScalarProfile> profile;   // eigenvalues of S along the permuted basis
    std::vector<std::size_t> permutation;   // 0-based basis indices
    ModuleOperator k;

    /// Declared limit of S's spectrum.  A finite-rank K (no profile) has limit 0.
    double declared_limit() const { return profile ? profile->limit() : xi; }

    /// Limit of K's eigenvalue profile; zero iff K is compact.
    double k_limit() const { return declared_limit() - xi; }
};

/// Σ_k κ_k·⟨·, e_{idx[k]}⟩ e_{idx[k]}.
inline ModuleOperator diagonal_operator(ModuleShape shape, const std::vector<std::size_t>& indices,
                                        const std::vector<double>& kappas) {
    if (indices.size() != kappas.size())
        throw Error(ErrorCode::LengthMismatch, "indices and eigenvalues differ in length");
    ComplexMatrix m(shape.width(), shape.width());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] >= shape.n)
            throw Error(ErrorCode::IndexOutOfRange, "basis index " + std::to_string(indices[k]));
        for (std::size_t r = 0; r < shape.d; ++r) {
            const std::size_t i = indices[k] * shape.d + r;
            m(i, i) += kappas[k];
        }
    }
    return {shape, std::move(m)};
}

/// ‖mat(S) − mat(K) − ξI‖_F.
inline double certificate_residual(const CompactTightCert& cert, const ModuleOperator& s) {
    require_same_shape(cert.k.shape(), s.shape());
    const ComplexMatrix expect = cert.k.mat() + cert.xi * ComplexMatrix::identity(s.shape().width());
    return frobenius_distance(s.mat(), expect);
}

struct ScaledBasisFrame {
    FrameSystem frame;
    std::optional<CompactTightCert> cert;  // present when N = n
};

/// {√l_k · e_k}_{k=1..N}.  For N = n this is a frame of the whole module with
/// S = K + ξI, K = Σ (l_k − ξ)⟨·, e_k⟩e_k; for N < n it spans only the first
/// N directions and carries no certificate.
inline ScaledBasisFrame scaled_basis_frame(const ScalarProfile& profile, ModuleShape shape, std::size_t count) {
    if (count == 0 || count > shape.n)
        throw Error(ErrorCode::TruncationTooLarge,
                    "N = " + std::to_string(count) + " must lie in 1.." + std::to_string(shape.n));
    if (!(profile.limit() > 0.0)) throw Error(ErrorCode::NonPositiveXi, "profile limit must be positive");
    if (profile.kind != ProfileKind::Constant && !(profile.c > 0.0))
        throw Error(ErrorCode::InvalidProfile, "non-constant profile needs c > 0");

    const auto basis = standard_basis(shape);
    std::vector<ModuleVector> vectors;
    std::vector<std::size_t> perm;
    std::vector<double> kappas;
    for (std::size_t k = 1; k <= count; ++k) {
        const double l = profile.eval(k);
        vectors.push_back(basis[k - 1].scaled(std::sqrt(l)));
        perm.push_back(k - 1);
        kappas.push_back(l - profile.limit());
    }
    ScaledBasisFrame out{FrameSystem(std::move(vectors)), std::nullopt};
    if (count == shape.n)
        out.cert = CompactTightCert{profile.limit(), profile, perm, diagonal_operator(shape, perm, kappas)};
    return out;
}

/// Σ_k α_k⟨·, e_k⟩e_k for the standard basis.
inline ModuleOperator eigenprofile_operator(const std::vector<double>& alphas, ModuleShape shape) {
    if (alphas.size() != shape.n)
        throw Error(ErrorCode::LengthMismatch,
                    "need " + std::to_string(shape.n) + " eigenvalues, got " + std::to_string(alphas.size()));
    std::vector<std::size_t> idx(shape.n);
    std::iota(idx.begin(), idx.end(), 0);
    return diagonal_operator(shape, idx, alphas);
}

struct RepetitionFrame {
    FrameSystem frame;
    CompactTightCert cert;  // ξ = 1, finite-rank K
};

/// The standard basis with e_i listed multiplicity[i] times (0-based keys;
/// unlisted indices appear once).  S = I + Σ (θ_i − 1)⟨·, e_i⟩e_i.
inline RepetitionFrame repetition_frame(ModuleShape shape, const std::map<std::size_t, std::size_t>& multiplicities) {
    for (const auto& [idx, count] : multiplicities) {
        if (idx >= shape.n)
            throw Error(ErrorCode::IndexOutOfRange,
                        "index " + std::to_string(idx) + " outside 0.." + std::to_string(shape.n - 1));
        if (count == 0) throw Error(ErrorCode::ZeroMultiplicity, "index " + std::to_string(idx));
    }
    const auto basis = standard_basis(shape);
    std::vector<ModuleVector> vectors(basis.begin(), basis.end());
    std::vector<std::size_t> perm(shape.n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> kappas(shape.n, 0.0);
    for (const auto& [idx, count] : multiplicities) {
        for (std::size_t extra = 1; extra < count; ++extra) vectors.push_back(basis[idx]);
        kappas[idx] = static_cast<double>(count) - 1.0;
    }
    return {FrameSystem(std::move(vectors)),
            CompactTightCert{1.0, std::nullopt, perm, diagonal_operator(shape, perm, kappas)}};
}

enum class UniquenessVerdict { Equal, DistinctXi };

struct UniquenessResult {
    UniquenessVerdict verdict = UniquenessVerdict::Equal;
    std::string explanation;
};

/// Two representations S = K₁ + ξ₁I = K₂ + ξ₂I of one operator.  K₂ − K₁ =
/// (ξ₁ − ξ₂)I, and a nonzero multiple of I has a constant nonzero eigenvalue
/// profile, so at most one of the two K's can be compact.  Decided from the
/// declared profile limits.
inline UniquenessResult representation_unique(const CompactTightCert& a, const CompactTightCert& b,
                                              double tol = 1e-10) {
    require_same_shape(a.k.shape(), b.k.shape());
    const ComplexMatrix eye = ComplexMatrix::identity(a.k.shape().width());
    const double gap = frobenius_distance(a.k.mat() + a.xi * eye, b.k.mat() + b.xi * eye);
    if (gap > tol * std::max(1.0, a.k.mat().frobenius_norm()))
        throw Error(ErrorCode::NotSameOperator, "‖K₁ + ξ₁I − K₂ − ξ₂I‖_F = " + std::to_string(gap));

    auto describe = [](const char* name, const CompactTightCert& c) {
        return std::string(name) + ": xi=" + std::to_string(c.xi) + ", K-profile limit " +
               std::to_string(c.k_limit()) + (std::abs(c.k_limit()) <= 1e-12 ? " (compact)" : " (not compact)");
    };
    const bool same_xi = std::abs(a.xi - b.xi) <= tol;
    const bool same_limit = std::abs(a.k_limit() - b.k_limit()) <= tol;
    const bool same_k = frobenius_distance(a.k.mat(), b.k.mat()) <= tol * std::max(1.0, a.k.mat().frobenius_norm());
    if (same_xi && same_limit && same_k) return {UniquenessVerdict::Equal, "identical representation"};
    return {UniquenessVerdict::DistinctXi, describe("first", a) + "; " + describe("second", b) +
                                               "; K2 - K1 = (xi1 - xi2) I has constant nonzero profile"};
}

} // namespace cstar_frames
