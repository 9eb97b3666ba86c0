#pragma once

// Weavings of m frames indexed by the same set J = {0, …, N−1}.
//
// A partition assigns each index j to one family; the weaving is the mixed
// family {x_{assignment[j], j}}.  universal_bounds enumerates all mᴺ
// partitions.  Partition number p encodes the assignment in base m with
// position 0 as the most significant digit, so numeric order is
// lexicographic order on assignments and ties are broken by the smallest p.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "constructors.hpp"

namespace cstar_frames {

struct Partition {
    std::vector<std::size_t> assignment;  // family index (0-based) per vector

    friend bool operator==(const Partition&, const Partition&) = default;
};

namespace detail {

inline void require_compatible(const std::vector<FrameSystem>& families) {
    if (families.empty()) throw Error(ErrorCode::LengthMismatch, "need at least one family");
    for (const auto& f : families) {
        require_same_shape(families.front().shape(), f.shape());
        if (f.size() != families.front().size())
            throw Error(ErrorCode::LengthMismatch, "families differ in length");
    }
}

inline Partition decode_partition(std::uint64_t code, std::size_t m, std::size_t n_vectors) {
    Partition p{std::vector<std::size_t>(n_vectors)};
    for (std::size_t j = n_vectors; j-- > 0;) {
        p.assignment[j] = static_cast<std::size_t>(code % m);
        code /= m;
    }
    return p;
}

} // namespace detail

/// Frame operator of the weaving selected by `part`.
inline ModuleOperator weaving_operator(const std::vector<FrameSystem>& families, const Partition& part) {
    detail::require_compatible(families);
    const std::size_t n_vectors = families.front().size();
    if (part.assignment.size() != n_vectors)
        throw Error(ErrorCode::LengthMismatch, "partition length " + std::to_string(part.assignment.size()) +
                                                   " != " + std::to_string(n_vectors));
    const ModuleShape shape = families.front().shape();
    ComplexMatrix s(shape.width(), shape.width());
    for (std::size_t j = 0; j < n_vectors; ++j) {
        const std::size_t fam = part.assignment[j];
        if (fam >= families.size())
            throw Error(ErrorCode::IndexOutOfRange, "family " + std::to_string(fam) + " at position " +
                                                        std::to_string(j));
        const ComplexMatrix& r = families[fam][j].rep();
        s += r.adjoint() * r;
    }
    return {shape, std::move(s)};
}

struct WeavingReport {
    double universal_lower = 0.0;
    double universal_upper = 0.0;
    Partition worst_partition;
    bool is_woven = false;
    std::uint64_t partitions_checked = 0;
};

inline constexpr std::uint64_t kDefaultMaxPartitions = std::uint64_t{1} << 20;

/// Worker count for enumeration: CSTAR_FRAMES_THREADS if set to a positive
/// integer, otherwise the hardware concurrency.
inline unsigned default_worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CSTAR_FRAMES_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return hw;
}

/// Exhaustive universal bounds (C, D) over every partition.
inline WeavingReport universal_bounds(const std::vector<FrameSystem>& families, double tol = kDefaultTol,
                                      std::uint64_t max_partitions = kDefaultMaxPartitions,
                                      unsigned workers = 0) {
    detail::require_compatible(families);
    const std::size_t m = families.size();
    const std::size_t n_vectors = families.front().size();

    std::uint64_t total = 1;
    for (std::size_t j = 0; j < n_vectors; ++j) {
        if (total > max_partitions / m)
            throw Error(ErrorCode::TooManyPartitions,
                        std::to_string(m) + "^" + std::to_string(n_vectors) + " exceeds cap " +
                            std::to_string(max_partitions));
        total *= m;
    }
    if (total > max_partitions)
        throw Error(ErrorCode::TooManyPartitions, std::to_string(total) + " exceeds cap");

    if (workers == 0) workers = default_worker_count();
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, total));

    struct Partial {
        double lower = std::numeric_limits<double>::infinity();
        std::uint64_t lower_code = 0;
        double upper = -std::numeric_limits<double>::infinity();
    };
    std::vector<Partial> partials(workers);

    // Contiguous chunks; each worker reduces its own range, then the chunks
    // are merged in order.  The merge is min/max with smallest-code ties, so
    // the result does not depend on the number of workers.
    auto run = [&](unsigned w) {
        const std::uint64_t begin = total * w / workers;
        const std::uint64_t end = total * (w + 1) / workers;
        Partial& acc = partials[w];
        for (std::uint64_t code = begin; code < end; ++code) {
            const SpectralResult spec =
                detail::symmetrized_eigen(weaving_operator(families, detail::decode_partition(code, m, n_vectors)).mat());
            if (spec.min() < acc.lower) {
                acc.lower = spec.min();
                acc.lower_code = code;
            }
            acc.upper = std::max(acc.upper, spec.max());
        }
    };

    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }

    Partial best;
    for (const auto& p : partials) {
        if (p.lower < best.lower || (p.lower == best.lower && p.lower_code < best.lower_code)) {
            best.lower = p.lower;
            best.lower_code = p.lower_code;
        }
        best.upper = std::max(best.upper, p.upper);
    }

    WeavingReport r;
    r.universal_lower = std::max(best.lower, 0.0);
    r.universal_upper = std::max(best.upper, 0.0);
    r.worst_partition = detail::decode_partition(best.lower_code, m, n_vectors);
    r.is_woven = r.universal_lower > tol;
    r.partitions_checked = total;
    return r;
}

/// Two (1, K)-compact-tight frames that cannot be woven.
///
/// Module rank n = N, families of length 2N indexed by j = 0..2N−1.  σ holds
/// the even j (the odd positions counted from 1), σᶜ the odd j, and both are
/// mapped order-preservingly onto the basis: π(j) = j/2 on σ, τ(j) = (j−1)/2
/// on σᶜ.
///   F: f_j = e_{π(j)} on σ,  f_j = √l¹_{τ(j)+1} · e_{τ(j)} on σᶜ  ⇒ S_F = I + K₁
///   G: g_j = e_{τ(j)} on σᶜ, g_j = √l²_{π(j)+1} · e_{π(j)} on σ   ⇒ S_G = I + K₂
/// The adversarial weaving takes F on σᶜ and G on σ, dropping both
/// orthonormal halves, so its frame operator is K₁ + K₂ with λ_min = l¹_N + l²_N.
struct UnweavableScenario {
    FrameSystem f;
    FrameSystem g;
    CompactTightCert cert_f;  // ξ = 1, K₁
    CompactTightCert cert_g;  // ξ = 1, K₂
    std::vector<std::size_t> sigma;
    Partition adversarial;    // 0 = F, 1 = G
};

inline UnweavableScenario unweavable_scenario(std::size_t big_n, const ScalarProfile& profile1,
                                              const ScalarProfile& profile2, std::size_t d = 1) {
    if (big_n == 0 || big_n % 2 != 0) throw Error(ErrorCode::OddN, "N = " + std::to_string(big_n) + " must be even");
    for (const auto* p : {&profile1, &profile2}) {
        if (p->limit() != 0.0) throw Error(ErrorCode::NonzeroLimit, "scenario profiles must have limit 0");
        if (p->reciprocal || !(p->c > 0.0))
            throw Error(ErrorCode::InvalidProfile, "scenario profiles need positive amplitude");
    }
    const ModuleShape shape(d, big_n);
    const auto basis = standard_basis(shape);
    const std::size_t len = 2 * big_n;

    std::vector<ModuleVector> fv, gv;
    std::vector<std::size_t> sigma;
    Partition adversarial{std::vector<std::size_t>(len)};
    for (std::size_t j = 0; j < len; ++j) {
        const std::size_t b = j / 2;
        if (j % 2 == 0) {
            sigma.push_back(j);
            fv.push_back(basis[b]);
            gv.push_back(basis[b].scaled(std::sqrt(profile2.eval(b + 1))));
            adversarial.assignment[j] = 1;
        } else {
            fv.push_back(basis[b].scaled(std::sqrt(profile1.eval(b + 1))));
            gv.push_back(basis[b]);
            adversarial.assignment[j] = 0;
        }
    }
    std::vector<std::size_t> perm(big_n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> k1(big_n), k2(big_n);
    for (std::size_t i = 0; i < big_n; ++i) {
        k1[i] = profile1.eval(i + 1);
        k2[i] = profile2.eval(i + 1);
    }
    return {FrameSystem(std::move(fv)),
            FrameSystem(std::move(gv)),
            CompactTightCert{1.0, profile1.shifted(1.0), perm, diagonal_operator(shape, perm, k1)},
            CompactTightCert{1.0, profile2.shifted(1.0), perm, diagonal_operator(shape, perm, k2)},
            std::move(sigma),
            std::move(adversarial)};
}

struct DecayRow {
    std::size_t n = 0;
    double lambda_min = 0.0;  // λ_min of the adversarial weaving
    double envelope = 0.0;    // 2·(l¹_{N−1} + l²_{N−1})
    double k_identity_residual = 0.0;  // ‖S_adv − K₁ − K₂‖_F
};

/// λ_min of the adversarial weaving as N grows.
inline std::vector<DecayRow> decay_study(const std::vector<std::size_t>& sizes, const ScalarProfile& profile1,
                                         const ScalarProfile& profile2, std::size_t d = 1) {
    std::vector<DecayRow> rows;
    for (std::size_t n : sizes) {
        const auto sc = unweavable_scenario(n, profile1, profile2, d);
        const ModuleOperator adv = weaving_operator({sc.f, sc.g}, sc.adversarial);
        DecayRow row;
        row.n = n;
        row.lambda_min = hermitian_eigen(adv.mat()).min();
        row.envelope = 2.0 * (profile1.eval(n - 1) + profile2.eval(n - 1));
        row.k_identity_residual = frobenius_distance(adv.mat(), sc.cert_f.k.mat() + sc.cert_g.k.mat());
        rows.push_back(row);
    }
    return rows;
}

} // namespace cstar_frames
