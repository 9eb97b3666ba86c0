#include <gtest/gtest.h>

#include <cstar_frames/weaving.hpp>

#include <cstdlib>

#include "oracles.hpp"

using namespace cstar_frames;

namespace {

std::vector<FrameSystem> onb_vs_scaled(std::size_t n, double scale = std::sqrt(2.0)) {
    const auto e = standard_basis(ModuleShape(1, n));
    std::vector<ModuleVector> g;
    for (const auto& v : e) g.push_back(v.scaled(scale));
    return {FrameSystem(e), FrameSystem(std::move(g))};
}

std::vector<FrameSystem> random_families(std::size_t m, std::size_t len, ModuleShape s, Rng& rng) {
    std::vector<FrameSystem> out;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<ModuleVector> v;
        for (std::size_t k = 0; k < len; ++k) v.push_back(ModuleVector::random(s, rng));
        out.emplace_back(std::move(v));
    }
    return out;
}

// Reference: explicit loop over assignments, operator rebuilt from the vectors.
std::pair<double, double> brute_bounds(const std::vector<FrameSystem>& fams) {
    double lo = 1e300, hi = -1e300;
    oracle::for_each_assignment(fams.front().size(), fams.size(), [&](const std::vector<std::size_t>& a) {
        std::vector<ModuleVector> mixed;
        for (std::size_t j = 0; j < a.size(); ++j) mixed.push_back(fams[a[j]][j]);
        const auto b = optimal_bounds(FrameSystem(std::move(mixed)));
        lo = std::min(lo, b.lower);
        hi = std::max(hi, b.upper);
    });
    return {lo, hi};
}

} // namespace

TEST(WeavingOperator, Examples) {
    const auto e = standard_basis(ModuleShape(2, 3));
    const std::vector<FrameSystem> same{FrameSystem(e), FrameSystem(e)};
    EXPECT_EQ(weaving_operator(same, Partition{{0, 1, 1}}).mat(), ComplexMatrix::identity(6));

    const auto fam = onb_vs_scaled(3);
    EXPECT_LE(frobenius_distance(weaving_operator(fam, Partition{{1, 1, 1}}).mat(), 2.0 * ComplexMatrix::identity(3)),
              1e-15);
    EXPECT_LE(frobenius_distance(weaving_operator(fam, Partition{{1, 0, 0}}).mat(),
                                 ComplexMatrix::diagonal({2.0, 1.0, 1.0})),
              1e-15);

    EXPECT_THROW(weaving_operator(fam, Partition{{0, 1}}), Error);
    EXPECT_THROW(weaving_operator({fam[0], FrameSystem(standard_basis(ModuleShape(1, 4)))}, Partition{{0, 0, 0}}),
                 Error);
}

TEST(UniversalBounds, Examples) {
    const auto e = standard_basis(ModuleShape(1, 3));
    const auto same = universal_bounds({FrameSystem(e), FrameSystem(e)});
    EXPECT_DOUBLE_EQ(same.universal_lower, 1.0);
    EXPECT_DOUBLE_EQ(same.universal_upper, 1.0);
    EXPECT_TRUE(same.is_woven);

    const auto r = universal_bounds(onb_vs_scaled(3));
    EXPECT_NEAR(r.universal_lower, 1.0, 1e-12);
    EXPECT_NEAR(r.universal_upper, 2.0, 1e-12);
    EXPECT_EQ(r.partitions_checked, 8u);
    EXPECT_TRUE(r.is_woven);
    EXPECT_EQ(r.worst_partition, (Partition{{0, 0, 0}}));
}

TEST(UniversalBounds, CapIsEnforced) {
    try {
        universal_bounds(onb_vs_scaled(5), kDefaultTol, 16);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.code(), ErrorCode::TooManyPartitions);
    }
    EXPECT_NO_THROW(universal_bounds(onb_vs_scaled(4), kDefaultTol, 16));
}

TEST(UniversalBounds, MatchesRecursiveEnumeration) {
    Rng rng(3);
    for (int t = 0; t < 6; ++t) {
        const auto fams = random_families(2 + t % 2, 4, ModuleShape(1 + t % 2, 2), rng);
        const auto r = universal_bounds(fams);
        const auto [lo, hi] = brute_bounds(fams);
        EXPECT_NEAR(r.universal_lower, lo, 1e-10);
        EXPECT_NEAR(r.universal_upper, hi, 1e-10);
        const auto worst = optimal_bounds(FrameSystem([&] {
            std::vector<ModuleVector> v;
            for (std::size_t j = 0; j < r.worst_partition.assignment.size(); ++j)
                v.push_back(fams[r.worst_partition.assignment[j]][j]);
            return v;
        }()));
        EXPECT_NEAR(worst.lower, r.universal_lower, 1e-10);
    }
}

TEST(UniversalBounds, DeterministicAcrossWorkerCounts) {
    Rng rng(4);
    const auto fams = random_families(3, 6, ModuleShape(1, 3), rng);
    const auto ref = universal_bounds(fams, kDefaultTol, kDefaultMaxPartitions, 1);
    for (unsigned w : {2u, 3u, 8u, 64u}) {
        const auto r = universal_bounds(fams, kDefaultTol, kDefaultMaxPartitions, w);
        EXPECT_EQ(r.universal_lower, ref.universal_lower);
        EXPECT_EQ(r.universal_upper, ref.universal_upper);
        EXPECT_EQ(r.worst_partition, ref.worst_partition);
        EXPECT_EQ(r.partitions_checked, ref.partitions_checked);
    }
}

TEST(UniversalBounds, StableUnderRelabeling) {
    Rng rng(5);
    const auto fams = random_families(2, 5, ModuleShape(2, 2), rng);
    const std::vector<std::size_t> perm{3, 0, 4, 2, 1};
    std::vector<FrameSystem> permuted;
    for (const auto& f : fams) {
        std::vector<ModuleVector> v;
        for (std::size_t j : perm) v.push_back(f[j]);
        permuted.emplace_back(std::move(v));
    }
    const auto a = universal_bounds(fams), b = universal_bounds(permuted);
    EXPECT_NEAR(a.universal_lower, b.universal_lower, 1e-12);
    EXPECT_NEAR(a.universal_upper, b.universal_upper, 1e-12);
}

TEST(UniversalBounds, SampledPartitionsLieInside) {
    Rng rng(6);
    const auto fams = random_families(2, 6, ModuleShape(1, 3), rng);
    const auto r = universal_bounds(fams);
    for (int t = 0; t < 10; ++t) {
        Partition p{std::vector<std::size_t>(6)};
        for (auto& a : p.assignment) a = uniform(rng, 0.0, 1.0) < 0.5 ? 0 : 1;
        const auto sp = hermitian_eigen(weaving_operator(fams, p).mat());
        EXPECT_GE(sp.min(), r.universal_lower - 1e-12);
        EXPECT_LE(sp.max(), r.universal_upper + 1e-12);
    }
}

TEST(WorkerCount, ReadsEnvironment) {
    ::setenv("CSTAR_FRAMES_THREADS", "3", 1);
    EXPECT_EQ(default_worker_count(), 3u);
    ::setenv("CSTAR_FRAMES_THREADS", "zero", 1);
    EXPECT_GE(default_worker_count(), 1u);
    ::unsetenv("CSTAR_FRAMES_THREADS");
    EXPECT_GE(default_worker_count(), 1u);
}

TEST(UnweavableScenario, StructureAndIdentity) {
    const auto p = ScalarProfile::gaussian(0.0, 1.0);
    for (std::size_t n : {2u, 4u, 6u, 8u}) {
        for (std::size_t d : {1u, 2u}) {
            const auto sc = unweavable_scenario(n, p, p, d);
            EXPECT_EQ(sc.f.size(), 2 * n);
            EXPECT_EQ(sc.sigma.size(), n);
            const auto adv = weaving_operator({sc.f, sc.g}, sc.adversarial);
            EXPECT_LE(frobenius_distance(adv.mat(), sc.cert_f.k.mat() + sc.cert_g.k.mat()), 1e-12);
            EXPECT_GE(optimal_bounds(sc.f).lower, 1.0 - 1e-9);
            EXPECT_GE(optimal_bounds(sc.g).lower, 1.0 - 1e-9);
            EXPECT_LE(certificate_residual(sc.cert_f, sc.f.frame_operator()), 1e-12);
            EXPECT_LE(certificate_residual(sc.cert_g, sc.g.frame_operator()), 1e-12);
            EXPECT_NEAR(hermitian_eigen(adv.mat()).min(), 2.0 * p.eval(n), 1e-15);
            // the orthonormal halves
            std::vector<ModuleVector> on_sigma;
            for (std::size_t j : sc.sigma) on_sigma.push_back(sc.f[j]);
            EXPECT_EQ(FrameSystem(on_sigma).frame_operator().mat(), ComplexMatrix::identity(n * d));
        }
    }
}

TEST(UnweavableScenario, ExhaustionFindsAdversary) {
    const auto p = ScalarProfile::gaussian(0.0, 1.0);
    const auto sc = unweavable_scenario(6, p, p);
    const auto r = universal_bounds({sc.f, sc.g});
    EXPECT_EQ(r.partitions_checked, 1u << 12);
    const double adv = hermitian_eigen(weaving_operator({sc.f, sc.g}, sc.adversarial).mat()).min();
    EXPECT_LE(r.universal_lower, adv + 1e-15);
}

TEST(UnweavableScenario, Errors) {
    const auto p = ScalarProfile::gaussian(0.0, 1.0);
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    EXPECT_EQ(code_of([&] { unweavable_scenario(5, p, p); }), ErrorCode::OddN);
    EXPECT_EQ(code_of([&] { unweavable_scenario(4, ScalarProfile::gaussian(1.0, 1.0), p); }),
              ErrorCode::NonzeroLimit);
    EXPECT_EQ(code_of([&] { unweavable_scenario(4, p, ScalarProfile::gaussian(0.0, 0.0)); }),
              ErrorCode::InvalidProfile);
}

TEST(DecayStudy, DecreasesUnderEnvelope) {
    const auto p = ScalarProfile::gaussian(0.0, 1.0);
    const auto q = ScalarProfile::geometric(0.0, 2.0, 0.5);
    const auto rows = decay_study({2, 4, 6, 8, 10, 12}, p, q);
    ASSERT_EQ(rows.size(), 6u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_LE(rows[i].lambda_min, rows[i].envelope);
        EXPECT_LE(rows[i].k_identity_residual, 1e-12);
        if (i > 0) {
            EXPECT_LT(rows[i].lambda_min, rows[i - 1].lambda_min);
        }
    }
}
