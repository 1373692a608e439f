#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "alphadiv/bounds.hpp"
#include "alphadiv/divergences.hpp"
#include "helpers.hpp"

using namespace alphadiv;
using testutil::close;
using testutil::close_rel;

namespace {

MomentSpec random_spec(SplitMix64& rng) {
    for (;;) {
        MomentSpec s{rng.uniform(-5.0, 5.0), rng.uniform(0.01, 5.0),
                     rng.uniform(-5.0, 5.0), rng.uniform(0.01, 5.0)};
        if (std::fabs(s.mean_p - s.mean_q) > 1e-3) return s;
    }
}

}  // namespace

TEST_CASE("binary pair at the reference spec (1,1,0,1)") {
    BinaryPair bp = binary_pair_from_moments({1, 1, 0, 1});
    CHECK(close(bp.r, 0.72360679774997897, 1e-15));
    CHECK(close(bp.s, 0.27639320225002103, 1e-15));
    CHECK(close(bp.u1, 1.6180339887498949, 1e-15));
    CHECK(close(bp.u2, -0.61803398874989485, 1e-15));
    CHECK(close(bp.v, 1.1180339887498949, 1e-15));
    CHECK(bp.a == 1.0);
    CHECK(close(bp.r - bp.s, 1.0 / std::sqrt(5.0), 1e-15));
}

TEST_CASE("binary pair structural identities") {
    SplitMix64 rng(42);
    for (int rep = 0; rep < 200; ++rep) {
        MomentSpec spec = random_spec(rng);
        BinaryPair bp = binary_pair_from_moments(spec);
        CHECK(bp.r >= 0.0);
        CHECK(bp.r <= 1.0);
        CHECK(bp.s >= 0.0);
        CHECK(bp.s <= 1.0);
        // r - s = a/(2v)
        CHECK(close(bp.delta, bp.a / (2.0 * bp.v), 1e-10));
        // s(1-s) 4v^2 = sigma_q^2
        CHECK(close_rel(bp.s * bp.s_bar * 4.0 * bp.v * bp.v,
                        spec.sigma_q * spec.sigma_q, 1e-8));
        // complements are true complements
        CHECK(close(bp.r + bp.r_bar, 1.0, 1e-15));
        CHECK(close(bp.s + bp.s_bar, 1.0, 1e-15));

        // reconstructed moments match the spec
        MeasurePair mp = to_measure_pair(bp);
        Moments r_mom = moments(mp.p()), s_mom = moments(mp.q());
        CHECK(close(r_mom.mean, spec.mean_p, 1e-8));
        CHECK(close(r_mom.variance, spec.sigma_p * spec.sigma_p, 1e-8));
        CHECK(close(s_mom.mean, spec.mean_q, 1e-8));
        CHECK(close(s_mom.variance, spec.sigma_q * spec.sigma_q, 1e-8));
    }
}

TEST_CASE("binary pair degenerate sigmas") {
    SECTION("sigma_p = 0 concentrates R") {
        BinaryPair bp = binary_pair_from_moments({1, 0, 0, 1});
        CHECK(bp.r == 1.0);
        CHECK(bp.s == 0.5);  // sigma_q^2/(sigma_q^2 + a^2)
        CHECK(bp.u1 == 1.0);
        CHECK(bp.u2 == -1.0);  // mean_q - sigma_q^2/a
        Moments s_mom = moments(to_measure_pair(bp).q());
        CHECK(close(s_mom.mean, 0.0, 1e-14));
        CHECK(close(s_mom.variance, 1.0, 1e-14));
    }
    SECTION("sigma_p = 0 with negative gap") {
        BinaryPair bp = binary_pair_from_moments({0, 0, 1, 1});
        CHECK(bp.r == 0.0);
        CHECK(bp.u2 == 0.0);
        CHECK(close(bp.u1, 2.0, 1e-14));  // 1 - 1/(-1)
        CHECK(close(bp.s, 0.5, 1e-14));
    }
    SECTION("both sigmas zero: pair of point masses") {
        BinaryPair bp = binary_pair_from_moments({1, 0, 0, 0});
        CHECK(bp.r == 1.0);
        CHECK(bp.s == 0.0);
        CHECK(bp.u1 == 1.0);
        CHECK(bp.u2 == 0.0);
    }
    SECTION("sigma_q = 0 concentrates S") {
        BinaryPair bp = binary_pair_from_moments({1, 1, 0, 0});
        CHECK(bp.s == 0.0);
        CHECK(close(bp.r, 0.5, 1e-14));      // a^2/(vp + a^2)
        CHECK(close(bp.u1, 2.0, 1e-14));     // mean_p + vp/a
        CHECK(close(bp.u2, 0.0, 1e-14));     // = mean_q
    }
}

TEST_CASE("binary pair swap symmetry") {
    SplitMix64 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        MomentSpec spec = random_spec(rng);
        BinaryPair bp = binary_pair_from_moments(spec);
        BinaryPair sw = binary_pair_from_moments(swapped(spec));
        CHECK(close(sw.r, bp.s, 1e-13));
        CHECK(close(sw.s, bp.r, 1e-13));
        CHECK(sw.a == -bp.a);
    }
}

namespace {

// Independent two-point moment solver. A two-point measure with mass at
// {u1, u2} and mean m has variance (m - u2)(u1 - m), so u1 follows from u2
// via P's constraint and the remaining unknown u2 is a 1-D root of Q's
// variance constraint, found by bisection.
struct TwoPointSolution {
    double u1, u2, r, s;
};

// Requires mean_p > mean_q: then u2 < mean_q, g(u2) -> +inf as u2 -> -inf
// and g -> -vq at u2 -> mean_q, bracketing the unique root.
TwoPointSolution solve_two_point_bisect(const MomentSpec& spec) {
    double mp = spec.mean_p, mq = spec.mean_q;
    double vp = spec.sigma_p * spec.sigma_p, vq = spec.sigma_q * spec.sigma_q;
    auto u1_of = [&](double u2) { return mp + vp / (mp - u2); };
    auto g = [&](double u2) { return (mq - u2) * (u1_of(u2) - mq) - vq; };
    double b = mq - 1e-9;
    REQUIRE(g(b) < 0.0);
    double a = b;
    for (double span = 1.0; g(a) <= 0.0; span *= 2.0) {
        a = b - span;
        REQUIRE(span < 1e12);
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (a + b);
        (g(mid) > 0.0 ? a : b) = mid;
    }
    double u2 = 0.5 * (a + b);
    double u1 = u1_of(u2);
    return {u1, u2, (mp - u2) / (u1 - u2), (mq - u2) / (u1 - u2)};
}

}  // namespace

TEST_CASE("two-point moment problem: independent solver recovers the pair") {
    SplitMix64 rng(4242);
    for (int rep = 0; rep < 25; ++rep) {
        MomentSpec spec = random_spec(rng);
        if (spec.mean_p < spec.mean_q) spec = swapped(spec);
        BinaryPair bp = binary_pair_from_moments(spec);
        TwoPointSolution ind = solve_two_point_bisect(spec);
        CHECK(close(ind.u1, bp.u1, 1e-6));
        CHECK(close(ind.u2, bp.u2, 1e-6));
        CHECK(close(ind.r, bp.r, 1e-6));
        CHECK(close(ind.s, bp.s, 1e-6));
    }
}

TEST_CASE("binary pair rejects equal means") {
    CHECK_THROWS_AS(binary_pair_from_moments({1, 1, 1, 2}), EqualMeans);
    CHECK_THROWS_AS(binary_pair_from_moments({0, 1, 5e-13, 2}), EqualMeans);
}

TEST_CASE("alpha lower bound reference values") {
    BoundReport chi2 = alpha_lower_bound({1, 1, 0, 1}, 2.0);
    CHECK(close(chi2.bound.value(), 0.5, 1e-14));
    CHECK(chi2.tight_guaranteed);
    CHECK_FALSE(chi2.equal_means);
    REQUIRE(chi2.witness.has_value());

    BoundReport hell = alpha_lower_bound({1, 1, 0, 1}, 0.5);
    CHECK(close(hell.bound.value(), 0.42229123600033649, 1e-13));

    BoundReport outside = alpha_lower_bound({1, 1, 0, 1}, 3.0);
    CHECK_FALSE(outside.tight_guaranteed);
    CHECK(outside.bound.is_finite());

    BoundReport eq = alpha_lower_bound({0, 1, 0, 2}, 1.0);
    CHECK(eq.bound.value() == 0.0);
    CHECK(eq.equal_means);
    CHECK_FALSE(eq.witness.has_value());
}

TEST_CASE("closed forms agree with the generic bound") {
    SplitMix64 rng(99);
    for (int rep = 0; rep < 300; ++rep) {
        MomentSpec spec = random_spec(rng);
        CHECK(close_rel(alpha_lower_bound(spec, 2.0).bound.value(),
                        chi2_bound_closed_form(spec), 1e-12));
        CHECK(close_rel(alpha_lower_bound(spec, 0.5).bound.value(),
                        hellinger_bound_closed_form(spec), 1e-12));
    }
    CHECK_THROWS_AS(chi2_bound_closed_form({0, 1, 0, 1}), EqualMeans);
    CHECK(std::isinf(chi2_bound_closed_form({1, 1, 0, 0})));
    CHECK(hellinger_bound_closed_form({1, 0, 0, 0}) == 4.0);
}

TEST_CASE("attainment: witness divergence equals the bound") {
    SplitMix64 rng(1234);
    for (int rep = 0; rep < 100; ++rep) {
        MomentSpec spec = random_spec(rng);
        for (double a : {-1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0}) {
            BoundReport rep_a = alpha_lower_bound(spec, a);
            REQUIRE(rep_a.witness.has_value());
            ExtendedValue direct =
                alpha_divergence(to_measure_pair(*rep_a.witness), a);
            REQUIRE(direct.is_infinite() == rep_a.bound.is_infinite());
            if (direct.is_finite())
                CHECK(close(direct.value(), rep_a.bound.value(), 1e-12));
        }
    }
}

TEST_CASE("bound duality") {
    SplitMix64 rng(777);
    for (int rep = 0; rep < 100; ++rep) {
        MomentSpec spec = random_spec(rng);
        for (double a : {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
            ExtendedValue lhs = alpha_lower_bound(spec, a).bound;
            ExtendedValue rhs = alpha_lower_bound(swapped(spec), 1.0 - a).bound;
            REQUIRE(lhs.is_infinite() == rhs.is_infinite());
            if (lhs.is_finite()) CHECK(close(lhs.value(), rhs.value(), 1e-12));
        }
    }
}

TEST_CASE("degenerate point-mass spec yields infinite bounds off (0,1)") {
    MomentSpec spec{1, 0, 0, 0};
    CHECK(alpha_lower_bound(spec, 2.0).bound.is_infinite());
    CHECK(alpha_lower_bound(spec, 1.0).bound.is_infinite());
    CHECK(alpha_lower_bound(spec, -1.0).bound.is_infinite());
    CHECK(close(alpha_lower_bound(spec, 0.5).bound.value(), 4.0, 1e-14));
}

TEST_CASE("renyi lower bound") {
    SECTION("order domain") {
        CHECK_THROWS_AS(renyi_lower_bound({1, 1, 0, 1}, 2.5), InvalidOrder);
        CHECK_THROWS_AS(renyi_lower_bound({1, 1, 0, 1}, -0.1), InvalidOrder);
        CHECK_THROWS_AS(renyi_lower_bound({1, 1, 0, 1}, AlphaOrder::infinity()),
                        InvalidOrder);
    }
    SECTION("order zero vanishes when sigma_p > 0") {
        CHECK(renyi_lower_bound({1, 1, 0, 1}, 0.0).bound.value() == 0.0);
        CHECK(renyi_lower_bound({2, 0.3, -1, 2}, 0.0).bound.value() == 0.0);
    }
    SECTION("order zero with a point-mass P") {
        BoundReport rep = renyi_lower_bound({1, 0, 0, 1}, 0.0);
        CHECK(close(rep.bound.value(), std::log(2.0), 1e-14));
    }
    SECTION("order one matches the alpha bound") {
        SplitMix64 rng(31);
        for (int rep = 0; rep < 30; ++rep) {
            MomentSpec spec = random_spec(rng);
            CHECK(renyi_lower_bound(spec, 1.0).bound.value() ==
                  alpha_lower_bound(spec, 1.0).bound.value());
        }
    }
    SECTION("monotone transform of the alpha bound") {
        SplitMix64 rng(32);
        for (int rep = 0; rep < 50; ++rep) {
            MomentSpec spec = random_spec(rng);
            for (double a : {0.25, 0.5, 1.5, 2.0}) {
                double d = alpha_lower_bound(spec, a).bound.value();
                double expect = std::log1p(a * (a - 1.0) * d) / (a - 1.0);
                CHECK(close(renyi_lower_bound(spec, a).bound.value(), expect, 1e-10));
            }
        }
    }
}

TEST_CASE("bound monotonicity in the sigmas, spot checks") {
    for (double a : {0.1, 0.5, 0.9}) {
        double prev = INFINITY;
        for (double sq = 0.1; sq <= 3.01; sq += 0.1) {
            double b = alpha_lower_bound({1, 0.7, 0, sq}, a).bound.value();
            CHECK(b < prev);
            prev = b;
        }
        prev = INFINITY;
        for (double sp = 0.1; sp <= 3.01; sp += 0.1) {
            double b = alpha_lower_bound({1, sp, 0, 0.7}, a).bound.value();
            CHECK(b < prev);
            prev = b;
        }
    }
}

TEST_CASE("monotonicity reverses somewhere for alpha < -1") {
    double at_zero = alpha_lower_bound({1, 1, 0, 0}, -2.0).bound.value();
    bool exceeded = false;
    for (double sq = 0.05; sq <= 3.0; sq += 0.05) {
        if (alpha_lower_bound({1, 1, 0, sq}, -2.0).bound.value() > at_zero) {
            exceeded = true;
            break;
        }
    }
    CHECK(exceeded);
}
