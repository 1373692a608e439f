#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "alphadiv/divergences.hpp"
#include "alphadiv/measures.hpp"

namespace alphadiv {

/// Mean gaps at or below this threshold are treated as equal means; the
/// 1/|a| factor in the pair construction amplifies noise beyond usefulness
/// underneath it.
inline constexpr double kEqualMeansTolerance = 1e-12;

/// The extremal two-point pair attaining the moment-constrained lower
/// bound: masses R(u1)=r, S(u1)=s on the support {u1, u2}. The complements
/// r_bar = 1-r and s_bar = 1-s and the gap delta = r-s are carried at full
/// relative precision; recomputing them from r and s would destroy the low
/// bits when a mass sits next to 0 or 1.
struct BinaryPair {
    double r = 0.0;
    double s = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double a = 0.0;  // mean gap mean_p - mean_q
    double v = 0.0;  // half-distance scale, r - s = a/(2v)
    double r_bar = 0.0;
    double s_bar = 0.0;
    double delta = 0.0;  // r - s
};

/// Solves the two-point moment problem: the unique (r, s, u1, u2) whose
/// two-point measures match the spec's means and variances. Requires
/// mean_p != mean_q. When sigma_p = 0 the generic support formula
/// degenerates to 0/0 and the free point is recovered from the moment
/// equations of S instead. sigma_p = sigma_q = 0 yields the pair of point
/// masses (r,s) = (1,0) for a > 0.
inline BinaryPair binary_pair_from_moments(const MomentSpec& spec) {
    validate(spec);
    const double a = spec.mean_p - spec.mean_q;
    if (std::fabs(a) <= kEqualMeansTolerance)
        throw EqualMeans("binary pair undefined for mean_p = mean_q");

    const double vp = spec.sigma_p * spec.sigma_p;
    const double vq = spec.sigma_q * spec.sigma_q;
    const double a2 = a * a;
    const double g = (vq - vp) * (vq - vp) + 2.0 * a2 * (vp + vq) + a2 * a2;
    const double sg = std::sqrt(g);  // = 2 v |a|

    // Masses for a > 0. Each of r, 1-r, s, 1-s has a conjugate form that is
    // a ratio of positive quantities (g - t1^2 = 4 a^2 vp and
    // g - t2^2 = 4 a^2 vq), used whenever the direct sum would cancel.
    const double t1 = vq - vp + a2;
    const double t2 = vq - vp - a2;
    const double num_r = t1 >= 0.0 ? sg + t1 : 4.0 * a2 * vp / (sg - t1);
    const double num_rbar = t1 <= 0.0 ? sg - t1 : 4.0 * a2 * vp / (sg + t1);
    const double num_s = t2 >= 0.0 ? sg + t2 : 4.0 * a2 * vq / (sg - t2);
    const double num_sbar = t2 <= 0.0 ? sg - t2 : 4.0 * a2 * vq / (sg + t2);

    BinaryPair bp;
    bp.a = a;
    bp.v = sg / (2.0 * std::fabs(a));
    double r = num_r / (2.0 * sg), r_bar = num_rbar / (2.0 * sg);
    double s = num_s / (2.0 * sg), s_bar = num_sbar / (2.0 * sg);
    if (vp == 0.0) { r = 1.0; r_bar = 0.0; }  // sqrt(g) rounds, pin the mass
    if (vq == 0.0) { s = 0.0; s_bar = 1.0; }
    double delta = a2 / sg;
    if (a < 0.0) {
        // replacing a by -a maps (r, s) -> (1-r, 1-s)
        std::swap(r, r_bar);
        std::swap(s, s_bar);
        delta = -delta;
    }
    bp.r = detail::clamp_unit(r, "r");
    bp.r_bar = r_bar;
    bp.s = detail::clamp_unit(s, "s");
    bp.s_bar = s_bar;
    bp.delta = delta;

    if (vp > 0.0) {
        bp.u1 = spec.mean_p + spec.sigma_p * std::sqrt(bp.r_bar / bp.r);
        bp.u2 = spec.mean_p - spec.sigma_p * std::sqrt(bp.r / bp.r_bar);
    } else if (bp.r == 1.0) {
        // R is the point mass at u1 = mean_p; u2 from S's mean equation.
        bp.u1 = spec.mean_p;
        bp.u2 = spec.mean_q - vq / a;
    } else {
        // r = 0: R sits at u2 = mean_p.
        bp.u2 = spec.mean_p;
        bp.u1 = spec.mean_q - vq / a;
    }
    return bp;
}

/// The two-point measures of a BinaryPair, on the shared support {u2, u1}.
inline MeasurePair to_measure_pair(const BinaryPair& bp) {
    return MeasurePair(
        DiscreteMeasure::from_canonical({bp.u2, bp.u1}, {bp.r_bar, bp.r}),
        DiscreteMeasure::from_canonical({bp.u2, bp.u1}, {bp.s_bar, bp.s}));
}

namespace detail {

/// Binary alpha-divergence evaluated from the full-precision masses and gap
/// of a BinaryPair.
inline ExtendedValue binary_alpha_from_pair(const BinaryPair& bp, double alpha) {
    double v = 0.0;
    if (std::fabs(alpha - 1.0) <= kOrderBranchTolerance) {
        double y1 = bp.s > 0.0 ? bp.delta / bp.s : 0.0;
        double y2 = bp.s_bar > 0.0 ? -bp.delta / bp.s_bar : 0.0;
        v = kl_point_term_y(bp.r, bp.s, y1) +
            kl_point_term_y(bp.r_bar, bp.s_bar, y2);
    } else if (std::fabs(alpha) <= kOrderBranchTolerance) {
        double y1 = bp.r > 0.0 ? -bp.delta / bp.r : 0.0;
        double y2 = bp.r_bar > 0.0 ? bp.delta / bp.r_bar : 0.0;
        v = kl_point_term_y(bp.s, bp.r, y1) +
            kl_point_term_y(bp.s_bar, bp.r_bar, y2);
    } else {
        double x1 = bp.r > 0.0 ? -bp.delta / bp.r : 0.0;
        double x2 = bp.r_bar > 0.0 ? bp.delta / bp.r_bar : 0.0;
        v = alpha_point_term_x(bp.r, bp.s, x1, alpha) +
            alpha_point_term_x(bp.r_bar, bp.s_bar, x2, alpha);
    }
    if (std::isinf(v)) return ExtendedValue::infinity();
    return ExtendedValue::of(v);
}

inline ExtendedValue binary_renyi_from_pair(const BinaryPair& bp, double a) {
    if (a <= kOrderBranchTolerance) {
        if (bp.r > 0.0 && bp.r_bar > 0.0) return ExtendedValue::of(0.0);
        double mass = (bp.r > 0.0 ? bp.s : 0.0) + (bp.r_bar > 0.0 ? bp.s_bar : 0.0);
        if (mass <= 0.0) return ExtendedValue::infinity();
        return ExtendedValue::of(-std::log(std::min(mass, 1.0)));
    }
    if (std::fabs(a - 1.0) <= kOrderBranchTolerance)
        return binary_alpha_from_pair(bp, 1.0);
    ExtendedValue d = binary_alpha_from_pair(bp, a);
    if (d.is_infinite()) return ExtendedValue::infinity();
    double arg = a * (a - 1.0) * d.value();
    if (arg > -0.5 && arg < 1.0)
        return ExtendedValue::of(std::log1p(arg) / (a - 1.0));
    double sum = 0.0;
    auto power = [&](double pp, double qq) -> double {
        if (pp <= 0.0) return 0.0;
        if (qq <= 0.0) return a > 1.0 ? inf() : 0.0;
        return std::exp(a * std::log(pp) + (1.0 - a) * std::log(qq));
    };
    sum = power(bp.r, bp.s) + power(bp.r_bar, bp.s_bar);
    if (std::isinf(sum)) return ExtendedValue::infinity();
    if (sum <= 0.0) return ExtendedValue::infinity();
    return ExtendedValue::of(std::log(sum) / (a - 1.0));
}

}  // namespace detail

/// A moment-constrained lower bound: the value, whether tightness is
/// guaranteed at this order (alpha in [-1,2] for alpha-divergences, [0,2]
/// for Renyi), and the extremal pair witnessing it. equal_means marks the
/// degenerate zero bound, which carries no witness.
struct BoundReport {
    ExtendedValue bound;
    bool tight_guaranteed = false;
    bool equal_means = false;
    std::optional<BinaryPair> witness;
};

/// Lower bound for D_A^(alpha) under the moment constraints. Outside
/// [-1,2] the binary value is still returned (it is the divergence of the
/// witness pair) with tight_guaranteed = false.
inline BoundReport alpha_lower_bound(const MomentSpec& spec, double alpha) {
    if (!std::isfinite(alpha))
        throw std::invalid_argument("alpha-divergence order must be finite");
    validate(spec);
    const bool guaranteed = alpha >= -1.0 && alpha <= 2.0;
    if (std::fabs(spec.mean_p - spec.mean_q) <= kEqualMeansTolerance)
        return {ExtendedValue::of(0.0), guaranteed, true, std::nullopt};
    BinaryPair bp = binary_pair_from_moments(spec);
    return {detail::binary_alpha_from_pair(bp, alpha), guaranteed, false, bp};
}

/// Lower bound for the Renyi divergence; only orders in [0,2] are covered
/// by the tightness result and anything else is rejected.
inline BoundReport renyi_lower_bound(const MomentSpec& spec, AlphaOrder order) {
    validate(spec);
    if (order.is_infinity() || order.value() < 0.0 || order.value() > 2.0)
        throw InvalidOrder("Renyi lower bound requires an order in [0,2]");
    if (std::fabs(spec.mean_p - spec.mean_q) <= kEqualMeansTolerance)
        return {ExtendedValue::of(0.0), true, true, std::nullopt};
    BinaryPair bp = binary_pair_from_moments(spec);
    return {detail::binary_renyi_from_pair(bp, order.value()), true, false, bp};
}

/// a^2 / (2 sigma_q^2): the chi-squared (alpha = 2) bound in closed form.
/// +infinity when sigma_q = 0.
inline double chi2_bound_closed_form(const MomentSpec& spec) {
    validate(spec);
    double a = spec.mean_p - spec.mean_q;
    if (std::fabs(a) <= kEqualMeansTolerance)
        throw EqualMeans("chi-squared closed form requires mean_p != mean_q");
    if (spec.sigma_q == 0.0) return detail::inf();
    return a * a / (2.0 * spec.sigma_q * spec.sigma_q);
}

/// 4 (1 - sqrt(B / (a^2 + B))) with B = (sigma_p + sigma_q)^2: the
/// Hellinger-type (alpha = 1/2) bound. Evaluated via the conjugate ratio,
/// which keeps full relative precision when a^2 << B.
inline double hellinger_bound_closed_form(const MomentSpec& spec) {
    validate(spec);
    double a = spec.mean_p - spec.mean_q;
    if (std::fabs(a) <= kEqualMeansTolerance)
        throw EqualMeans("Hellinger closed form requires mean_p != mean_q");
    double b = (spec.sigma_p + spec.sigma_q) * (spec.sigma_p + spec.sigma_q);
    double den = a * a + b;
    return 4.0 * (a * a) / (den * (1.0 + std::sqrt(b / den)));
}

}  // namespace alphadiv
