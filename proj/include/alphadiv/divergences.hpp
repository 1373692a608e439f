#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "alphadiv/extended_value.hpp"
#include "alphadiv/measures.hpp"

namespace alphadiv {

/// Orders within this distance of 0 or 1 dispatch to the exact limit branch
/// (reverse KL / KL); the generic power-sum formula cancels catastrophically
/// there.
inline constexpr double kOrderBranchTolerance = 1e-12;

namespace detail {

inline double inf() { return std::numeric_limits<double>::infinity(); }

/// sum_{k>=2} c_k x^k with c_2 = 1/2 and c_{k+1} = c_k (1-alpha-k)/(k+1).
/// Equals [(1+x)^{1-alpha} - 1 - (1-alpha) x] / (alpha (alpha-1)) for
/// x > -1; every term carries the alpha(alpha-1) factor, so the limit
/// ratio is formed without the cancellation of the direct expression.
inline double alpha_series(double x, double alpha) {
    double c = 0.5;
    double xp = x * x;
    double sum = c * xp;
    for (int k = 2; k < 400; ++k) {
        c *= (1.0 - alpha - k) / (k + 1);
        xp *= x;
        double next = sum + c * xp;
        if (next == sum) break;
        sum = next;
    }
    return sum;
}

/// Per-point contribution to D_A^(alpha) for alpha outside {0,1}, with the
/// zero-mass conventions folded in. The total over a shared support equals
/// (sum p^a q^(1-a) - 1)/(a(a-1)); each contribution is nonnegative.
/// `x` must equal (q-p)/p whenever p,q > 0 (passed separately so callers
/// that know the gap to full precision can supply it).
inline double alpha_point_term_x(double p, double q, double x, double alpha) {
    if (p <= 0.0 && q <= 0.0) return 0.0;
    if (q <= 0.0) return alpha > 1.0 ? inf() : p / (1.0 - alpha);
    if (p <= 0.0) return alpha < 0.0 ? inf() : q / alpha;
    if (std::fabs(x) <= 0.5 && std::fabs(alpha) <= 12.0)
        return p * alpha_series(x, alpha);
    double g = std::exp(alpha * std::log(p) + (1.0 - alpha) * std::log(q));
    return (g - alpha * p - (1.0 - alpha) * q) / (alpha * (alpha - 1.0));
}

inline double alpha_point_term(double p, double q, double alpha) {
    double x = (p > 0.0 && q > 0.0) ? (q - p) / p : 0.0;
    return alpha_point_term_x(p, q, x, alpha);
}

/// q * phi(p/q) with phi(t) = t log t - t + 1 >= 0; per-point KL
/// contribution (the linear correction telescopes away over a shared
/// support). `y` must equal (p-q)/q when p,q > 0.
inline double kl_point_term_y(double p, double q, double y) {
    if (p <= 0.0 && q <= 0.0) return 0.0;
    if (q <= 0.0) return inf();
    if (p <= 0.0) return q;  // phi(0) = 1
    if (std::fabs(y) <= 0.5) {
        // phi(1+y) = sum_{k>=2} (-1)^k y^k / (k (k-1))
        double yp = y * y;
        double sum = 0.5 * yp;
        for (int k = 3; k < 200; ++k) {
            yp *= -y;
            double next = sum + yp / (k * (k - 1.0));
            if (next == sum) break;
            sum = next;
        }
        return q * sum;
    }
    return p * std::log(p / q) - (p - q);
}

inline double kl_point_term(double p, double q) {
    double y = (p > 0.0 && q > 0.0) ? (p - q) / q : 0.0;
    return kl_point_term_y(p, q, y);
}

/// Raw alpha-divergence over shared-support weight arrays. Returns the
/// (possibly infinite) sum of nonnegative contributions; order branching at
/// 0 and 1 included.
inline double alpha_div_arrays(const double* p, const double* q, std::size_t n,
                               double alpha) {
    double total = 0.0;
    if (std::fabs(alpha - 1.0) <= kOrderBranchTolerance) {
        for (std::size_t i = 0; i < n; ++i) {
            double term = kl_point_term(p[i], q[i]);
            if (std::isinf(term)) return inf();
            total += term;
        }
    } else if (std::fabs(alpha) <= kOrderBranchTolerance) {
        for (std::size_t i = 0; i < n; ++i) {
            double term = kl_point_term(q[i], p[i]);
            if (std::isinf(term)) return inf();
            total += term;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            double term = alpha_point_term(p[i], q[i], alpha);
            if (std::isinf(term)) return inf();
            total += term;
        }
    }
    return total;
}

}  // namespace detail

/// Generic f-divergence sum q f(p/q) with the standard zero-mass
/// conventions: a 0/0 point contributes nothing, q=0<p contributes
/// p*slope_at_inf, and p=0<q contributes q*f_at_0. `f` must be convex with
/// f(1)=0; `f_at_0` and `slope_at_inf` may be +infinity.
template <class F>
ExtendedValue f_divergence(const MeasurePair& pair, F&& f, double f_at_0,
                           double slope_at_inf) {
    double total = 0.0;
    for (std::size_t i = 0; i < pair.size(); ++i) {
        double p = pair.p().weights()[i], q = pair.q().weights()[i];
        double term;
        if (p <= 0.0 && q <= 0.0)
            term = 0.0;
        else if (q <= 0.0)
            term = p * slope_at_inf;
        else if (p <= 0.0)
            term = q * f_at_0;
        else
            term = q * f(p / q);
        if (std::isinf(term)) return ExtendedValue::infinity();
        total += term;
    }
    return ExtendedValue::of(total);
}

/// Alpha-divergence D_A^(alpha)(P||Q): the power-sum form for orders outside
/// {0,1}, reverse KL at 0, KL at 1. Infinite on mass mismatches outside the
/// finite range (q=0<p with alpha>1, p=0<q with alpha<0).
inline ExtendedValue alpha_divergence(const MeasurePair& pair, double alpha) {
    if (!std::isfinite(alpha))
        throw std::invalid_argument("alpha-divergence order must be finite");
    double v = detail::alpha_div_arrays(pair.p().weights().data(),
                                        pair.q().weights().data(), pair.size(),
                                        alpha);
    if (std::isinf(v)) return ExtendedValue::infinity();
    return ExtendedValue::of(v);
}

/// Kullback-Leibler divergence D(P||Q) = D_A^(1)(P||Q).
inline ExtendedValue kl_divergence(const MeasurePair& pair) {
    return alpha_divergence(pair, 1.0);
}

/// Renyi divergence of order alpha >= 0 or infinity. Simple orders use the
/// direct power sum (stable when the sum is far from 1) and switch to the
/// log1p form in terms of the alpha-divergence when the sum is near 1,
/// where the direct route would cancel.
inline ExtendedValue renyi_divergence(const MeasurePair& pair, AlphaOrder order) {
    const double* p = pair.p().weights().data();
    const double* q = pair.q().weights().data();
    std::size_t n = pair.size();

    if (order.is_infinity()) {
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (p[i] <= 0.0) continue;
            if (q[i] <= 0.0) return ExtendedValue::infinity();
            best = std::max(best, p[i] / q[i]);
        }
        return ExtendedValue::of(std::log(best));
    }

    double a = order.value();
    if (a < -kOrderBranchTolerance)
        throw InvalidOrder("Renyi order must be >= 0, got " + std::to_string(a));
    if (a <= kOrderBranchTolerance) {
        double mass = 0.0;  // Q(p > 0)
        for (std::size_t i = 0; i < n; ++i)
            if (p[i] > 0.0) mass += q[i];
        if (mass <= 0.0) return ExtendedValue::infinity();
        return ExtendedValue::of(-std::log(std::min(mass, 1.0)));
    }
    if (std::fabs(a - 1.0) <= kOrderBranchTolerance) return kl_divergence(pair);

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] <= 0.0) continue;  // 0^a q^(1-a) = 0 for a > 0
        if (q[i] <= 0.0) {
            if (a > 1.0) return ExtendedValue::infinity();
            continue;
        }
        sum += std::exp(a * std::log(p[i]) + (1.0 - a) * std::log(q[i]));
    }
    if (sum <= 0.0) return ExtendedValue::infinity();
    if (sum >= 0.5 && sum <= 2.0) {
        double d = detail::alpha_div_arrays(p, q, n, a);
        return ExtendedValue::of(std::log1p(a * (a - 1.0) * d) / (a - 1.0));
    }
    return ExtendedValue::of(std::log(sum) / (a - 1.0));
}

namespace detail {

inline void check_unit_prob(double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0))
        throw std::invalid_argument(std::string(name) +
                                    " must lie in [0,1], got " + std::to_string(r));
}

/// Clamps boundary dust within 1e-12 of {0,1}; larger excursions are the
/// caller's bug.
inline double clamp_unit(double r, const char* name) {
    if (r > -1e-12 && r < 0.0) return 0.0;
    if (r > 1.0 && r < 1.0 + 1e-12) return 1.0;
    check_unit_prob(r, name);
    return r;
}

}  // namespace detail

/// Binary alpha-divergence d_A^(alpha)(r||s) between the two-point measures
/// (r, 1-r) and (s, 1-s) on a common 2-point set.
inline ExtendedValue binary_alpha_divergence(double r, double s, double alpha) {
    if (!std::isfinite(alpha))
        throw std::invalid_argument("alpha-divergence order must be finite");
    r = detail::clamp_unit(r, "r");
    s = detail::clamp_unit(s, "s");
    double v = 0.0;
    if (std::fabs(alpha - 1.0) <= kOrderBranchTolerance)
        v = detail::kl_point_term(r, s) + detail::kl_point_term(1.0 - r, 1.0 - s);
    else if (std::fabs(alpha) <= kOrderBranchTolerance)
        v = detail::kl_point_term(s, r) + detail::kl_point_term(1.0 - s, 1.0 - r);
    else
        v = detail::alpha_point_term(r, s, alpha) +
            detail::alpha_point_term(1.0 - r, 1.0 - s, alpha);
    if (std::isinf(v)) return ExtendedValue::infinity();
    return ExtendedValue::of(v);
}

/// Binary Renyi divergence d_R^(alpha)(r||s) for orders in [0, infinity].
inline ExtendedValue binary_renyi_divergence(double r, double s, AlphaOrder order) {
    r = detail::clamp_unit(r, "r");
    s = detail::clamp_unit(s, "s");

    if (order.is_infinity()) {
        double best = 0.0;
        bool hit = false;
        if (r > 0.0) {
            if (s <= 0.0) return ExtendedValue::infinity();
            best = r / s;
            hit = true;
        }
        if (1.0 - r > 0.0) {
            if (1.0 - s <= 0.0) return ExtendedValue::infinity();
            best = hit ? std::max(best, (1.0 - r) / (1.0 - s)) : (1.0 - r) / (1.0 - s);
        }
        return ExtendedValue::of(std::log(best));
    }

    double a = order.value();
    if (a < -kOrderBranchTolerance)
        throw InvalidOrder("Renyi order must be >= 0, got " + std::to_string(a));
    if (a <= kOrderBranchTolerance) {
        // -log( s 1{r>0} + (1-s) 1{1-r>0} )
        if (r > 0.0 && r < 1.0) return ExtendedValue::of(0.0);
        double mass = (r > 0.0 ? s : 0.0) + (r < 1.0 ? 1.0 - s : 0.0);
        if (mass <= 0.0) return ExtendedValue::infinity();
        return ExtendedValue::of(-std::log(std::min(mass, 1.0)));
    }
    if (std::fabs(a - 1.0) <= kOrderBranchTolerance)
        return binary_alpha_divergence(r, s, 1.0);

    auto power = [&](double pp, double qq) -> double {
        if (pp <= 0.0) return 0.0;
        if (qq <= 0.0) return a > 1.0 ? detail::inf() : 0.0;
        return std::exp(a * std::log(pp) + (1.0 - a) * std::log(qq));
    };
    double sum = power(r, s) + power(1.0 - r, 1.0 - s);
    if (std::isinf(sum)) return ExtendedValue::infinity();
    if (sum <= 0.0) return ExtendedValue::infinity();
    if (sum >= 0.5 && sum <= 2.0) {
        ExtendedValue d = binary_alpha_divergence(r, s, a);
        return ExtendedValue::of(std::log1p(a * (a - 1.0) * d.value()) / (a - 1.0));
    }
    return ExtendedValue::of(std::log(sum) / (a - 1.0));
}

}  // namespace alphadiv
