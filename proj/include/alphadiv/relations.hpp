#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "alphadiv/divergences.hpp"
#include "alphadiv/measures.hpp"
#include "alphadiv/quadrature.hpp"

namespace alphadiv {

/// One verified identity: both sides, absolute and relative residual, and a
/// short description of the numerical method that produced the right side.
struct RelationResidual {
    double lhs = 0.0;
    double rhs = 0.0;
    double abs_residual = 0.0;
    double rel_residual = 0.0;
    std::string method_detail;
};

/// Fitted small-t behaviour of the divergence along the mixture path.
struct SmallTOrder {
    double slope = 0.0;        // log-log slope of t^(alpha-1) D_A^(alpha)(P||Q_t)
    double limit_ratio = 0.0;  // D/t^2 at t=1e-4 over its t->0 limit
};

namespace detail {

inline RelationResidual make_residual(double lhs, double rhs,
                                      std::string method) {
    RelationResidual r;
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_residual = std::fabs(lhs - rhs);
    r.rel_residual =
        r.abs_residual / std::max({std::fabs(lhs), std::fabs(rhs), 1e-300});
    r.method_detail = std::move(method);
    return r;
}

/// D_A^(alpha) along the segment. move_first=false evaluates
/// D_A(P || (Q-P)t+P); move_first=true evaluates D_A((P-Q)t+Q || Q).
/// t may exceed 1 by a finite-difference step as long as the path weights
/// stay nonnegative. The relative offsets handed to the point kernels are
/// formed from t (q-p)/p directly: recovering them from the rounded path
/// weight would cost a factor t in relative precision and the quadrature
/// needs the integrand clean down to t ~ 1e-20.
inline double alpha_div_on_path(const MeasurePair& pair, double t, double alpha,
                                bool move_first) {
    std::size_t n = pair.size();
    const double* p = pair.p().weights().data();
    const double* q = pair.q().weights().data();
    const bool kl_branch = std::fabs(alpha - 1.0) <= kOrderBranchTolerance;
    const bool rkl_branch = std::fabs(alpha) <= kOrderBranchTolerance;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double base = move_first ? q[i] : p[i];
        double target = move_first ? p[i] : q[i];
        double fixed = move_first ? q[i] : p[i];  // non-moving argument weight
        double w = base + t * (target - base);
        if (w < 0.0) {
            if (w < -1e-15)
                throw StepTooLarge("path weight " + std::to_string(w) +
                                   " negative at t=" + std::to_string(t));
            w = 0.0;
        }
        // moving weight w plays q for the forward path, p for the backward
        double term;
        if (!move_first) {
            double x = fixed > 0.0 ? t * (target - base) / fixed : 0.0;
            if (kl_branch)
                term = kl_point_term_y(fixed, w, w > 0.0 ? -x * fixed / w : 0.0);
            else if (rkl_branch)
                term = kl_point_term_y(w, fixed, x);
            else
                term = alpha_point_term_x(fixed, w, x, alpha);
        } else {
            double y = fixed > 0.0 ? t * (target - base) / fixed : 0.0;
            if (kl_branch)
                term = kl_point_term_y(w, fixed, y);
            else if (rkl_branch)
                term = kl_point_term_y(fixed, w, w > 0.0 ? -y * fixed / w : 0.0);
            else
                term = alpha_point_term_x(w, fixed,
                                          w > 0.0 ? -y * fixed / w : 0.0, alpha);
        }
        if (std::isinf(term)) return term;
        total += term;
    }
    return total;
}

inline double require_finite(double v, const char* what) {
    if (std::isinf(v))
        throw InfiniteDivergence(std::string(what) +
                                 " is infinite along the path");
    return v;
}

inline double default_step(double t, double h) {
    return h > 0.0 ? h : 1e-5 * std::max(t, 1.0);
}

inline void check_t_domain(double t) {
    if (!(t > 0.0 && t <= 1.0))
        throw std::invalid_argument("path parameter t=" + std::to_string(t) +
                                    " outside (0,1]");
}

inline std::string fmt_step(double h, bool richardson) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "central-diff h=%.3g%s", h,
                  richardson ? " richardson" : "");
    return buf;
}

}  // namespace detail

/// Differential relation along Q_t = (Q-P)t+P:
///   D_A^(alpha+1)(P||Q_t) = t^(2-alpha)/(alpha+1) d/dt[ t^(alpha-1) D_A^(alpha)(P||Q_t) ]
/// for alpha != -1. The derivative is a central difference of step h
/// (default 1e-5 max(t,1)), optionally Richardson-extrapolated.
inline RelationResidual check_diff_relation_fwd(const MeasurePair& pair,
                                                double alpha, double t,
                                                double h = 0.0,
                                                bool richardson = false) {
    if (std::fabs(alpha + 1.0) <= 1e-12)
        throw std::invalid_argument(
            "forward differential relation excludes alpha = -1");
    detail::check_t_domain(t);
    h = detail::default_step(t, h);
    if (t - h <= 0.0)
        throw StepTooLarge("step h=" + std::to_string(h) +
                           " does not fit below t=" + std::to_string(t));

    auto g = [&](double tau) {
        double d = detail::require_finite(
            detail::alpha_div_on_path(pair, tau, alpha, false), "D_A^(alpha)");
        return std::pow(tau, alpha - 1.0) * d;
    };
    auto diff = [&](double step) { return (g(t + step) - g(t - step)) / (2.0 * step); };
    double deriv = richardson ? (4.0 * diff(0.5 * h) - diff(h)) / 3.0 : diff(h);

    double lhs = detail::require_finite(
        detail::alpha_div_on_path(pair, t, alpha + 1.0, false), "D_A^(alpha+1)");
    double rhs = std::pow(t, 2.0 - alpha) / (alpha + 1.0) * deriv;
    return detail::make_residual(lhs, rhs, detail::fmt_step(h, richardson));
}

/// Mirror relation along P_t = (P-Q)t+Q:
///   D_A^(alpha)(P_t||Q) = t^(2+alpha)/(1-alpha) d/dt[ t^(-alpha-1) D_A^(alpha+1)(P_t||Q) ]
/// for alpha != 1.
inline RelationResidual check_diff_relation_bwd(const MeasurePair& pair,
                                                double alpha, double t,
                                                double h = 0.0,
                                                bool richardson = false) {
    if (std::fabs(alpha - 1.0) <= 1e-12)
        throw std::invalid_argument(
            "backward differential relation excludes alpha = 1");
    detail::check_t_domain(t);
    h = detail::default_step(t, h);
    if (t - h <= 0.0)
        throw StepTooLarge("step h=" + std::to_string(h) +
                           " does not fit below t=" + std::to_string(t));

    auto g = [&](double tau) {
        double d = detail::require_finite(
            detail::alpha_div_on_path(pair, tau, alpha + 1.0, true),
            "D_A^(alpha+1)");
        return std::pow(tau, -alpha - 1.0) * d;
    };
    auto diff = [&](double step) { return (g(t + step) - g(t - step)) / (2.0 * step); };
    double deriv = richardson ? (4.0 * diff(0.5 * h) - diff(h)) / 3.0 : diff(h);

    double lhs = detail::require_finite(
        detail::alpha_div_on_path(pair, t, alpha, true), "D_A^(alpha)");
    double rhs = std::pow(t, 2.0 + alpha) / (1.0 - alpha) * deriv;
    return detail::make_residual(lhs, rhs, detail::fmt_step(h, richardson));
}

/// Integral relation along Q_t for alpha > -1:
///   D_A^(alpha)(P||Q_t) = (alpha+1) t^(1-alpha) int_0^t s^(alpha-2) D_A^(alpha+1)(P||Q_s) ds.
/// The integrand behaves as s^alpha near 0 (the divergence vanishes to
/// second order there), which drives the dyadic endpoint scheme.
inline RelationResidual check_integral_relation(const MeasurePair& pair,
                                                double alpha, double t,
                                                double rel_tol = 1e-12) {
    if (!(alpha > -1.0))
        throw std::invalid_argument("integral relation requires alpha > -1");
    detail::check_t_domain(t);
    auto integrand = [&](double s) {
        double d = detail::require_finite(
            detail::alpha_div_on_path(pair, s, alpha + 1.0, false),
            "D_A^(alpha+1)");
        return std::pow(s, alpha - 2.0) * d;
    };
    QuadratureResult quad =
        integrate_singular_lower(integrand, t, alpha, rel_tol);
    double lhs = detail::require_finite(
        detail::alpha_div_on_path(pair, t, alpha, false), "D_A^(alpha)");
    double rhs = (alpha + 1.0) * std::pow(t, 1.0 - alpha) * quad.value;
    char buf[96];
    std::snprintf(buf, sizeof buf, "gk15 dyadic intervals=%d evals=%ld",
                  quad.intervals, quad.evaluations);
    return detail::make_residual(lhs, rhs, buf);
}

/// Mirror integral relation along P_t for alpha < 1:
///   D_A^(alpha+1)(P_t||Q) = (1-alpha) t^(1+alpha) int_0^t s^(-alpha-2) D_A^(alpha)(P_s||Q) ds.
inline RelationResidual check_integral_relation_bwd(const MeasurePair& pair,
                                                    double alpha, double t,
                                                    double rel_tol = 1e-12) {
    if (!(alpha < 1.0))
        throw std::invalid_argument(
            "backward integral relation requires alpha < 1");
    detail::check_t_domain(t);
    auto integrand = [&](double s) {
        double d = detail::require_finite(
            detail::alpha_div_on_path(pair, s, alpha, true), "D_A^(alpha)");
        return std::pow(s, -alpha - 2.0) * d;
    };
    QuadratureResult quad =
        integrate_singular_lower(integrand, t, -alpha, rel_tol);
    double lhs = detail::require_finite(
        detail::alpha_div_on_path(pair, t, alpha + 1.0, true), "D_A^(alpha+1)");
    double rhs = (1.0 - alpha) * std::pow(t, 1.0 + alpha) * quad.value;
    char buf[96];
    std::snprintf(buf, sizeof buf, "gk15 dyadic intervals=%d evals=%ld",
                  quad.intervals, quad.evaluations);
    return detail::make_residual(lhs, rhs, buf);
}

/// Log-log regression of t^(alpha-1) D_A^(alpha)(P||Q_t) over
/// t in [1e-4, 1e-2]; the slope estimates alpha+1. Also compares
/// D/t^2 at t=1e-4 against its t->0 limit, half the chi-squared sum
/// sum (q-p)^2 / p.
inline SmallTOrder small_t_order(const MeasurePair& pair, double alpha) {
    if (weights_equal(pair)) throw DegeneratePath("P = Q: path is constant");

    std::vector<double> xs, ys;
    for (int k = 0; k <= 8; ++k) {
        double t = 1e-4 * std::pow(10.0, 0.25 * k);
        double d = detail::require_finite(
            detail::alpha_div_on_path(pair, t, alpha, false), "D_A^(alpha)");
        if (d <= 0.0)
            throw DegeneratePath("divergence vanished at t=" + std::to_string(t));
        xs.push_back(std::log(t));
        ys.push_back((alpha - 1.0) * std::log(t) + std::log(d));
    }
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    double limit = 0.0;  // (1/2) sum (q-p)^2 / p over the joint support
    for (std::size_t i = 0; i < pair.size(); ++i) {
        double p = pair.p().weights()[i], q = pair.q().weights()[i];
        if (p <= 0.0) {
            if (q > 0.0)
                throw DegeneratePath("limit constant infinite: q>0 where p=0");
            continue;
        }
        limit += 0.5 * (q - p) * (q - p) / p;
    }
    double t0 = 1e-4;
    double d0 = detail::alpha_div_on_path(pair, t0, alpha, false);
    return {slope, d0 / (t0 * t0) / limit};
}

}  // namespace alphadiv
