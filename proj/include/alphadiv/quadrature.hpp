#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "alphadiv/errors.hpp"

namespace alphadiv {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    int intervals = 0;
};

namespace detail {

// 7-15 Gauss-Kronrod abscissae and weights (Fullerton, 80-digit arithmetic).
inline constexpr double kGk15X[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kGk15Wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kGk15Wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

}  // namespace detail

/// One 15-point Kronrod panel over [a,b] with the embedded 7-point Gauss
/// error estimate (QUADPACK dqk15 scaling).
template <class F>
QuadratureResult gauss_kronrod_15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    double fv[15];
    double fc = f(c);
    double resk = detail::kGk15Wk[7] * fc;
    double resg = detail::kGk15Wg[3] * fc;
    fv[14] = fc;
    for (int i = 0; i < 7; ++i) {
        double dx = h * detail::kGk15X[i];
        double f1 = f(c - dx), f2 = f(c + dx);
        fv[2 * i] = f1;
        fv[2 * i + 1] = f2;
        resk += detail::kGk15Wk[i] * (f1 + f2);
        if (i % 2 == 1) resg += detail::kGk15Wg[i / 2] * (f1 + f2);
    }
    double value = resk * h;
    double reskh = resk * 0.5;
    double resasc = detail::kGk15Wk[7] * std::fabs(fc - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += detail::kGk15Wk[i] *
                  (std::fabs(fv[2 * i] - reskh) + std::fabs(fv[2 * i + 1] - reskh));
    resasc *= std::fabs(h);
    double err = std::fabs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    return {value, err, 15, 1};
}

/// Adaptive bisection on [a,b] until the summed panel error drops under
/// max(abs_tol, rel_tol * |integral|).
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol,
                                    double abs_tol = 0.0,
                                    int max_intervals = 4000) {
    struct Seg {
        double a, b, value, err;
    };
    QuadratureResult first = gauss_kronrod_15(f, a, b);
    std::vector<Seg> segs{{a, b, first.value, first.error_estimate}};
    long evals = first.evaluations;
    int splits = 0;
    while (splits < max_intervals) {
        double total = 0.0, err = 0.0, resabs = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].value;
            err += segs[i].err;
            resabs += std::fabs(segs[i].value);
            if (segs[i].err > segs[worst].err) worst = i;
        }
        // the resabs term accepts cancellation-limited integrals near zero
        if (err <= std::max({abs_tol, rel_tol * std::fabs(total),
                             rel_tol * resabs}) ||
            segs[worst].err == 0.0)
            return {total, err, evals, static_cast<int>(segs.size())};
        Seg w = segs[worst];
        double mid = 0.5 * (w.a + w.b);
        if (mid <= w.a || mid >= w.b)
            return {total, err, evals, static_cast<int>(segs.size())};
        QuadratureResult left = gauss_kronrod_15(f, w.a, mid);
        QuadratureResult right = gauss_kronrod_15(f, mid, w.b);
        evals += left.evaluations + right.evaluations;
        segs[worst] = {w.a, mid, left.value, left.error_estimate};
        segs.push_back({mid, w.b, right.value, right.error_estimate});
        ++splits;
    }
    double total = 0.0, err = 0.0;
    for (const Seg& s : segs) total += s.value, err += s.err;
    throw QuadratureNonConvergence("adaptive quadrature error " +
                                   std::to_string(err) + " after " +
                                   std::to_string(max_intervals) + " splits");
}

/// Integral of f over (0, t] where f(s) ~ C s^exponent as s -> 0 with
/// exponent > -1 (integrable endpoint). Dyadic panels [t 2^-(k+1), t 2^-k]
/// march toward the singular endpoint; the remaining tail is a geometric
/// series with ratio 2^-(exponent+1) and is added by extrapolation once its
/// own uncertainty is inside the tolerance.
template <class F>
QuadratureResult integrate_singular_lower(F&& f, double t, double exponent,
                                          double rel_tol, int max_panels = 1100) {
    if (!(exponent > -1.0))
        throw std::invalid_argument("endpoint exponent must be > -1");
    if (!(t > 0.0)) throw std::invalid_argument("upper limit must be positive");

    const double rho_inf = std::pow(2.0, -(exponent + 1.0));
    double acc = 0.0, err_acc = 0.0;
    long evals = 0;
    int intervals = 0;
    double prev_panel = 0.0;
    double hi = t;
    for (int k = 0; k < max_panels; ++k) {
        double lo = 0.5 * hi;
        QuadratureResult panel = integrate_adaptive(f, lo, hi, rel_tol * 0.05);
        acc += panel.value;
        err_acc += panel.error_estimate;
        evals += panel.evaluations;
        intervals += panel.intervals;

        if (k >= 3) {
            if (panel.value == 0.0 && acc == 0.0)
                return {0.0, err_acc, evals, intervals};
            double rho_hat = prev_panel != 0.0 ? panel.value / prev_panel : rho_inf;
            if (!(rho_hat > 0.0 && rho_hat < 0.999)) rho_hat = rho_inf;
            double rho_m = std::min(std::max(rho_hat, rho_inf), 0.999);
            double tail = panel.value * rho_hat / (1.0 - rho_hat);
            double tail_err = std::fabs(panel.value) *
                                  std::fabs(rho_hat - rho_inf) /
                                  ((1.0 - rho_m) * (1.0 - rho_m)) +
                              std::fabs(tail) * 1e-14;
            if (tail_err + err_acc <= rel_tol * std::fabs(acc + tail)) {
                return {acc + tail, tail_err + err_acc, evals, intervals};
            }
        }
        prev_panel = panel.value;
        hi = lo;
    }
    throw QuadratureNonConvergence(
        "singular-endpoint integral did not settle after " +
        std::to_string(max_panels) + " dyadic panels");
}

}  // namespace alphadiv
