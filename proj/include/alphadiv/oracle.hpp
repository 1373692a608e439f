#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "alphadiv/bounds.hpp"
#include "alphadiv/divergences.hpp"
#include "alphadiv/measures.hpp"
#include "alphadiv/rng.hpp"

namespace alphadiv {

/// Brute-force sweep configuration. The grid spans [-support_radius,
/// support_radius] with grid_points_per_axis values per axis; random
/// restarts draw whole supports uniformly from the same box, seeded
/// deterministically. threads = 0 picks the hardware count; the reduction
/// is deterministic either way.
struct SearchConfig {
    double support_radius = 6.0;
    int grid_points_per_axis = 25;
    int support_size = 3;  // 3 or 4
    int random_restarts = 0;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct SearchResult {
    ExtendedValue best_value;
    std::optional<MeasurePair> best_pair;
    ExtendedValue bound_value;
    double gap = 0.0;  // best_value - bound_value
    long evaluations = 0;
    double feasibility_ratio = 0.0;
};

/// Weights solving sum w_i u_i^k = (1, mean, variance + mean^2) for
/// k = 0,1,2 on three distinct support points; the 3x3 Vandermonde system
/// has the closed-form Lagrange solution. Returns nullopt when the unique
/// solution has a weight below -1e-10 (the moment pair is infeasible on
/// this support); weights within [-1e-10, 0) are clamped to zero.
inline std::optional<std::array<double, 3>> weights_for_support(
    const std::array<double, 3>& u, double mean, double variance) {
    const double a0 = 1.0, a1 = mean, a2 = variance + mean * mean;
    std::array<double, 3> w{};
    for (int i = 0; i < 3; ++i) {
        double ui = u[i], uj = u[(i + 1) % 3], uk = u[(i + 2) % 3];
        double den = (ui - uj) * (ui - uk);
        if (den == 0.0)
            throw SingularSystem("duplicate support points in moment system");
        w[i] = (a2 - a1 * (uj + uk) + a0 * uj * uk) / den;
    }
    for (double& x : w) {
        if (x < -1e-10) return std::nullopt;
        if (x < 0.0) x = 0.0;
    }
    return w;
}

namespace detail {

struct Candidate {
    double value = inf();
    std::vector<double> support;
    std::vector<double> wp, wq;
    bool feasible = false;

    /// Total order: smaller value first, ties broken by lexicographic
    /// support so parallel sweeps reduce deterministically.
    bool better_than(const Candidate& o) const {
        if (!o.feasible) return feasible;
        if (!feasible) return false;
        if (value != o.value) return value < o.value;
        return support < o.support;
    }
};

inline void eval_support3(const std::array<double, 3>& u, const MomentSpec& spec,
                          double alpha, Candidate& best, long& evals,
                          long& feasible) {
    auto wp = weights_for_support(u, spec.mean_p, spec.sigma_p * spec.sigma_p);
    if (!wp) return;
    auto wq = weights_for_support(u, spec.mean_q, spec.sigma_q * spec.sigma_q);
    if (!wq) return;
    ++feasible;
    ++evals;
    double v = alpha_div_arrays(wp->data(), wq->data(), 3, alpha);
    Candidate c;
    c.value = v;
    c.support.assign(u.begin(), u.end());
    c.wp.assign(wp->begin(), wp->end());
    c.wq.assign(wq->begin(), wq->end());
    c.feasible = true;
    if (c.better_than(best)) best = std::move(c);
}

inline void eval_support4(const std::array<double, 4>& u, const MomentSpec& spec,
                          double alpha, Candidate& best, long& evals,
                          long& feasible) {
    // P and Q each drop one of the four points; the remaining triple
    // determines the weights uniquely. The cell counts as feasible when any
    // drop combination admits both measures.
    bool cell_feasible = false;
    for (int skip_p = 0; skip_p < 4; ++skip_p) {
        std::array<double, 3> up{};
        for (int i = 0, j = 0; i < 4; ++i)
            if (i != skip_p) up[j++] = u[i];
        auto wp3 = weights_for_support(up, spec.mean_p, spec.sigma_p * spec.sigma_p);
        if (!wp3) continue;
        for (int skip_q = 0; skip_q < 4; ++skip_q) {
            std::array<double, 3> uq{};
            for (int i = 0, j = 0; i < 4; ++i)
                if (i != skip_q) uq[j++] = u[i];
            auto wq3 = weights_for_support(uq, spec.mean_q, spec.sigma_q * spec.sigma_q);
            if (!wq3) continue;
            cell_feasible = true;
            ++evals;
            std::array<double, 4> wp{}, wq{};
            for (int i = 0, j = 0; i < 4; ++i) wp[i] = i == skip_p ? 0.0 : (*wp3)[j++];
            for (int i = 0, j = 0; i < 4; ++i) wq[i] = i == skip_q ? 0.0 : (*wq3)[j++];
            double v = alpha_div_arrays(wp.data(), wq.data(), 4, alpha);
            Candidate c;
            c.value = v;
            c.support.assign(u.begin(), u.end());
            c.wp.assign(wp.begin(), wp.end());
            c.wq.assign(wq.begin(), wq.end());
            c.feasible = true;
            if (c.better_than(best)) best = std::move(c);
        }
    }
    if (cell_feasible) ++feasible;
}

}  // namespace detail

/// Sweeps small supports (grid plus seeded random restarts), solves the
/// moment system for the weights of both measures on each support, and
/// reports the smallest divergence found against the binary lower bound.
/// extra_points are appended to the grid axis (used to verify attainment by
/// injecting the extremal support).
inline SearchResult min_search(const MomentSpec& spec, double alpha,
                               const SearchConfig& cfg,
                               const std::vector<double>& extra_points = {}) {
    validate(spec);
    if (std::fabs(spec.mean_p - spec.mean_q) <= kEqualMeansTolerance)
        throw std::invalid_argument("min_search requires mean_p != mean_q");
    if (cfg.grid_points_per_axis < 5)
        throw std::invalid_argument("grid_points_per_axis must be >= 5");
    if (cfg.support_size != 3 && cfg.support_size != 4)
        throw std::invalid_argument("support_size must be 3 or 4");
    double needed = std::max(std::fabs(spec.mean_p) + 3.0 * spec.sigma_p,
                             std::fabs(spec.mean_q) + 3.0 * spec.sigma_q);
    if (!(cfg.support_radius > needed))
        throw std::invalid_argument(
            "support_radius must exceed max(|m|+3 sigma) = " +
            std::to_string(needed));

    const double R = cfg.support_radius;
    std::vector<double> axis;
    axis.reserve(cfg.grid_points_per_axis + extra_points.size());
    for (int i = 0; i < cfg.grid_points_per_axis; ++i)
        axis.push_back(-R + 2.0 * R * i / (cfg.grid_points_per_axis - 1));
    for (double x : extra_points) axis.push_back(x);
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());

    // Materialize every candidate support up front; random cells are drawn
    // sequentially from the seed so the cell list is thread-independent.
    std::vector<std::vector<double>> cells;
    const int m = static_cast<int>(axis.size());
    if (cfg.support_size == 3) {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                for (int k = j + 1; k < m; ++k)
                    cells.push_back({axis[i], axis[j], axis[k]});
    } else {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                for (int k = j + 1; k < m; ++k)
                    for (int l = k + 1; l < m; ++l)
                        cells.push_back({axis[i], axis[j], axis[k], axis[l]});
    }
    SplitMix64 rng(cfg.seed);
    for (int rr = 0; rr < cfg.random_restarts; ++rr) {
        std::vector<double> u(cfg.support_size);
        for (double& x : u) x = rng.uniform(-R, R);
        std::sort(u.begin(), u.end());
        bool ok = true;
        for (std::size_t i = 1; i < u.size(); ++i)
            if (u[i] - u[i - 1] < 1e-9 * R) ok = false;
        if (ok) cells.push_back(std::move(u));
    }

    unsigned hw = std::thread::hardware_concurrency();
    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                         : (hw ? hw : 1u);
    n_threads = std::min<unsigned>(n_threads, 64);
    n_threads = std::max<unsigned>(n_threads, 1);

    std::vector<detail::Candidate> bests(n_threads);
    std::vector<long> evals(n_threads, 0), feas(n_threads, 0);
    auto work = [&](unsigned tid) {
        for (std::size_t c = tid; c < cells.size(); c += n_threads) {
            const std::vector<double>& u = cells[c];
            if (cfg.support_size == 3)
                detail::eval_support3({u[0], u[1], u[2]}, spec, alpha,
                                      bests[tid], evals[tid], feas[tid]);
            else
                detail::eval_support4({u[0], u[1], u[2], u[3]}, spec, alpha,
                                      bests[tid], evals[tid], feas[tid]);
        }
    };
    if (n_threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned tid = 0; tid < n_threads; ++tid)
            pool.emplace_back(work, tid);
        for (auto& th : pool) th.join();
    }

    detail::Candidate best;
    long total_evals = 0, total_feasible = 0;
    for (unsigned tid = 0; tid < n_threads; ++tid) {
        if (bests[tid].better_than(best)) best = bests[tid];
        total_evals += evals[tid];
        total_feasible += feas[tid];
    }
    if (!best.feasible)
        throw NoFeasiblePoint(
            "no support in the sweep admits the requested moments");

    SearchResult out;
    out.best_value = std::isinf(best.value) ? ExtendedValue::infinity()
                                            : ExtendedValue::of(best.value);
    out.best_pair = MeasurePair(
        DiscreteMeasure::from_canonical(best.support, best.wp),
        DiscreteMeasure::from_canonical(best.support, best.wq));
    out.bound_value = alpha_lower_bound(spec, alpha).bound;
    if (out.best_value.is_infinite() && out.bound_value.is_infinite())
        out.gap = 0.0;
    else
        out.gap = out.best_value.value() - out.bound_value.value();
    out.evaluations = total_evals;
    out.feasibility_ratio =
        cells.empty() ? 0.0
                      : static_cast<double>(total_feasible) /
                            static_cast<double>(cells.size());
    return out;
}

/// The three-point construction showing the binary bound fails for
/// alpha < -1: its divergence converges (as u3 grows) to the sigma_q = 0
/// binary value, which a suitable sigma_q > 0 bound strictly exceeds.
struct CounterexampleReport {
    MeasurePair pair;
    double sigma_q = 0.0;        // scanned value with a positive gap
    ExtendedValue divergence;    // D_A^(alpha) of the three-point pair
    ExtendedValue bound;         // binary bound at the scanned sigma_q
    double gap = 0.0;            // bound - divergence, positive on success
    double limit_value = 0.0;    // binary value at sigma_q = 0 (u3 -> inf limit)
    double tail_term = 0.0;      // p3^alpha q3^(1-alpha) contribution
};

inline CounterexampleReport counterexample_alpha_lt_minus1(
    double mean_p, double sigma_p, double mean_q, double alpha, double delta,
    double u3) {
    if (!(alpha < -1.0))
        throw std::invalid_argument("counterexample requires alpha < -1");
    if (!(delta > 0.0) || !(2.0 + alpha * delta > 0.0))
        throw DeltaInvalid("need delta > 0 with 2 + alpha delta > 0");
    if (sigma_p < 0.0 || !std::isfinite(mean_p) || !std::isfinite(mean_q))
        throw std::invalid_argument("bad moment arguments");

    // sigma_q = 0 pair: S' concentrates at u'_1 = mean_q with s' = 1.
    BinaryPair bp0 = binary_pair_from_moments({mean_p, sigma_p, mean_q, 0.0});
    double a = bp0.a;
    double u1p, u2p, r_prime;
    if (a > 0.0) {  // s = 0 at u2 = mean_q; relabel so the Q point comes first
        u1p = bp0.u2;
        u2p = bp0.u1;
        r_prime = bp0.r_bar;
    } else {  // s = 1 already sits at u1 = mean_q
        u1p = bp0.u1;
        u2p = bp0.u2;
        r_prime = bp0.r;
    }
    if (!(u3 > std::max(std::fabs(u1p), std::fabs(u2p))))
        throw std::invalid_argument("u3 must exceed the base support");
    double eps_p = std::pow(u3, -(2.0 + delta));
    if (!(eps_p < r_prime))
        throw std::invalid_argument("u3 too small: tail mass exceeds r'");

    double limit_value =
        binary_alpha_divergence(r_prime, 1.0, alpha).value();

    // Largest sigma_q with 1 + alpha x < 0 on the whole of [0, sigma_q^2];
    // x(0) = 1 guarantees the region is nonempty for alpha < -1. Capped at
    // sigma_q = |a| so the u3-tail of the construction stays a small
    // correction at moderate u3.
    const double vp = sigma_p * sigma_p;
    const double a2 = a * a;
    auto x_of = [&](double vqz) {
        double g = (vqz - vp) * (vqz - vp) + 2.0 * a2 * (vp + vqz) + a2 * a2;
        return std::sqrt(g) / (vp + vqz + a2);
    };
    double v_cap = a2;
    double v_star = v_cap;
    if (1.0 + alpha * x_of(v_cap) >= 0.0) {
        double lo = 0.0, hi = v_cap;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (1.0 + alpha * x_of(mid) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        v_star = lo;
    }
    double sigma_star = std::sqrt(v_star);

    for (int k = 0; k < 64; ++k) {
        double sq = sigma_star * std::pow(2.0, -k);
        double eps_q = sq * sq / (u3 * u3);
        if (eps_q >= 1.0) continue;
        std::vector<double> pts{u1p, u2p, u3};
        std::vector<double> pw{r_prime - eps_p, 1.0 - r_prime, eps_p};
        std::vector<double> qw{1.0 - eps_q, 0.0, eps_q};
        MeasurePair pair = make_pair(make_measure(pts, pw), make_measure(pts, qw));
        ExtendedValue d = alpha_divergence(pair, alpha);
        ExtendedValue bound =
            alpha_lower_bound({mean_p, sigma_p, mean_q, sq}, alpha).bound;
        if (d.is_infinite() || bound.is_infinite()) continue;
        double gap = bound.value() - d.value();
        if (gap > 0.0) {
            CounterexampleReport rep{pair, sq, d, bound, gap, limit_value, 0.0};
            rep.tail_term = std::exp(alpha * std::log(eps_p) +
                                     (1.0 - alpha) * std::log(eps_q));
            return rep;
        }
    }
    throw ScanFailed("no scanned sigma_q produced a positive gap");
}

/// The equal-means vanishing sequence: four-point measures with common mean
/// zero and the prescribed variances whose divergence equals the binary
/// value d_A^(alpha)(xi/j || 1/j) and hence tends to 0. Variances at or
/// below 1 are first lifted by the sigma/sqrt(2) rescaling trick.
inline MeasurePair equal_means_sequence(double sigma_p, double sigma_q, long j) {
    if (!(sigma_p > 0.0) || !(sigma_q > 0.0))
        throw std::invalid_argument("sigmas must be positive");
    if (j < 1) throw JTooSmall("j must be >= 1");

    double vp = sigma_p * sigma_p, vq = sigma_q * sigma_q;
    double scale = 1.0;
    if (std::min(vp, vq) <= 1.0) {
        double s2 = std::min(vp, vq);
        scale = std::sqrt(s2 / 2.0);
        vp = 2.0 * vp / s2;
        vq = 2.0 * vq / s2;
    }
    double xi = vq == vp ? 1.0 : (vp - 1.0) / (vq - 1.0);
    if (xi / (2.0 * j) > 0.5)
        throw JTooSmall("weights leave [0,1]: need j >= xi = " + std::to_string(xi));
    double mu = std::sqrt(1.0 + j * (vq - 1.0));

    std::vector<double> pts{-mu * scale, -scale, scale, mu * scale};
    double qs = 1.0 / (2.0 * j), qb = 0.5 - qs;
    double ps = xi / (2.0 * j), pb = 0.5 - ps;
    return MeasurePair(
        DiscreteMeasure::from_canonical(pts, {ps, pb, pb, ps}),
        DiscreteMeasure::from_canonical(pts, {qs, qb, qb, qs}));
}

/// Sign scan of the log-ratio F(x) = log[(1 - a x)(1 + x)^a /
/// ((1 + a x)(1 - x)^a)], the quantity whose sign drives the bound's
/// monotonicity in the variances: positive on (0,1], negative on [-1,0)
/// for every a in (0,1). worst_margin is the largest signed violation
/// (negative means every grid point passed with that much room).
struct SignScanReport {
    long violations = 0;
    double worst_margin = -std::numeric_limits<double>::infinity();
    double worst_alpha = 0.0;
    double worst_x = 0.0;
};

inline double monotonicity_log_ratio(double x, double a) {
    return (std::log1p(-a * x) - std::log1p(a * x)) +
           a * (std::log1p(x) - std::log1p(-x));
}

inline SignScanReport monotonicity_sign_scan(
    const std::vector<double>& alpha_grid, const std::vector<double>& x_grid) {
    SignScanReport rep;
    for (double a : alpha_grid) {
        if (!(a > 0.0 && a < 1.0))
            throw std::invalid_argument("sign scan needs alpha in (0,1)");
        for (double x : x_grid) {
            if (x > 1.0 && x <= 1.0 + 1e-12) x = 1.0;
            if (x < -1.0 && x >= -1.0 - 1e-12) x = -1.0;
            if (!(x >= -1.0 && x <= 1.0))
                throw std::invalid_argument("sign scan needs x in [-1,1]");
            if (x == 0.0) continue;
            double f = monotonicity_log_ratio(x, a);
            double margin = x > 0.0 ? -f : f;  // > 0 means the sign is wrong
            if (margin >= 0.0) ++rep.violations;
            if (margin > rep.worst_margin) {
                rep.worst_margin = margin;
                rep.worst_alpha = a;
                rep.worst_x = x;
            }
        }
    }
    return rep;
}

}  // namespace alphadiv
