#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "alphadiv/errors.hpp"

namespace alphadiv {

inline constexpr double kWeightSumTolerance = 1e-9;
inline constexpr double kWeightNegativeTolerance = -1e-12;
inline constexpr double kVarianceClamp = -1e-12;

/// Finite discrete probability measure in canonical form: support points
/// strictly increasing, weights in [0,1] summing to one. Duplicate input
/// points are merged by adding their weights. Zero weights are kept, so two
/// measures can share one support. Immutable after construction.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;

    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return points_.size(); }

    /// Trusted constructor for internal callers that already guarantee the
    /// canonical form (sorted distinct points, nonnegative weights, sum one
    /// up to rounding). Clamps rounding dust on the weights.
    static DiscreteMeasure from_canonical(std::vector<double> points,
                                          std::vector<double> weights) {
        DiscreteMeasure m;
        for (double& w : weights) {
            if (w < 0.0) {
                if (w < kWeightNegativeTolerance)
                    throw InternalConsistency("canonical measure with negative weight");
                w = 0.0;
            }
        }
        m.points_ = std::move(points);
        m.weights_ = std::move(weights);
        return m;
    }

private:
    std::vector<double> points_;
    std::vector<double> weights_;
};

/// Builds a canonical DiscreteMeasure: validates inputs, clamps weight dust
/// in [-1e-12, 0), sorts, merges duplicate points, and renormalizes the
/// weights to an exact unit sum provided the input sum is within 1e-9 of 1.
inline DiscreteMeasure make_measure(std::vector<double> points,
                                    std::vector<double> weights) {
    if (points.size() != weights.size())
        throw LengthMismatch("points and weights differ in length (" +
                             std::to_string(points.size()) + " vs " +
                             std::to_string(weights.size()) + ")");
    if (points.empty())
        throw LengthMismatch("a measure needs at least one support point");
    for (double u : points)
        if (!std::isfinite(u)) throw NonFinitePoint("non-finite support point");
    for (double& w : weights) {
        if (!(w >= kWeightNegativeTolerance))
            throw NegativeWeight("weight " + std::to_string(w) + " below -1e-12");
        if (w < 0.0) w = 0.0;
    }
    double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::fabs(sum - 1.0) > kWeightSumTolerance)
        throw WeightSumInvalid("weights sum to " + std::to_string(sum) +
                               ", more than 1e-9 away from 1");

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    std::vector<double> u, w;
    u.reserve(points.size());
    w.reserve(points.size());
    for (std::size_t idx : order) {
        if (!u.empty() && points[idx] == u.back()) {
            w.back() += weights[idx];
        } else {
            u.push_back(points[idx]);
            w.push_back(weights[idx]);
        }
    }
    // renormalizing a sum already at roundoff distance from 1 would make
    // canonicalization non-idempotent
    if (std::fabs(sum - 1.0) > 4e-15)
        for (double& x : w) x /= sum;
    return DiscreteMeasure::from_canonical(std::move(u), std::move(w));
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean and variance. The variance is clamped to zero when floating
/// cancellation leaves it in [-1e-12, 0).
inline Moments moments(const DiscreteMeasure& m) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        mean += m.weights()[i] * m.points()[i];
    double var = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double d = m.points()[i] - mean;
        var += m.weights()[i] * d * d;
    }
    if (var < 0.0) {
        if (var < kVarianceClamp)
            throw InternalConsistency("variance below the -1e-12 clamp window");
        var = 0.0;
    }
    return {mean, var};
}

/// The constraint tuple (mean_p, sigma_p, mean_q, sigma_q): prescribed means
/// and standard deviations for the two measures of a pair.
struct MomentSpec {
    double mean_p = 0.0;
    double sigma_p = 0.0;
    double mean_q = 0.0;
    double sigma_q = 0.0;
};

inline void validate(const MomentSpec& s) {
    if (!std::isfinite(s.mean_p) || !std::isfinite(s.sigma_p) ||
        !std::isfinite(s.mean_q) || !std::isfinite(s.sigma_q))
        throw std::invalid_argument("moment spec fields must be finite");
    if (s.sigma_p < 0.0 || s.sigma_q < 0.0)
        throw std::invalid_argument("sigma_p and sigma_q must be >= 0");
}

inline MomentSpec swapped(const MomentSpec& s) {
    return {s.mean_q, s.sigma_q, s.mean_p, s.sigma_p};
}

/// Two measures sharing one support (the union of the individual supports;
/// zero weights fill the gaps).
class MeasurePair {
public:
    MeasurePair(DiscreteMeasure p, DiscreteMeasure q)
        : p_(std::move(p)), q_(std::move(q)) {
        if (p_.points() != q_.points())
            throw InternalConsistency("measure pair constructed on unequal supports");
    }

    const DiscreteMeasure& p() const { return p_; }
    const DiscreteMeasure& q() const { return q_; }
    const std::vector<double>& points() const { return p_.points(); }
    std::size_t size() const { return p_.points().size(); }

private:
    DiscreteMeasure p_;
    DiscreteMeasure q_;
};

/// Aligns two measures on the union of their supports.
inline MeasurePair make_pair(const DiscreteMeasure& p, const DiscreteMeasure& q) {
    std::vector<double> u;
    u.reserve(p.size() + q.size());
    std::merge(p.points().begin(), p.points().end(),
               q.points().begin(), q.points().end(), std::back_inserter(u));
    u.erase(std::unique(u.begin(), u.end()), u.end());

    auto spread = [&](const DiscreteMeasure& m) {
        std::vector<double> w(u.size(), 0.0);
        std::size_t j = 0;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (j < m.size() && m.points()[j] == u[i]) w[i] = m.weights()[j++];
        return DiscreteMeasure::from_canonical(u, std::move(w));
    };
    return MeasurePair(spread(p), spread(q));
}

inline MeasurePair swapped(const MeasurePair& pair) {
    return MeasurePair(pair.q(), pair.p());
}

/// The segment measure Q_t = (Q - P) t + P on the shared support.
inline DiscreteMeasure mixture(const MeasurePair& pair, double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw TOutOfRange("mixture parameter t=" + std::to_string(t) +
                          " outside [0,1]");
    std::vector<double> w(pair.size());
    for (std::size_t i = 0; i < pair.size(); ++i) {
        double p = pair.p().weights()[i], q = pair.q().weights()[i];
        w[i] = p + t * (q - p);
    }
    return DiscreteMeasure::from_canonical(pair.points(), std::move(w));
}

/// True when the two measures of the pair coincide within `tol` per weight.
inline bool weights_equal(const MeasurePair& pair, double tol = 1e-12) {
    for (std::size_t i = 0; i < pair.size(); ++i)
        if (std::fabs(pair.p().weights()[i] - pair.q().weights()[i]) > tol)
            return false;
    return true;
}

}  // namespace alphadiv
