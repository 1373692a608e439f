#pragma once

#include <cmath>
#include <vector>

#include "alphadiv/measures.hpp"
#include "alphadiv/rng.hpp"

namespace testutil {

/// |a-b| <= tol * max(1, |a|, |b|): absolute for small values, relative for
/// large ones.
inline bool close(double a, double b, double tol) {
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= tol * scale;
}

inline bool close_rel(double a, double b, double tol) {
    double scale = std::max(std::fabs(a), std::fabs(b));
    if (scale == 0.0) return true;
    return std::fabs(a - b) <= tol * scale;
}

/// Random measure on `n` distinct points in [-5,5]. min_weight > 0 bounds
/// the weights away from zero (after normalization the floor is
/// min_weight / (1 + n min_weight), near min_weight for small values).
inline alphadiv::DiscreteMeasure random_measure(alphadiv::SplitMix64& rng, int n,
                                                double min_weight = 0.0) {
    std::vector<double> pts(n), w(n);
    for (int i = 0; i < n; ++i) pts[i] = rng.uniform(-5.0, 5.0);
    std::sort(pts.begin(), pts.end());
    for (int i = 1; i < n; ++i)
        if (pts[i] - pts[i - 1] < 1e-3) pts[i] = pts[i - 1] + 1e-3;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = min_weight - std::log(1.0 - rng.uniform01());  // Exp(1) + floor
        sum += w[i];
    }
    for (int i = 0; i < n; ++i) w[i] /= sum;
    return alphadiv::make_measure(pts, w);
}

/// Random pair on a shared n-point support with both weight vectors bounded
/// below.
inline alphadiv::MeasurePair random_pair(alphadiv::SplitMix64& rng, int n,
                                         double min_weight = 0.0) {
    alphadiv::DiscreteMeasure p = random_measure(rng, n, min_weight);
    std::vector<double> w(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        w[i] = min_weight - std::log(1.0 - rng.uniform01());
        sum += w[i];
    }
    for (int i = 0; i < n; ++i) w[i] /= sum;
    return alphadiv::MeasurePair(
        p, alphadiv::DiscreteMeasure::from_canonical(p.points(), std::move(w)));
}

}  // namespace testutil
