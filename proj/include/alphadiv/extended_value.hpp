#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "alphadiv/errors.hpp"

namespace alphadiv {

/// Negative values above this threshold are treated as floating-point dust
/// and clamped to zero; anything below it is an evaluator bug.
inline constexpr double kNegativeDust = -1e-12;

/// A nonnegative divergence value that may be +infinity. Never NaN.
class ExtendedValue {
public:
    ExtendedValue() = default;

    /// Wraps a raw evaluator result. Clamps cancellation dust in
    /// [-1e-12, 0) to zero; NaN or larger negatives raise
    /// InternalConsistency.
    static ExtendedValue of(double v) {
        if (std::isnan(v))
            throw InternalConsistency("divergence evaluated to NaN");
        if (v < 0.0) {
            if (v < kNegativeDust)
                throw InternalConsistency(
                    "divergence evaluated to " + std::to_string(v) +
                    ", below the -1e-12 cancellation allowance");
            v = 0.0;
        }
        return ExtendedValue(v);
    }

    static ExtendedValue infinity() {
        return ExtendedValue(std::numeric_limits<double>::infinity());
    }

    /// Underlying double; +infinity when is_infinite().
    double value() const { return value_; }
    bool is_infinite() const { return std::isinf(value_); }
    bool is_finite() const { return !is_infinite(); }

    friend bool operator==(ExtendedValue a, ExtendedValue b) { return a.value_ == b.value_; }
    friend bool operator<(ExtendedValue a, ExtendedValue b) { return a.value_ < b.value_; }
    friend bool operator<=(ExtendedValue a, ExtendedValue b) { return a.value_ <= b.value_; }

private:
    explicit ExtendedValue(double v) : value_(v) {}
    double value_ = 0.0;
};

/// Divergence order: a finite real, or the distinguished +infinity used by
/// the Renyi family. Alpha-divergences take finite orders on the whole real
/// line; Renyi evaluators additionally require order >= 0.
class AlphaOrder {
public:
    AlphaOrder(double alpha) : alpha_(alpha) {  // NOLINT: implicit by design
        if (std::isnan(alpha))
            throw InvalidOrder("divergence order must not be NaN");
    }

    static AlphaOrder infinity() {
        return AlphaOrder(std::numeric_limits<double>::infinity());
    }

    bool is_infinity() const { return std::isinf(alpha_) && alpha_ > 0; }

    /// Finite order value; only meaningful when !is_infinity().
    double value() const { return alpha_; }

private:
    double alpha_;
};

}  // namespace alphadiv
