#pragma once

#include <span>
#include <vector>

#include "saabench/distributions.hpp"

namespace saabench {

/// c(x, y) = x^2 + alpha x^2 y + beta x y^2 + gamma x y
struct QuadraticCost {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    double operator()(double x, double y) const {
        return x * x + alpha * x * x * y + beta * x * y * y + gamma * x * y;
    }
    bool operator==(const QuadraticCost&) const = default;
};

/// Feasible interval for the scalar decision.
struct DecisionBox {
    double lo = -10.0;
    double hi = 10.0;

    bool operator==(const DecisionBox&) const = default;
};

/// The ten benchmark cost functions, in table order (id = index + 1).
const std::vector<QuadraticCost>& builtin_costs();

/// E[c(x, y)] = x^2 (1 + alpha m1) + x (gamma m1 + beta m2).
double expected_cost(const QuadraticCost& cost, double x, const MomentPair& moments);

/// Minimizer of expected_cost over the box. With positive curvature this is
/// the clipped stationary point; otherwise the better endpoint (ties -> lo).
double saa_minimize(const QuadraticCost& cost, const MomentPair& moments,
                    const DecisionBox& box = {});

/// (mean, mean of squares). Throws EmptySampleError. Bit-identical under
/// any permutation of the sample.
MomentPair sample_moments(std::span<const double> sample);

/// sample_moments for input already sorted ascending (no copy).
MomentPair sorted_sample_moments(std::span<const double> sorted);

}  // namespace saabench
