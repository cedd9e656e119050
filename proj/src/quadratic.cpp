#include "saabench/quadratic.hpp"

#include <algorithm>

#include "saabench/errors.hpp"

namespace saabench {

const std::vector<QuadraticCost>& builtin_costs() {
    static const std::vector<QuadraticCost> costs{
        {-0.67, 2.56, 2.51}, {0.02, -2.57, 1.31}, {-0.51, -2.10, 1.97}, {0.71, -1.45, 1.62},
        {0.19, 2.17, 1.04},  {-0.26, 1.23, 3.89}, {-0.22, 3.71, 0.19},  {0.65, 2.02, 3.68},
        {0.60, 0.86, 0.33},  {0.49, -3.25, 0.65},
    };
    return costs;
}

double expected_cost(const QuadraticCost& cost, double x, const MomentPair& m) {
    return x * x * (1.0 + cost.alpha * m.m1) + x * (cost.gamma * m.m1 + cost.beta * m.m2);
}

double saa_minimize(const QuadraticCost& cost, const MomentPair& m, const DecisionBox& box) {
    const double curvature = 1.0 + cost.alpha * m.m1;
    const double slope = cost.gamma * m.m1 + cost.beta * m.m2;
    if (curvature > 0.0) return std::clamp(-slope / (2.0 * curvature), box.lo, box.hi);
    const double f_lo = expected_cost(cost, box.lo, m);
    const double f_hi = expected_cost(cost, box.hi, m);
    return f_hi < f_lo ? box.hi : box.lo;
}

MomentPair sorted_sample_moments(std::span<const double> sorted) {
    if (sorted.empty()) throw EmptySampleError("sample_moments: sample is empty");
    double s1 = 0.0;
    double s2 = 0.0;
    for (double y : sorted) {
        s1 += y;
        s2 += y * y;
    }
    const auto n = static_cast<double>(sorted.size());
    return {s1 / n, s2 / n};
}

MomentPair sample_moments(std::span<const double> sample) {
    if (sample.empty()) throw EmptySampleError("sample_moments: sample is empty");
    // summed in sorted order so the result is invariant to permutations
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted_sample_moments(sorted);
}

}  // namespace saabench
