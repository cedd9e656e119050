#pragma once

// Small derivative-free simplex minimizer used by the beta MLE.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

namespace saabench::detail {

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Nelder-Mead with the standard coefficients (1, 2, 0.5, 0.5). Stops when the
/// spread of function values across the simplex is at most `ftol`.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> start, double step, double ftol,
                                 std::size_t max_iterations) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

    std::vector<std::size_t> order(n + 1);
    SimplexResult result;
    std::vector<double> centroid(n), trial(n), trial2(n);

    auto along = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
        for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (worst[j] - centroid[j]);
    };

    for (std::size_t it = 0; it < max_iterations; ++it) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];
        result.iterations = it;
        if (std::isfinite(vals[best]) && vals[worst] - vals[best] <= ftol) {
            result.x = pts[best];
            result.value = vals[best];
            result.converged = true;
            return result;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i : order)
            if (i != worst)
                for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);

        along(-1.0, trial, pts[worst]);
        const double f_reflect = f(trial);
        if (f_reflect < vals[best]) {
            along(-2.0, trial2, pts[worst]);
            const double f_expand = f(trial2);
            if (f_expand < f_reflect) {
                pts[worst] = trial2;
                vals[worst] = f_expand;
            } else {
                pts[worst] = trial;
                vals[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < vals[second]) {
            pts[worst] = trial;
            vals[worst] = f_reflect;
            continue;
        }
        // contraction: outside if the reflection improved on the worst point
        const bool outside = f_reflect < vals[worst];
        along(outside ? -0.5 : 0.5, trial2, pts[worst]);
        const double f_contract = f(trial2);
        if (f_contract < (outside ? f_reflect : vals[worst])) {
            pts[worst] = trial2;
            vals[worst] = f_contract;
            continue;
        }
        for (std::size_t i : order) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
            vals[i] = f(pts[i]);
        }
    }
    const auto best = static_cast<std::size_t>(
        std::distance(vals.begin(), std::min_element(vals.begin(), vals.end())));
    result.x = pts[best];
    result.value = vals[best];
    result.iterations = max_iterations;
    result.converged = false;
    return result;
}

}  // namespace saabench::detail
