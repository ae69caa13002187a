// Nelder-Mead simplex maximizer. Derivative-free, bounded problems are
// handled by the objective returning -infinity outside its domain.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace spheroid {

struct OptimResult {
    std::vector<double> x;
    double value = -std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
};

// Standard reflection/expansion/contraction/shrink schedule. step gives the
// initial simplex edge per dimension. Stops when the simplex value spread
// falls below tol or max_iter iterations elapse.
inline OptimResult nelder_mead_max(const std::function<double(const std::vector<double>&)>& f,
                                   const std::vector<double>& x0, const std::vector<double>& step,
                                   std::size_t max_iter = 400, double tol = 1e-9) {
    const std::size_t n = x0.size();
    OptimResult res;
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> val(n + 1);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
    for (std::size_t i = 0; i <= n; ++i) {
        val[i] = f(pts[i]);
        ++res.evaluations;
    }

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return val[a] > val[b]; });
        std::vector<std::vector<double>> p2(n + 1);
        std::vector<double> v2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            p2[i] = pts[idx[i]];
            v2[i] = val[idx[i]];
        }
        pts.swap(p2);
        val.swap(v2);
    };

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        order();
        if (std::isfinite(val[0]) && std::isfinite(val[n]) && val[0] - val[n] < tol) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / static_cast<double>(n);

        auto at = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + coef * (pts[n][d] - centroid[d]);
            return p;
        };

        auto reflected = at(-1.0);
        double fr = f(reflected);
        ++res.evaluations;
        if (fr > val[0]) {
            auto expanded = at(-2.0);
            double fe = f(expanded);
            ++res.evaluations;
            if (fe > fr) {
                pts[n] = expanded;
                val[n] = fe;
            } else {
                pts[n] = reflected;
                val[n] = fr;
            }
        } else if (fr > val[n - 1]) {
            pts[n] = reflected;
            val[n] = fr;
        } else {
            auto contracted = at(fr > val[n] ? -0.5 : 0.5);
            double fc = f(contracted);
            ++res.evaluations;
            if (fc > std::max(fr, val[n])) {
                pts[n] = contracted;
                val[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t d = 0; d < n; ++d) pts[i][d] = pts[0][d] + 0.5 * (pts[i][d] - pts[0][d]);
                    val[i] = f(pts[i]);
                    ++res.evaluations;
                }
            }
        }
    }
    order();
    res.x = pts[0];
    res.value = val[0];
    return res;
}

}  // namespace spheroid
