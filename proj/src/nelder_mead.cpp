#include "polariton/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace polariton {

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start, const NelderMeadOptions& opt) {
    const std::size_t n = start.size();
    NelderMeadResult res;
    if (n == 0) {
        res.x = std::move(start);
        res.value = f(res.x);
        res.converged = true;
        return res;
    }

    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1][i] += start[i] + opt.initial_step <= 1.0 ? opt.initial_step : -opt.initial_step;
    }
    std::vector<double> vals(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        vals[j] = f(pts[j]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    auto along = [&](double t, const std::vector<double>& towards, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = centroid[i] + t * (towards[i] - centroid[i]);
        }
    };

    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        // ties broken by index so the ordering is reproducible
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double size = 0.0;
        double scale = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            scale = std::max(scale, std::abs(pts[best][i]));
        }
        for (std::size_t j = 0; j <= n; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                size = std::max(size, std::abs(pts[j][i] - pts[best][i]));
            }
        }
        if (std::isfinite(vals[best]) && size <= opt.tolerance * scale) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t j : order) {
            if (j == worst) {
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) {
                centroid[i] += pts[j][i];
            }
        }
        for (double& c : centroid) {
            c /= static_cast<double>(n);
        }

        along(-opt.reflection, pts[worst], trial);
        const double fr = f(trial);
        if (fr < vals[best]) {
            along(-opt.reflection * opt.expansion, pts[worst], trial2);
            const double fe = f(trial2);
            if (fe < fr) {
                pts[worst] = trial2;
                vals[worst] = fe;
            } else {
                pts[worst] = trial;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = trial;
            vals[worst] = fr;
            continue;
        }
        if (fr < vals[worst]) {
            along(-opt.reflection * opt.contraction, pts[worst], trial2);
            const double fc = f(trial2);
            if (fc <= fr) {
                pts[worst] = trial2;
                vals[worst] = fc;
                continue;
            }
        } else {
            along(opt.contraction, pts[worst], trial2);
            const double fc = f(trial2);
            if (fc < vals[worst]) {
                pts[worst] = trial2;
                vals[worst] = fc;
                continue;
            }
        }
        for (std::size_t j = 0; j <= n; ++j) {
            if (j == best) {
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) {
                pts[j][i] = pts[best][i] + opt.shrink * (pts[j][i] - pts[best][i]);
            }
            vals[j] = f(pts[j]);
        }
    }

    const auto best_it = std::min_element(vals.begin(), vals.end());
    const auto b = static_cast<std::size_t>(best_it - vals.begin());
    res.x = pts[b];
    res.value = vals[b];
    res.iterations = iter;
    return res;
}

}  // namespace polariton
