#include "polariton/peaks.hpp"

#include <algorithm>
#include <cmath>

#include "polariton/errors.hpp"

namespace polariton {

PeakList extract_peaks(std::span<const double> energies, std::span<const double> values,
                       double min_prominence, EnergyWindow window) {
    if (energies.size() != values.size()) {
        throw ValidationError("extract_peaks: energy and value arrays differ in length");
    }
    const std::size_t n = values.size();
    PeakList peaks;
    if (n < 3) {
        return peaks;
    }
    const double step = (energies[n - 1] - energies[0]) / static_cast<double>(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(energies[i] - energies[i - 1] - step) > 1e-6 * std::abs(step)) {
            throw ValidationError("extract_peaks: energy grid must be uniform");
        }
    }

    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double v = values[i];
        if (!(v > values[i - 1] && v >= values[i + 1])) {
            continue;
        }
        if (energies[i] < window.lo || energies[i] > window.hi) {
            continue;
        }
        // bases: lowest point before reaching higher ground on each side
        std::size_t l = i;
        double left_min = v;
        while (l > 0 && values[l - 1] <= v) {
            --l;
            left_min = std::min(left_min, values[l]);
        }
        std::size_t r = i;
        double right_min = v;
        while (r + 1 < n && values[r + 1] <= v) {
            ++r;
            right_min = std::min(right_min, values[r]);
        }
        const double prominence = v - std::max(left_min, right_min);
        if (prominence < min_prominence || prominence <= 0.0) {
            continue;
        }

        const double ym = values[i - 1];
        const double yp = values[i + 1];
        const double curv = ym - 2.0 * v + yp;
        double offset = curv < 0.0 ? 0.5 * (ym - yp) / curv : 0.0;
        offset = std::clamp(offset, -0.5, 0.5);

        const double half = v - 0.5 * prominence;
        std::size_t a = i;
        while (a > l && values[a - 1] > half) {
            --a;
        }
        double left_x = energies[a];
        if (a > 0 && values[a - 1] <= half) {
            const double t = (values[a] - half) / (values[a] - values[a - 1]);
            left_x = energies[a] - t * step;
        }
        std::size_t b = i;
        while (b < r && values[b + 1] > half) {
            ++b;
        }
        double right_x = energies[b];
        if (b + 1 < n && values[b + 1] <= half) {
            const double t = (values[b] - half) / (values[b] - values[b + 1]);
            right_x = energies[b] + t * step;
        }

        peaks.push_back({energies[i] + offset * step, v - 0.25 * (ym - yp) * offset, right_x - left_x, prominence});
    }
    return peaks;
}

PeakList extract_peaks(const Spectrum& sp, double min_prominence, EnergyWindow window) {
    return extract_peaks(sp.energy, sp.T, min_prominence, window);
}

BranchPeaks assign_branches(const PeakList& peaks, double split_hint) {
    BranchPeaks out;
    if (peaks.empty()) {
        return out;
    }
    if (peaks.size() == 1) {
        (peaks.front().energy < split_hint ? out.lp : out.up) = peaks.front().energy;
        return out;
    }
    std::vector<std::size_t> idx(peaks.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = i;
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return peaks[a].prominence > peaks[b].prominence; });
    const std::size_t lo = std::min(idx[0], idx[1]);
    const std::size_t hi = std::max(idx[0], idx[1]);
    out.lp = peaks[lo].energy;
    out.up = peaks[hi].energy;
    return out;
}

}  // namespace polariton
