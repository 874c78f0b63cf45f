#pragma once

#include <optional>
#include <span>
#include <vector>

#include "polariton/optics.hpp"

namespace polariton {

struct Peak {
    double energy = 0.0;      // parabola-refined position, eV
    double height = 0.0;      // signal at the refined position
    double width = 0.0;       // full width at half prominence, eV
    double prominence = 0.0;  // topographic prominence
};

// Sorted by ascending energy.
using PeakList = std::vector<Peak>;

struct EnergyWindow {
    double lo = 0.0;
    double hi = 0.0;
};

/// Local maxima of `values` on a uniform `energies` grid whose prominence is
/// at least `min_prominence` and whose sample lies inside `window`.
PeakList extract_peaks(std::span<const double> energies, std::span<const double> values,
                       double min_prominence, EnergyWindow window);

/// Transmission peaks of a spectrum.
PeakList extract_peaks(const Spectrum& sp, double min_prominence, EnergyWindow window);

struct BranchPeaks {
    std::optional<double> lp;
    std::optional<double> up;
};

/// The two most prominent peaks become LP/UP in energy order. A lone peak is
/// labelled LP when it lies below `split_hint` and UP otherwise.
BranchPeaks assign_branches(const PeakList& peaks, double split_hint);

}  // namespace polariton
