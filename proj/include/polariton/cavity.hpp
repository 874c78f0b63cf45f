#pragma once

#include <span>
#include <vector>

#include "polariton/hopfield.hpp"

namespace polariton {

// Physical constants in the units used throughout (eV, um, cm).
inline constexpr double kHbarC_eV_um = 0.1973269804;
inline constexpr double kHbarC_eV_cm = 1.973269804e-5;
inline constexpr double kHbarC_eV_nm = 197.3269804;
inline constexpr double kElectronRestEnergy_eV = 0.51099895e6;

// Planar Fabry-Perot mode. The angle is the external incidence angle;
// refraction into the cavity is absorbed into n_eff.
struct CavityModel {
    double e0 = 0.0;     // normal-incidence mode energy, eV
    double n_eff = 1.0;  // effective intracavity index
};

void validate(const CavityModel& m);

class AngleGrid {
public:
    AngleGrid() = default;
    /// Throws ValidationError unless strictly increasing within [0, 89] degrees.
    explicit AngleGrid(std::vector<double> angles_deg);

    /// first, first+step, ..., up to and including last (within 1e-9).
    static AngleGrid uniform(double first_deg, double last_deg, double step_deg);

    std::span<const double> angles() const { return angles_; }
    std::size_t size() const { return angles_.size(); }
    double operator[](std::size_t i) const { return angles_[i]; }

    /// In-plane wavevector in 1/um of a photon of the given energy at each angle.
    std::vector<double> k_par(double energy_ev) const;

private:
    std::vector<double> angles_;
};

/// In-plane wavevector k = (E / hbar c) sin(theta), in 1/um.
double in_plane_wavevector(double energy_ev, double theta_deg);

/// e0 / sqrt(1 - sin^2(theta) / n_eff^2). Throws ValidationError for theta
/// outside [0, 90) and NumericalError in the evanescent regime.
double cavity_energy(const CavityModel& m, double theta_deg);

/// Curvature mass of the cavity mode, e0 n_eff^2 / c^2, in units of m0.
double photon_effective_mass(const CavityModel& m);

/// Cavity energy at which the lower branch equals target_lp. Throws
/// ValidationError when the target is at or above the branch asymptote.
double cavity_energy_for_lower_branch(double target_lp, const CouplingParams& p, ModelKind kind);

struct DispersionRow {
    double theta_deg = 0.0;
    double e_cav = 0.0;
    double lp = 0.0;
    double up = 0.0;
};

std::vector<DispersionRow> branch_dispersion(const CouplingParams& p, const CavityModel& m,
                                             const AngleGrid& g, ModelKind kind);

}  // namespace polariton
