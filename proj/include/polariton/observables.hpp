#pragma once

#include <optional>

#include "polariton/hopfield.hpp"

namespace polariton {

// Charges in units of e0, masses in units of the bare electron mass m0.

struct MaterialParams {
    double m_ex = 25.0;                   // exciton effective mass
    std::optional<double> m_ph_override;  // cavity-photon mass; derived from the cavity when empty
    double alpha_peak = 1.05e5;           // film absorption coefficient, 1/cm
    double sigma = 6.14e-17;              // molecular absorption cross-section, cm^2
};

void validate(const MaterialParams& m);

struct ChargedPolaritonReport {
    double e_eff_lp = 0.0;
    double m_eff_lp = 0.0;
    double charge_to_mass = 0.0;
    double gs_charge = 0.0;
    double density = 0.0;  // chromophores per cm^3
};

double effective_charge(double exciton_fraction);

/// Harmonic mean weighted by the branch fractions:
///   1/m = X/m_ex + C/m_ph
double effective_mass_lp(const BranchFractions& f, double m_ex, double m_ph);

double charge_to_mass_ratio(double e_eff, double m_eff);

double ground_state_charge(double n_exciton);

double chromophore_density(double alpha_peak, double sigma);

/// Photon mass that makes e_eff/m_eff equal to `target` for the given
/// fractions and exciton mass. Throws ValidationError if unreachable.
double photon_mass_for_ratio(const BranchFractions& f, double m_ex, double target);

ChargedPolaritonReport charged_polariton_report(const BranchFractions& lp, const GroundStateContent& gs,
                                                const MaterialParams& mat, double m_ph);

}  // namespace polariton
