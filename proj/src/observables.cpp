#include "polariton/observables.hpp"

#include <cmath>
#include <sstream>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << name << " must be > 0, got " << v;
        throw ValidationError(msg.str());
    }
}

void require_unit_interval(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << name << " must lie in [0, 1], got " << v;
        throw ValidationError(msg.str());
    }
}

}  // namespace

void validate(const MaterialParams& m) {
    require_positive(m.m_ex, "material.m_ex");
    if (m.m_ph_override) {
        require_positive(*m.m_ph_override, "material.m_ph_override");
    }
    require_positive(m.alpha_peak, "material.alpha_peak");
    require_positive(m.sigma, "material.sigma");
}

double effective_charge(double exciton_fraction) {
    require_unit_interval(exciton_fraction, "exciton fraction");
    return exciton_fraction;
}

double effective_mass_lp(const BranchFractions& f, double m_ex, double m_ph) {
    require_positive(m_ex, "m_ex");
    require_positive(m_ph, "m_ph");
    return 1.0 / (f.exciton_fraction / m_ex + f.photon_fraction / m_ph);
}

double charge_to_mass_ratio(double e_eff, double m_eff) {
    require_positive(m_eff, "m_eff");
    return e_eff / m_eff;
}

double ground_state_charge(double n_exciton) {
    if (!(n_exciton >= 0.0)) {
        std::ostringstream msg;
        msg << "n_exciton must be >= 0, got " << n_exciton;
        throw ValidationError(msg.str());
    }
    return n_exciton;
}

double chromophore_density(double alpha_peak, double sigma) {
    require_positive(alpha_peak, "alpha_peak");
    require_positive(sigma, "sigma");
    return alpha_peak / sigma;
}

double photon_mass_for_ratio(const BranchFractions& f, double m_ex, double target) {
    require_positive(m_ex, "m_ex");
    require_positive(target, "target ratio");
    // target = X (X/m_ex + C/m_ph)  ->  m_ph = C / (target/X - X/m_ex)
    const double x = f.exciton_fraction;
    if (!(x > 0.0) || !(f.photon_fraction > 0.0)) {
        throw ValidationError("target charge-to-mass ratio unreachable for these fractions");
    }
    const double rhs = target / x - x / m_ex;
    if (!(rhs > 0.0)) {
        throw ValidationError("target charge-to-mass ratio unreachable for these fractions");
    }
    return f.photon_fraction / rhs;
}

ChargedPolaritonReport charged_polariton_report(const BranchFractions& lp, const GroundStateContent& gs,
                                                const MaterialParams& mat, double m_ph) {
    validate(mat);
    ChargedPolaritonReport r;
    r.e_eff_lp = effective_charge(lp.exciton_fraction);
    r.m_eff_lp = effective_mass_lp(lp, mat.m_ex, m_ph);
    r.charge_to_mass = charge_to_mass_ratio(r.e_eff_lp, r.m_eff_lp);
    r.gs_charge = ground_state_charge(gs.n_exciton);
    r.density = chromophore_density(mat.alpha_peak, mat.sigma);
    return r;
}

}  // namespace polariton
