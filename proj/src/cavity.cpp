#include "polariton/cavity.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

void validate(const CavityModel& m) {
    std::ostringstream msg;
    if (!(m.e0 > 0.0) || !std::isfinite(m.e0)) {
        msg << "cavity.e0 must be > 0, got " << m.e0;
    } else if (!(m.n_eff >= 1.0) || !std::isfinite(m.n_eff)) {
        msg << "cavity.n_eff must be >= 1, got " << m.n_eff;
    } else {
        return;
    }
    throw ValidationError(msg.str());
}

AngleGrid::AngleGrid(std::vector<double> angles_deg) : angles_(std::move(angles_deg)) {
    for (std::size_t i = 0; i < angles_.size(); ++i) {
        const double a = angles_[i];
        if (!(a >= 0.0 && a <= 89.0)) {
            std::ostringstream msg;
            msg << "angle " << a << " deg outside [0, 89]";
            throw ValidationError(msg.str());
        }
        if (i > 0 && !(a > angles_[i - 1])) {
            std::ostringstream msg;
            msg << "angles must be strictly increasing (index " << i << ": " << angles_[i - 1] << " -> " << a
                << ")";
            throw ValidationError(msg.str());
        }
    }
}

AngleGrid AngleGrid::uniform(double first_deg, double last_deg, double step_deg) {
    if (!(step_deg > 0.0) || !(last_deg >= first_deg)) {
        throw ValidationError("angle grid needs step > 0 and last >= first");
    }
    std::vector<double> a;
    const auto n = static_cast<std::size_t>(std::floor((last_deg - first_deg) / step_deg + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
        a.push_back(first_deg + static_cast<double>(i) * step_deg);
    }
    return AngleGrid(std::move(a));
}

std::vector<double> AngleGrid::k_par(double energy_ev) const {
    std::vector<double> k;
    k.reserve(angles_.size());
    for (double a : angles_) {
        k.push_back(in_plane_wavevector(energy_ev, a));
    }
    return k;
}

double in_plane_wavevector(double energy_ev, double theta_deg) {
    return energy_ev / kHbarC_eV_um * std::sin(to_rad(theta_deg));
}

double cavity_energy(const CavityModel& m, double theta_deg) {
    validate(m);
    if (!(theta_deg >= 0.0 && theta_deg < 90.0)) {
        std::ostringstream msg;
        msg << "angle " << theta_deg << " deg outside [0, 90)";
        throw ValidationError(msg.str());
    }
    const double s = std::sin(to_rad(theta_deg));
    const double ratio = s * s / (m.n_eff * m.n_eff);
    if (!(ratio < 1.0)) {
        std::ostringstream msg;
        msg << "evanescent cavity mode at " << theta_deg << " deg for n_eff=" << m.n_eff;
        throw NumericalError(msg.str());
    }
    return m.e0 / std::sqrt(1.0 - ratio);
}

double photon_effective_mass(const CavityModel& m) {
    validate(m);
    return m.e0 * m.n_eff * m.n_eff / kElectronRestEnergy_eV;
}

double cavity_energy_for_lower_branch(double target_lp, const CouplingParams& p, ModelKind kind) {
    validate(p);
    if (!(target_lp > 0.0)) {
        throw ValidationError("target lower-branch energy must be > 0");
    }
    auto lp = [&](double ec) {
        try {
            return branch_energies(ec, p, kind).lp;
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    // the lower branch never exceeds the bare cavity energy, so LP(target) <= target
    double lo = target_lp;
    double hi = 2.0 * target_lp;
    for (int i = 0; !(lp(hi) > target_lp); ++i) {
        if (i > 40) {
            std::ostringstream msg;
            msg << "lower branch cannot reach " << target_lp << " eV for e_x=" << p.e_x << ", rabi=" << p.rabi;
            throw ValidationError(msg.str());
        }
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (lp(mid) > target_lp ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<DispersionRow> branch_dispersion(const CouplingParams& p, const CavityModel& m,
                                             const AngleGrid& g, ModelKind kind) {
    validate(p);
    validate(m);
    std::vector<DispersionRow> rows;
    rows.reserve(g.size());
    for (double theta : g.angles()) {
        const double ec = cavity_energy(m, theta);
        const BranchEnergies e = branch_energies(ec, p, kind);
        rows.push_back({theta, ec, e.lp, e.up});
    }
    return rows;
}

}  // namespace polariton
