#include "polariton/hopfield.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "polariton/errors.hpp"

namespace polariton {

namespace {

// Roots of t^2 - s t + p = 0 (t = E^2), smaller root via Vieta to avoid
// cancellation.
BranchEnergies biquadratic_roots(double s, double p, const char* what) {
    const double disc = s * s - 4.0 * p;
    if (!(disc >= 0.0) || !std::isfinite(disc)) {
        std::ostringstream msg;
        msg << what << ": negative discriminant " << disc;
        throw NumericalError(msg.str());
    }
    const double hi2 = 0.5 * (s + std::sqrt(disc));
    const double lo2 = p / hi2;
    if (!(lo2 > 0.0)) {
        std::ostringstream msg;
        msg << what << ": lower branch has E^2 = " << lo2 << " <= 0";
        throw NumericalError(msg.str());
    }
    return {std::sqrt(lo2), std::sqrt(hi2)};
}

void require_positive_cavity(double e_cav) {
    if (!(e_cav > 0.0) || !std::isfinite(e_cav)) {
        std::ostringstream msg;
        msg << "cavity energy must be positive and finite, got " << e_cav;
        throw ValidationError(msg.str());
    }
}

}  // namespace

double BogoliubovVector::norm() const {
    return std::norm(x) + std::norm(z) - std::norm(y) - std::norm(w);
}

void validate(const CouplingParams& p) {
    std::ostringstream msg;
    if (!(p.e_x > 0.0) || !std::isfinite(p.e_x)) {
        msg << "coupling.e_x must be > 0, got " << p.e_x;
    } else if (!(p.rabi >= 0.0) || !std::isfinite(p.rabi)) {
        msg << "coupling.rabi must be >= 0, got " << p.rabi;
    } else if (!(p.rabi < 2.0 * p.e_x)) {
        msg << "coupling.rabi must be < 2 e_x (eta < 1), got rabi=" << p.rabi << " e_x=" << p.e_x;
    } else {
        return;
    }
    throw ValidationError(msg.str());
}

double normalized_coupling(const CouplingParams& p) {
    validate(p);
    return p.rabi / (2.0 * p.e_x);
}

BranchEnergies solve_quadratic_dispersion(double e_cav, const CouplingParams& p) {
    validate(p);
    require_positive_cavity(e_cav);
    const double c2 = e_cav * e_cav;
    const double x2 = p.e_x * p.e_x;
    const double s = c2 + x2;
    const double prod = c2 * (x2 - p.rabi * p.rabi);
    return biquadratic_roots(s, prod, "quadratic dispersion");
}

BranchEnergies solve_hopfield_dispersion(double e_cav, const CouplingParams& p) {
    validate(p);
    require_positive_cavity(e_cav);
    const double dressed = e_cav * e_cav + p.rabi * p.rabi * e_cav / p.e_x;
    const double x2 = p.e_x * p.e_x;
    return biquadratic_roots(dressed + x2, e_cav * e_cav * x2, "hopfield dispersion");
}

BranchEnergies branch_energies(double e_cav, const CouplingParams& p, ModelKind kind) {
    return kind == ModelKind::Quadratic ? solve_quadratic_dispersion(e_cav, p)
                                        : solve_hopfield_dispersion(e_cav, p);
}

BranchEnergies resonance_energies(const CouplingParams& p) {
    validate(p);
    const double half = 0.5 * p.rabi;
    const double centre = std::sqrt(p.e_x * p.e_x + half * half);
    return {centre - half, centre + half};
}

double polariton_gap_formula(const CouplingParams& p) {
    validate(p);
    return p.rabi * p.rabi / (2.0 * p.e_x);
}

double polariton_gap_asymptotic(const CouplingParams& p) {
    validate(p);
    if (!(p.rabi < p.e_x)) {
        std::ostringstream msg;
        msg << "lower-branch asymptote undefined for rabi >= e_x (rabi=" << p.rabi << ", e_x=" << p.e_x
            << ")";
        throw ValidationError(msg.str());
    }
    // e_x - sqrt(e_x^2 - r^2) rewritten without cancellation
    const double r2 = p.rabi * p.rabi;
    return r2 / (p.e_x + std::sqrt(p.e_x * p.e_x - r2));
}

HopfieldMatrix build_hopfield_matrix(double e_cav, const CouplingParams& p) {
    validate(p);
    require_positive_cavity(e_cav);
    const double g = 0.5 * p.rabi;
    const double d = g * g / p.e_x;

    Eigen::Matrix2d a;
    a << e_cav + 2.0 * d, g, g, p.e_x;
    Eigen::Matrix2d b;
    b << 2.0 * d, g, g, 0.0;

    // [p, H] = E p for p = x.a + y.a' gives [[A, -B], [B, -A]] acting on (x, y).
    HopfieldMatrix m = HopfieldMatrix::Zero();
    m.block<2, 2>(0, 0) = a.cast<std::complex<double>>();
    m.block<2, 2>(0, 2) = -b.cast<std::complex<double>>();
    m.block<2, 2>(2, 0) = b.cast<std::complex<double>>();
    m.block<2, 2>(2, 2) = -a.cast<std::complex<double>>();
    return m;
}

HopfieldSolution diagonalize_hopfield(const HopfieldMatrix& m) {
    Eigen::ComplexEigenSolver<HopfieldMatrix> solver(m, true);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("hopfield eigensolver did not converge");
    }
    const auto& values = solver.eigenvalues();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());

    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return values[i].real() > values[j].real(); });
    for (int i : order) {
        if (std::abs(values[i].imag()) > 1e-8 * scale) {
            std::ostringstream msg;
            msg << "hopfield eigenvalue has imaginary part " << values[i].imag()
                << " (unstable coupling)";
            throw NumericalError(msg.str());
        }
    }
    const int i_up = order[0];
    const int i_lp = order[1];
    const double up = values[i_up].real();
    const double lp = values[i_lp].real();
    if (!(lp > 0.0)) {
        throw NumericalError("hopfield matrix has fewer than two positive eigenvalues");
    }
    if (up - lp < 1e-12) {
        throw NumericalError("hopfield branches degenerate (splitting < 1e-12 eV): zero coupling at resonance");
    }

    auto normalised = [&](int idx) {
        const Eigen::Vector4cd v = solver.eigenvectors().col(idx);
        BogoliubovVector out{v[0], v[1], v[2], v[3]};
        const double n = out.norm();
        if (!(n > 0.0)) {
            throw NumericalError("positive-frequency hopfield eigenvector has non-positive Bogoliubov norm");
        }
        const double inv = 1.0 / std::sqrt(n);
        std::complex<double> ref = std::abs(out.x) > 1e-12 ? out.x : out.z;
        const std::complex<double> phase =
            std::abs(ref) > 0.0 ? std::conj(ref) / std::abs(ref) : std::complex<double>(1.0);
        out.x *= inv * phase;
        out.z *= inv * phase;
        out.y *= inv * phase;
        out.w *= inv * phase;
        // the reference amplitude is real by construction; drop round-off
        if (std::abs(out.x) > 1e-12) {
            out.x = std::abs(out.x);
        } else {
            out.z = std::abs(out.z);
        }
        return out;
    };

    return {{lp, up}, {normalised(i_lp), normalised(i_up)}};
}

HopfieldSolution solve_hopfield(double e_cav, const CouplingParams& p) {
    return diagonalize_hopfield(build_hopfield_matrix(e_cav, p));
}

BranchFractions branch_fractions(const HopfieldCoefficients& c, Branch branch, FractionNorm norm) {
    const BogoliubovVector& v = c[branch];
    const double xx = std::norm(v.x);
    const double zz = std::norm(v.z);
    const double yy = std::norm(v.y);
    const double ww = std::norm(v.w);
    if (norm == FractionNorm::Bogoliubov) {
        const double total = xx + zz - yy - ww;
        const double exciton = (zz - ww) / total;
        return {1.0 - exciton, exciton};
    }
    const double exciton = (zz + ww) / (xx + zz + yy + ww);
    return {1.0 - exciton, exciton};
}

GroundStateContent ground_state_content(const HopfieldCoefficients& c) {
    return {std::norm(c.lp.y) + std::norm(c.up.y), std::norm(c.lp.w) + std::norm(c.up.w)};
}

}  // namespace polariton
