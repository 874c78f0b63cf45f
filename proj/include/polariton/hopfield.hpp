#pragma once

// Light-matter coupling of a single cavity mode to a single exciton in the
// ultrastrong regime. All energies are in eV.

#include <complex>

#include <Eigen/Core>

namespace polariton {

struct CouplingParams {
    double e_x = 0.0;   // bare exciton energy
    double rabi = 0.0;  // vacuum Rabi splitting
};

// Throws ValidationError unless e_x > 0, 0 <= rabi < 2 e_x.
void validate(const CouplingParams& p);

struct BranchEnergies {
    double lp = 0.0;
    double up = 0.0;
};

enum class ModelKind {
    Quadratic,     // closed-form quartic with resonant coupling scaled by E_cav
    FullHopfield,  // Bogoliubov problem with anti-resonant and diamagnetic terms
};

enum class Branch { Lower, Upper };

enum class FractionNorm {
    Probability,  // divide by |x|^2 + |z|^2 + |y|^2 + |w|^2
    Bogoliubov,   // photon = |x|^2 - |y|^2, exciton = |z|^2 - |w|^2
};

// Amplitudes of one polariton annihilation operator
//   p = x a + z b + y a^dagger + w b^dagger
// where a is the cavity photon and b the exciton.
struct BogoliubovVector {
    std::complex<double> x;  // resonant photon
    std::complex<double> z;  // resonant exciton
    std::complex<double> y;  // anti-resonant photon
    std::complex<double> w;  // anti-resonant exciton

    // |x|^2 + |z|^2 - |y|^2 - |w|^2
    double norm() const;
};

struct HopfieldCoefficients {
    BogoliubovVector lp;
    BogoliubovVector up;

    const BogoliubovVector& operator[](Branch b) const { return b == Branch::Lower ? lp : up; }
};

struct BranchFractions {
    double photon_fraction = 0.0;
    double exciton_fraction = 0.0;
};

// Mean virtual occupations of the coupled vacuum.
struct GroundStateContent {
    double n_photon = 0.0;
    double n_exciton = 0.0;
};

using HopfieldMatrix = Eigen::Matrix4cd;

struct HopfieldSolution {
    BranchEnergies energies;
    HopfieldCoefficients coefficients;
};

/// eta = rabi / (2 e_x)
double normalized_coupling(const CouplingParams& p);

/// Roots of (E_cav^2 - E^2)(E_x^2 - E^2) = rabi^2 E_cav^2.
/// Throws NumericalError when the lower root is not positive (rabi >= e_x).
BranchEnergies solve_quadratic_dispersion(double e_cav, const CouplingParams& p);

/// Positive eigenfrequencies of build_hopfield_matrix in closed form. With
/// D = g^2/E_x the characteristic polynomial reduces to
///   (E^2 - E_cav^2 - rabi^2 E_cav/E_x)(E^2 - E_x^2) = rabi^2 E_cav E_x.
BranchEnergies solve_hopfield_dispersion(double e_cav, const CouplingParams& p);

BranchEnergies branch_energies(double e_cav, const CouplingParams& p, ModelKind kind);

/// Branches at E_cav = E_x: sqrt(E_x^2 + (rabi/2)^2) -/+ rabi/2.
BranchEnergies resonance_energies(const CouplingParams& p);

/// rabi^2 / (2 e_x)
double polariton_gap_formula(const CouplingParams& p);

/// Distance between the upper-branch asymptote (E_x) and the lower-branch
/// asymptote sqrt(E_x^2 - rabi^2) of the quadratic model. Throws
/// ValidationError for rabi >= e_x.
double polariton_gap_asymptotic(const CouplingParams& p);

/// Bogoliubov dynamical matrix in the basis (a, b, a^dagger, b^dagger) for
///   H = E_cav a'a + E_x b'b + g (a + a')(b + b') + D (a + a')^2
/// with g = rabi/2 and D = g^2/E_x. Eigenvalues come in +/- pairs.
HopfieldMatrix build_hopfield_matrix(double e_cav, const CouplingParams& p);

/// Positive-frequency eigenpairs, normalised to Bogoliubov norm +1 with x real
/// and non-negative (z when x vanishes). Throws NumericalError if the solver
/// fails or the two branches are degenerate to 1e-12 eV.
HopfieldSolution diagonalize_hopfield(const HopfieldMatrix& m);

/// Convenience: build + diagonalize.
HopfieldSolution solve_hopfield(double e_cav, const CouplingParams& p);

BranchFractions branch_fractions(const HopfieldCoefficients& c, Branch branch,
                                 FractionNorm norm = FractionNorm::Probability);

GroundStateContent ground_state_content(const HopfieldCoefficients& c);

}  // namespace polariton
