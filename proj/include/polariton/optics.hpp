#pragma once

// Transfer-matrix optics for planar stratified media.
//
// Layers are ordered ambient -> substrate. The incidence angle is taken in
// the (lossless) ambient. TE is s-polarised, TM is p-polarised. Time
// convention exp(-i omega t): passive media have Im(eps) >= 0.

#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "polariton/cavity.hpp"

namespace polariton {

using Complex = std::complex<double>;

struct ConstantIndex {
    double n = 1.0;
    double k = 0.0;
};

struct IndexRow {
    double energy_ev = 0.0;
    double n = 0.0;
    double k = 0.0;
};

// (n, k) table with linear interpolation; energies strictly increasing.
class TabulatedIndex {
public:
    TabulatedIndex() = default;
    explicit TabulatedIndex(std::vector<IndexRow> rows, std::string source = {});

    /// Complex index n + ik at energy e. Throws ValidationError outside the table.
    Complex index(double e) const;

    std::span<const IndexRow> rows() const { return rows_; }
    const std::string& source() const { return source_; }

private:
    std::vector<IndexRow> rows_;
    std::string source_;
};

struct LorentzOscillator {
    double f = 0.0;      // strength, eV^2
    double e_res = 0.0;  // resonance, eV
    double gamma = 0.0;  // damping, eV
};

struct LorentzSet {
    double eps_inf = 1.0;
    std::vector<LorentzOscillator> oscillators;
};

void validate(const LorentzSet& m);

using DielectricModel = std::variant<ConstantIndex, TabulatedIndex, LorentzSet>;

/// eps_inf + sum_j f_j / (e_res_j^2 - E^2 - i gamma_j E)
Complex lorentz_epsilon(const LorentzSet& m, double e);

Complex epsilon(const DielectricModel& m, double e);

/// Intensity absorption coefficient 2 E Im(sqrt(eps)) / (hbar c) in 1/cm.
double absorption_coefficient(Complex eps, double e);

/// Maximum of absorption_coefficient over energy for a Lorentz film.
double peak_absorption_coefficient(const LorentzSet& m);

/// Strength f of a single oscillator whose peak absorption equals target_alpha
/// (1/cm) to 0.1%. Throws NumericalError if no bracket is found.
double calibrate_oscillator_strength(double target_alpha, double e_res, double gamma, double eps_inf);

struct Layer {
    DielectricModel medium;
    std::optional<double> thickness_nm;  // empty for semi-infinite

    static Layer semi_infinite(DielectricModel m) { return {std::move(m), std::nullopt}; }
    static Layer slab(DielectricModel m, double thickness_nm) { return {std::move(m), thickness_nm}; }
};

class Stack {
public:
    Stack() = default;
    /// Throws ValidationError unless first/last are semi-infinite, interior
    /// layers have finite positive thickness, and at least two layers exist.
    explicit Stack(std::vector<Layer> layers);

    std::span<const Layer> layers() const { return layers_; }
    Stack reversed() const;

private:
    std::vector<Layer> layers_;
};

enum class Polarization { TE, TM };

struct TRA {
    double T = 0.0;
    double R = 0.0;
    double A = 0.0;
};

/// Throws ValidationError for bad angle or lossy ambient, NumericalError for
/// a singular or non-finite result.
TRA transfer_matrix(const Stack& s, double e, double theta_deg, Polarization pol);

struct Spectrum {
    std::vector<double> energy;
    std::vector<double> T;
    std::vector<double> R;
    std::vector<double> A;
};

// One spectrum per angle, angles outer.
struct AngleSpectra {
    AngleGrid angles;
    std::vector<Spectrum> spectra;
};

/// first, first+step, ... <= last
std::vector<double> uniform_energy_grid(double first, double last, double step);

/// OpenMP over the (angle, energy) grid. Each point is computed independently,
/// so the result is bitwise identical to simulate_angle_spectra_serial.
AngleSpectra simulate_angle_spectra(const Stack& s, const AngleGrid& g, std::span<const double> energies,
                                    Polarization pol);

/// Single-threaded reference implementation.
AngleSpectra simulate_angle_spectra_serial(const Stack& s, const AngleGrid& g,
                                           std::span<const double> energies, Polarization pol);

/// CSV with header `energy_ev,n,k`.
TabulatedIndex read_index_table(std::istream& in, const std::string& source = "<stream>");
TabulatedIndex read_index_table_file(const std::string& path);

}  // namespace polariton
