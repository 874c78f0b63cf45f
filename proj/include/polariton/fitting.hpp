#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polariton/cavity.hpp"
#include "polariton/hopfield.hpp"

namespace polariton {

struct PeakObservation {
    double theta_deg = 0.0;
    std::optional<double> e_lp;
    std::optional<double> e_up;
    double weight = 1.0;
};

class PeakDataset {
public:
    PeakDataset() = default;
    /// Throws ValidationError unless there are >= 4 rows carrying at least
    /// one branch energy, thetas are unique and weights are >= 0.
    explicit PeakDataset(std::vector<PeakObservation> rows);

    const std::vector<PeakObservation>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    std::size_t lp_count() const;
    std::size_t up_count() const;
    std::size_t observation_count() const { return lp_count() + up_count(); }

private:
    std::vector<PeakObservation> rows_;
};

/// CSV with header `theta_deg,e_lp_ev,e_up_ev,weight`; empty cells are
/// missing observations, an empty weight means 1.
PeakDataset read_peak_dataset(std::istream& in, const std::string& source = "<stream>");
PeakDataset read_peak_dataset_file(const std::string& path);
void write_peak_dataset(std::ostream& out, const PeakDataset& d);

// Parameter order used by masks and bounds.
enum class FitParam : std::size_t { ExcitonEnergy = 0, Rabi = 1, CavityE0 = 2, NEff = 3 };
inline constexpr std::size_t kFitParamCount = 4;
const char* to_string(FitParam p);

struct FitParameters {
    CouplingParams coupling;
    CavityModel cavity;

    std::array<double, kFitParamCount> to_array() const;
    static FitParameters from_array(const std::array<double, kFitParamCount>& v);
};

struct Bounds {
    double lo = 0.0;
    double hi = 0.0;
};

struct FitConfig {
    std::array<bool, kFitParamCount> free{true, true, true, true};
    std::array<Bounds, kFitParamCount> bounds{{{0.3, 3.0}, {1e-4, 1.5}, {0.3, 3.0}, {1.0, 4.0}}};
    ModelKind model = ModelKind::FullHopfield;
    double tolerance = 1e-10;  // relative simplex size, normalised coordinates
    int max_iterations = 5000;
    int restarts = 8;
    std::uint64_t seed = 0;
    double jitter = 0.15;  // restart spread as a fraction of each bound range
};

void validate(const FitConfig& cfg);

struct FitResult {
    CouplingParams coupling;
    CavityModel cavity;
    double rms = 0.0;  // eV
    std::vector<double> residuals;
    bool converged = false;
    int iterations = 0;
    int best_restart = 0;
};

/// Model minus observed branch energy times sqrt(weight), in dataset order
/// with LP before UP inside a row.
std::vector<double> residuals(const CouplingParams& p, const CavityModel& m, const PeakDataset& d, ModelKind kind);

/// Weighted sum of squared residuals, accumulated in ascending-theta order so
/// it does not depend on row order.
double objective(const CouplingParams& p, const CavityModel& m, const PeakDataset& d, ModelKind kind);

/// Bounded Nelder-Mead with cfg.restarts seeded restarts (run in parallel);
/// the lowest rms wins, ties within 1e-15 go to the lowest restart index.
/// Throws ValidationError for an invalid init/config, NumericalError if no
/// restart can evaluate the objective.
FitResult fit_dispersion(const PeakDataset& d, const FitParameters& init, const FitConfig& cfg);

/// Starting point from the data: e_x = midpoint of the least-split row,
/// rabi = that splitting, e0 = lowest-angle LP, n_eff = 1.7.
FitParameters initial_guess(const PeakDataset& d);

/// Branch energies on the grid plus seeded gaussian noise (sigma in eV).
PeakDataset synthesize_dataset(const CouplingParams& p, const CavityModel& m, const AngleGrid& g, ModelKind kind,
                               double noise_sigma, std::uint64_t seed);

}  // namespace polariton
