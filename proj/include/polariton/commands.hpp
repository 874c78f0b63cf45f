#pragma once

// Pipelines behind the command-line subcommands. Every function is
// deterministic for a fixed configuration and input.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "polariton/config.hpp"

namespace polariton {

inline constexpr const char* kToolName = "polariton";
inline constexpr const char* kToolVersion = "0.1.0";

struct CliOptions {
    std::optional<std::filesystem::path> config;
    std::filesystem::path output_dir = ".";
    std::optional<ModelKind> model;
    Polarization polarization = Polarization::TE;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> input;
};

// --- spectra ---------------------------------------------------------------

/// CSV `angle_deg,energy_ev,transmission,reflection,absorption`, angles outer.
void write_spectra_csv(std::ostream& out, const AngleSpectra& s);
AngleSpectra read_spectra_csv(std::istream& in, const std::string& source = "<stream>");

std::vector<PeakList> extract_all_peaks(const AngleSpectra& s, const PeakSettings& settings);

/// Branch-labelled peaks per angle. Rows without any peak keep both
/// energies empty.
PeakDataset dataset_from_peaks(const AngleGrid& angles, const std::vector<PeakList>& peaks,
                               const PeakSettings& settings);

struct SimulationOutput {
    AngleSpectra spectra;
    std::vector<PeakList> peaks;
    PeakDataset dataset;
};

SimulationOutput run_simulation(const RunConfig& cfg, Polarization pol);

// --- reports ---------------------------------------------------------------

/// Rounds to 10 significant digits, the precision used in every report.
double report_number(double v);

nlohmann::json gap_report(const CouplingParams& p);

nlohmann::json build_report(const RunConfig& cfg, const CouplingParams& p, const CavityModel& m, ModelKind kind,
                            const FitResult* fit);

struct FractionRow {
    double theta_deg = 0.0;
    double e_cav = 0.0;
    double lp = 0.0;
    double up = 0.0;
    BranchFractions lp_fractions;
    BranchFractions up_fractions;
    GroundStateContent ground_state;
};

std::vector<FractionRow> fraction_table(const CouplingParams& p, const CavityModel& m, const AngleGrid& g,
                                        FractionNorm norm = FractionNorm::Probability);
void write_fractions_csv(std::ostream& out, const std::vector<FractionRow>& rows);

// --- subcommands -------------------------------------------------------------
// Each writes its files under opts.output_dir and returns the paths written.

std::vector<std::filesystem::path> cmd_simulate(const RunConfig& cfg, const CliOptions& opts);
std::vector<std::filesystem::path> cmd_peaks(const RunConfig& cfg, const CliOptions& opts);
nlohmann::json cmd_fit(const RunConfig& cfg, const CliOptions& opts);
nlohmann::json cmd_report(const RunConfig& cfg, const CliOptions& opts);
nlohmann::json cmd_gap(const RunConfig& cfg, const CliOptions& opts);
std::vector<std::filesystem::path> cmd_fractions(const RunConfig& cfg, const CliOptions& opts);

}  // namespace polariton
