#pragma once

// Flat key=value run configuration with [section] headers.
//
//   # comment
//   [coupling]
//   e_x  = 1.22
//   rabi = 0.50
//
// Keys are addressed as "section.key". Unknown or duplicate keys are
// rejected with their file location.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polariton/cavity.hpp"
#include "polariton/fitting.hpp"
#include "polariton/observables.hpp"
#include "polariton/optics.hpp"
#include "polariton/peaks.hpp"

namespace polariton {

struct FilmSettings {
    LorentzSet model;          // calibrated and scaled
    double thickness_nm = 0.0;
    double strength_unscaled = 0.0;
};

struct PeakSettings {
    double min_prominence = 1e-3;
    EnergyWindow window{0.6, 2.0};
    double split_hint = 1.22;  // lone peaks below this are LP
};

class RunConfig {
public:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };

    RunConfig() = default;

    /// Parses and validates every section that is present.
    static RunConfig parse(std::istream& in, const std::string& source = "<config>",
                           std::filesystem::path base_dir = {});
    static RunConfig load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    bool has_section(const std::string& section) const;
    const std::map<std::string, Entry>& entries() const { return entries_; }
    const std::string& source() const { return source_; }

    /// Throws ValidationError naming the key when missing or malformed.
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    std::string text(const std::string& key) const;
    std::string text_or(const std::string& key, const std::string& fallback) const;

    /// Override a single key; call validate_sections() afterwards.
    void set(const std::string& key, const std::string& value);

    /// Owning-module invariants for every section that is present.
    void validate_sections() const;

    CouplingParams coupling() const;
    /// cavity.e0 directly, or solved from cavity.lp0 (LP energy at normal
    /// incidence) with the given model.
    CavityModel cavity(ModelKind kind) const;
    MaterialParams material() const;
    std::optional<double> target_charge_to_mass() const;
    FilmSettings film() const;
    Stack stack() const;
    AngleGrid angle_grid() const;
    std::vector<double> energy_grid() const;
    PeakSettings peak_settings() const;
    FitConfig fit_config() const;
    ModelKind model() const;

    /// FNV-1a over the canonical form of every non-io key.
    std::uint64_t hash() const;
    std::string hash_hex() const;

private:
    std::string where(const std::string& key) const;
    std::filesystem::path resolve(const std::string& path) const;

    std::map<std::string, Entry> entries_;
    std::string source_;
    std::filesystem::path base_dir_;
};

ModelKind parse_model(const std::string& name);
std::string to_string(ModelKind kind);
Polarization parse_polarization(const std::string& name);
std::string to_string(Polarization pol);

}  // namespace polariton
