// polariton: command-line front end.
//
//   polariton simulate  --config cavity.cfg --output out/
//   polariton peaks     --config cavity.cfg --input out/spectra.csv
//   polariton fit       --config cavity.cfg --input out/peaks.csv
//   polariton report    --config operating_point.cfg
//   polariton gap       --set coupling.e_x=1.22 --set coupling.rabi=0.5
//   polariton fractions --config operating_point.cfg
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polariton/commands.hpp"
#include "polariton/errors.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

void print_paths(const std::vector<std::filesystem::path>& paths) {
    for (const auto& p : paths) {
        std::cout << p.string() << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace polariton;

    CLI::App app{"Ultrastrong-coupling polariton toolkit: dispersions, Hopfield fractions, "
                 "charged-polariton observables, transfer-matrix spectra and dispersion fits"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

    std::string config_path;
    std::string output_dir = ".";
    std::string model_name;
    std::string polarization = "te";
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;

    app.add_option("--config", config_path, "Run configuration (key = value with [sections])")->check(
        CLI::ExistingFile);
    app.add_option("--output", output_dir, "Directory for written files");
    app.add_option("--model", model_name, "Dispersion model")->check(CLI::IsMember({"quadratic", "hopfield"}));
    app.add_option("--polarization", polarization, "TMM polarization")->check(CLI::IsMember({"te", "tm"}));
    auto* seed_opt = app.add_option("--seed", seed, "Seed for fit restarts");
    app.add_option("--set", overrides, "Override a config key: section.key=value (repeatable)");

    std::string input;
    auto* simulate = app.add_subcommand("simulate", "Transfer-matrix spectra and extracted branch peaks");
    auto* peaks = app.add_subcommand("peaks", "Extract branch peaks from a spectra CSV");
    peaks->add_option("--input", input, "Spectra CSV")->check(CLI::ExistingFile);
    auto* fit = app.add_subcommand("fit", "Fit the dispersion model to a peak dataset");
    fit->add_option("--input", input, "Peak dataset CSV")->check(CLI::ExistingFile);
    auto* report = app.add_subcommand("report", "Derived quantities for explicit parameters");
    auto* gap = app.add_subcommand("gap", "Normalized coupling and polariton gap");
    auto* fractions = app.add_subcommand("fractions", "Hopfield fractions and ground-state content vs angle");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            cfg = RunConfig::load(config_path);
        } else {
            std::istringstream empty;
            cfg = RunConfig::parse(empty, "<command line>");
        }
        for (const auto& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) {
                throw ValidationError("--set expects section.key=value, got '" + o + "'");
            }
            cfg.set(o.substr(0, eq), o.substr(eq + 1));
        }
        if (!overrides.empty()) {
            cfg.validate_sections();
        }

        CliOptions opts;
        opts.output_dir = output_dir;
        if (!model_name.empty()) {
            opts.model = parse_model(model_name);
        }
        opts.polarization = parse_polarization(polarization);
        if (seed_opt->count() > 0) {
            opts.seed = seed;
        }
        if (!input.empty()) {
            opts.input = input;
        }

        if (simulate->parsed()) {
            print_paths(cmd_simulate(cfg, opts));
        } else if (peaks->parsed()) {
            print_paths(cmd_peaks(cfg, opts));
        } else if (fit->parsed()) {
            const auto j = cmd_fit(cfg, opts);
            std::cout << "rabi = " << j["coupling"]["rabi"] << " eV, e_x = " << j["coupling"]["e_x"]
                      << " eV, eta = " << j["eta"] << ", rms = " << j["fit"]["rms_ev"] << " eV\n";
        } else if (report->parsed()) {
            const auto j = cmd_report(cfg, opts);
            std::cout << j["normal_incidence"].dump(2) << '\n' << j["charged_polariton"].dump(2) << '\n';
        } else if (gap->parsed()) {
            std::cout << cmd_gap(cfg, opts).dump(2) << '\n';
        } else if (fractions->parsed()) {
            print_paths(cmd_fractions(cfg, opts));
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
