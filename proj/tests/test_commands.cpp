#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "polariton/commands.hpp"
#include "polariton/errors.hpp"

using namespace polariton;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

RunConfig parse_text(const std::string& text) {
    std::istringstream in(text);
    return RunConfig::parse(in, "test.cfg", POLARITON_CONFIG_DIR);
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("polariton_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* kSmallCavity = R"(
[film]
alpha_target = 1.05e5
thickness_nm = 280
[mirror]
table = ../data/au_drude.csv
thickness_nm = 22
[stack]
layers = mirror, film, mirror
[grid]
theta_max = 60
theta_step = 15
energy_step = 0.002
[peaks]
min_prominence = 1e-4
window_max = 2.0
)";

}  // namespace

TEST_CASE("report numbers keep ten significant digits") {
    CHECK(report_number(0.20491803278688525) == 0.2049180328);
    CHECK(report_number(1.7100977198697068e21) == 1.71009772e21);
    CHECK(report_number(0.0) == 0.0);
    CHECK(report_number(-1.23456789012345) == -1.23456789);
}

TEST_CASE("gap report") {
    const auto j = gap_report({1.22, 0.50});
    CHECK(j["eta"].get<double>() == Approx(0.2049180328).epsilon(1e-12));
    CHECK(j["gap_formula_ev"].get<double>() == Approx(0.25 / 2.44).epsilon(1e-9));
    CHECK(j["gap_formula_relative"].get<double>() == Approx(2.0 * 0.2049180328 * 0.2049180328).epsilon(1e-9));
    CHECK(j["gap_asymptotic_ev"].get<double>() == Approx(0.1071657805).epsilon(1e-9));
    CHECK(gap_report({1.0, 1.5})["gap_asymptotic_ev"].is_null());
}

TEST_CASE("spectra CSV round trip") {
    AngleSpectra s{AngleGrid({0.0, 10.0}), {}};
    for (int a = 0; a < 2; ++a) {
        Spectrum sp;
        for (int i = 0; i < 5; ++i) {
            sp.energy.push_back(1.0 + 0.1 * i);
            sp.T.push_back(0.1 * i + a * 1e-3 + 1.0 / 3.0);
            sp.R.push_back(0.2);
            sp.A.push_back(1.0 - sp.T.back() - 0.2);
        }
        s.spectra.push_back(sp);
    }
    std::ostringstream out;
    write_spectra_csv(out, s);
    std::istringstream in(out.str());
    const auto back = read_spectra_csv(in);
    REQUIRE(back.spectra.size() == 2);
    CHECK(back.angles[1] == 10.0);
    for (int a = 0; a < 2; ++a) {
        CHECK(back.spectra[a].energy == s.spectra[a].energy);
        CHECK(back.spectra[a].T == s.spectra[a].T);
        CHECK(back.spectra[a].A == s.spectra[a].A);
    }
    std::istringstream bad("angle_deg,energy_ev,transmission,reflection,absorption\n0,1,0.5,0.5\n");
    CHECK_THROWS_AS(read_spectra_csv(bad), ValidationError);
}

TEST_CASE("simulated cavity shows two branches around the exciton") {
    const auto cfg = parse_text(kSmallCavity);
    const auto sim = run_simulation(cfg, Polarization::TE);
    REQUIRE(sim.dataset.size() == 5);
    for (const auto& row : sim.dataset.rows()) {
        REQUIRE(row.e_lp.has_value());
        REQUIRE(row.e_up.has_value());
        CHECK(*row.e_lp < 1.22);
        CHECK(*row.e_up > 1.22);
    }
    // spectra conserve energy
    for (const auto& sp : sim.spectra.spectra) {
        for (std::size_t i = 0; i < sp.energy.size(); ++i) {
            REQUIRE(std::abs(sp.T[i] + sp.R[i] + sp.A[i] - 1.0) < 1e-9);
        }
    }

    SUBCASE("empty cavity has one mode per angle") {
        auto empty = cfg;
        empty.set("film.strength_scale", "0");
        const auto bare = run_simulation(empty, Polarization::TE);
        for (const auto& peaks : bare.peaks) {
            CHECK(peaks.size() == 1);
        }
    }
}

TEST_CASE("simulate and peaks subcommands are deterministic") {
    const auto cfg = parse_text(kSmallCavity);
    CliOptions opts;
    opts.output_dir = scratch("sim_a");
    const auto first = cmd_simulate(cfg, opts);
    opts.output_dir = scratch("sim_b");
    const auto second = cmd_simulate(cfg, opts);
    REQUIRE(first.size() == 2);
    CHECK(slurp(first[0]) == slurp(second[0]));
    CHECK(slurp(first[1]) == slurp(second[1]));

    // re-extracting from the written spectra reproduces the peak file
    CliOptions peak_opts;
    peak_opts.output_dir = scratch("peaks");
    peak_opts.input = first[0];
    const auto extracted = cmd_peaks(cfg, peak_opts);
    CHECK(slurp(extracted[0]) == slurp(first[1]));

    CHECK_THROWS_AS(cmd_simulate(parse_text("[coupling]\ne_x = 1.22\nrabi = 0.5\n"), opts), ValidationError);
    CHECK_THROWS_AS(cmd_peaks(cfg, CliOptions{}), ValidationError);
}

TEST_CASE("fit subcommand") {
    const fs::path dir = scratch("fit");
    const auto d = synthesize_dataset({1.22, 0.5}, {1.0, 1.5}, AngleGrid::uniform(0.0, 60.0, 5.0),
                                      ModelKind::FullHopfield, 0.0, 0);
    {
        std::ofstream out(dir / "peaks.csv");
        write_peak_dataset(out, d);
    }
    const auto cfg = parse_text("[fit]\nrestarts = 4\n");
    CliOptions opts;
    opts.output_dir = dir;
    opts.input = dir / "peaks.csv";
    const auto j = cmd_fit(cfg, opts);

    const double rabi = j["coupling"]["rabi"].get<double>();
    const double ex = j["coupling"]["e_x"].get<double>();
    CHECK(std::abs(rabi - 0.5) / 0.5 < 0.01);
    CHECK(j["eta"].get<double>() == Approx(rabi / (2.0 * ex)).epsilon(1e-9));
    CHECK(j["gap"]["gap_formula_ev"].get<double>() == Approx(rabi * rabi / (2.0 * ex)).epsilon(1e-9));
    CHECK(j["fit"]["residuals_ev"].size() == d.observation_count());
    CHECK(j["dataset"]["rows"].get<std::size_t>() == 13);
    CHECK(j["model"] == "hopfield");
    CHECK(j["tool"]["version"] == kToolVersion);

    SUBCASE("written report round-trips") {
        const auto text = slurp(dir / "report.json");
        const auto parsed = nlohmann::json::parse(text);
        CHECK(parsed == j);
        CHECK(parsed.dump(2) + "\n" == text);
    }
    SUBCASE("same seed, byte-identical report") {
        const auto first = slurp(dir / "report.json");
        cmd_fit(cfg, opts);
        CHECK(slurp(dir / "report.json") == first);
    }
    SUBCASE("under-determined dataset names the branch counts") {
        auto message = [&](const std::string& body) {
            std::ofstream out(dir / "thin.csv");
            out << "theta_deg,e_lp_ev,e_up_ev,weight\n" << body;
            out.close();
            CliOptions thin = opts;
            thin.input = dir / "thin.csv";
            try {
                cmd_fit(cfg, thin);
            } catch (const ValidationError& e) {
                return std::string(e.what());
            }
            return std::string();
        };
        const auto lp_only = message("0,1.0,,1\n5,1.01,,1\n10,1.02,,0\n20,1.03,,0\n");
        CHECK(lp_only.find("4 LP, 0 UP") != std::string::npos);
        const auto few = message("0,1.0,1.5,1\n5,1.01,,0\n10,1.02,,0\n20,1.03,,0\n");
        CHECK(few.find("1 LP and 1 UP") != std::string::npos);
    }
}

TEST_CASE("report subcommand at explicit parameters") {
    const auto cfg = RunConfig::load(POLARITON_CONFIG_DIR "/operating_point.cfg");
    CliOptions opts;
    opts.output_dir = scratch("report");
    const auto j = cmd_report(cfg, opts);
    CHECK(j["normal_incidence"]["lp"].get<double>() == Approx(1.02).epsilon(1e-9));
    CHECK(j["fit"].is_null());
    CHECK(j["config_hash"] == cfg.hash_hex());
    CHECK(j["inputs"]["cavity.lp0"] == "1.02");
    CHECK(j["eta_rounded"].get<double>() == 0.2);
    const auto& table = j["dispersion"];
    REQUIRE(table.size() == 13);
    for (std::size_t i = 1; i < table.size(); ++i) {
        CHECK(table[i]["e_cav"].get<double>() > table[i - 1]["e_cav"].get<double>());
    }
    const auto& over = j["charged_polariton"]["override_mass"];
    CHECK(over["m_ph"].get<double>() == 1e-4);
    CHECK(over["density"].get<double>() == Approx(1.710e21).epsilon(5e-3));
    const double m_target = j["charged_polariton"]["m_ph_for_target"]["m_ph"].get<double>();
    CHECK(m_target > 0.0);

    CHECK_THROWS_AS(cmd_report(parse_text("[coupling]\ne_x = 1.22\nrabi = 0.5\n"), opts), ValidationError);

    SUBCASE("zero coupling") {
        const auto zero = parse_text("[coupling]\ne_x = 1.22\nrabi = 0\n[cavity]\ne0 = 1.0\nn_eff = 1.5\n[material]\n"
                                     "m_ex = 25\n[grid]\ntheta_max = 40\n");
        const auto z = cmd_report(zero, opts);
        const auto& over0 = z["charged_polariton"]["cavity_mass"];
        CHECK(over0["gs_charge"].get<double>() == 0.0);
        const double e_eff = over0["e_eff_lp"].get<double>();
        CHECK((e_eff == 0.0 || e_eff == 1.0));
    }
}

TEST_CASE("fractions subcommand") {
    const auto cfg = RunConfig::load(POLARITON_CONFIG_DIR "/operating_point.cfg");
    CliOptions opts;
    opts.output_dir = scratch("fractions");
    const auto paths = cmd_fractions(cfg, opts);
    std::istringstream in(slurp(paths.at(0)));
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("theta_deg,e_cav_ev,e_lp_ev", 0) == 0);
    int rows = 0;
    for (std::string line; std::getline(in, line);) {
        ++rows;
    }
    CHECK(rows == 13);

    const auto table = fraction_table(cfg.coupling(), cfg.cavity(ModelKind::FullHopfield), cfg.angle_grid());
    for (const auto& r : table) {
        CHECK(r.lp_fractions.exciton_fraction + r.lp_fractions.photon_fraction == Approx(1.0));
        CHECK(r.ground_state.n_exciton > 0.0);
    }
}
