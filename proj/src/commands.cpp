#include "polariton/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "polariton/csv.hpp"
#include "polariton/errors.hpp"

namespace polariton {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path output_path(const RunConfig& cfg, const CliOptions& opts, const std::string& key,
                     const std::string& fallback) {
    fs::create_directories(opts.output_dir);
    return opts.output_dir / cfg.text_or(key, fallback);
}

std::ofstream open_output(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write '" + p.string() + "'");
    }
    return out;
}

void write_json(const fs::path& p, const json& j) {
    auto out = open_output(p);
    out << j.dump(2) << '\n';
}

ModelKind effective_model(const RunConfig& cfg, const CliOptions& opts) {
    return opts.model.value_or(cfg.model());
}

json coupling_json(const CouplingParams& p) {
    return {{"e_x", report_number(p.e_x)}, {"rabi", report_number(p.rabi)}};
}

json fractions_json(const BranchFractions& f) {
    return {{"photon", report_number(f.photon_fraction)}, {"exciton", report_number(f.exciton_fraction)}};
}

json charged_json(const ChargedPolaritonReport& r, double m_ph) {
    return {{"m_ph", report_number(m_ph)},
            {"e_eff_lp", report_number(r.e_eff_lp)},
            {"m_eff_lp", report_number(r.m_eff_lp)},
            {"charge_to_mass", report_number(r.charge_to_mass)},
            {"gs_charge", report_number(r.gs_charge)},
            {"density", report_number(r.density)}};
}

}  // namespace

void write_spectra_csv(std::ostream& out, const AngleSpectra& s) {
    out << "angle_deg,energy_ev,transmission,reflection,absorption\n";
    for (std::size_t ia = 0; ia < s.spectra.size(); ++ia) {
        const auto& sp = s.spectra[ia];
        const std::string angle = csv::format_double(s.angles[ia]);
        for (std::size_t ie = 0; ie < sp.energy.size(); ++ie) {
            out << angle << ',' << csv::format_double(sp.energy[ie]) << ',' << csv::format_double(sp.T[ie]) << ','
                << csv::format_double(sp.R[ie]) << ',' << csv::format_double(sp.A[ie]) << '\n';
        }
    }
}

AngleSpectra read_spectra_csv(std::istream& in, const std::string& source) {
    csv::expect_header(in, {"angle_deg", "energy_ev", "transmission", "reflection", "absorption"}, source);
    std::vector<double> angles;
    std::vector<Spectrum> spectra;
    std::string line;
    std::size_t line_no = 1;
    while (csv::next_line(in, line, line_no)) {
        const auto cells = csv::split(line);
        const std::string where = source + ":" + std::to_string(line_no);
        if (cells.size() != 5) {
            throw ValidationError(where + ": expected 5 columns");
        }
        const double angle = csv::parse_double(cells[0], where);
        if (angles.empty() || angle != angles.back()) {
            angles.push_back(angle);
            spectra.emplace_back();
        }
        auto& sp = spectra.back();
        sp.energy.push_back(csv::parse_double(cells[1], where));
        sp.T.push_back(csv::parse_double(cells[2], where));
        sp.R.push_back(csv::parse_double(cells[3], where));
        sp.A.push_back(csv::parse_double(cells[4], where));
    }
    if (spectra.empty()) {
        throw ValidationError(source + ": no spectra rows");
    }
    return {AngleGrid(std::move(angles)), std::move(spectra)};
}

std::vector<PeakList> extract_all_peaks(const AngleSpectra& s, const PeakSettings& settings) {
    std::vector<PeakList> out;
    out.reserve(s.spectra.size());
    for (const auto& sp : s.spectra) {
        out.push_back(extract_peaks(sp, settings.min_prominence, settings.window));
    }
    return out;
}

PeakDataset dataset_from_peaks(const AngleGrid& angles, const std::vector<PeakList>& peaks,
                               const PeakSettings& settings) {
    std::vector<PeakObservation> rows;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const BranchPeaks b = assign_branches(peaks[i], settings.split_hint);
        rows.push_back({angles[i], b.lp, b.up, 1.0});
    }
    return PeakDataset(std::move(rows));
}

SimulationOutput run_simulation(const RunConfig& cfg, Polarization pol) {
    const Stack stack = cfg.stack();
    const AngleGrid grid = cfg.angle_grid();
    const std::vector<double> energies = cfg.energy_grid();
    const PeakSettings settings = cfg.peak_settings();
    SimulationOutput out;
    out.spectra = simulate_angle_spectra(stack, grid, energies, pol);
    out.peaks = extract_all_peaks(out.spectra, settings);
    out.dataset = dataset_from_peaks(grid, out.peaks, settings);
    return out;
}

double report_number(double v) {
    if (!std::isfinite(v)) {
        return v;
    }
    return csv::parse_double(csv::format_significant(v, 10), "report number");
}

json gap_report(const CouplingParams& p) {
    json j;
    j["coupling"] = coupling_json(p);
    j["eta"] = report_number(normalized_coupling(p));
    const double formula = polariton_gap_formula(p);
    j["gap_formula_ev"] = report_number(formula);
    j["gap_formula_relative"] = report_number(formula / p.e_x);
    if (p.rabi < p.e_x) {
        j["gap_asymptotic_ev"] = report_number(polariton_gap_asymptotic(p));
    } else {
        j["gap_asymptotic_ev"] = nullptr;
    }
    return j;
}

std::vector<FractionRow> fraction_table(const CouplingParams& p, const CavityModel& m, const AngleGrid& g,
                                        FractionNorm norm) {
    std::vector<FractionRow> rows;
    for (double theta : g.angles()) {
        const double ec = cavity_energy(m, theta);
        const HopfieldSolution s = solve_hopfield(ec, p);
        rows.push_back({theta, ec, s.energies.lp, s.energies.up, branch_fractions(s.coefficients, Branch::Lower, norm),
                        branch_fractions(s.coefficients, Branch::Upper, norm), ground_state_content(s.coefficients)});
    }
    return rows;
}

void write_fractions_csv(std::ostream& out, const std::vector<FractionRow>& rows) {
    out << "theta_deg,e_cav_ev,e_lp_ev,e_up_ev,lp_photon,lp_exciton,up_photon,up_exciton,gs_n_photon,gs_n_exciton\n";
    for (const auto& r : rows) {
        out << csv::format_double(r.theta_deg) << ',' << csv::format_double(r.e_cav) << ','
            << csv::format_double(r.lp) << ',' << csv::format_double(r.up) << ','
            << csv::format_double(r.lp_fractions.photon_fraction) << ','
            << csv::format_double(r.lp_fractions.exciton_fraction) << ','
            << csv::format_double(r.up_fractions.photon_fraction) << ','
            << csv::format_double(r.up_fractions.exciton_fraction) << ','
            << csv::format_double(r.ground_state.n_photon) << ',' << csv::format_double(r.ground_state.n_exciton)
            << '\n';
    }
}

json build_report(const RunConfig& cfg, const CouplingParams& p, const CavityModel& m, ModelKind kind,
                  const FitResult* fit) {
    validate(p);
    validate(m);
    json j;
    j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    j["config_hash"] = cfg.hash_hex();
    json inputs = json::object();
    for (const auto& [key, entry] : cfg.entries()) {
        inputs[key] = entry.value;
    }
    j["inputs"] = inputs;
    j["model"] = to_string(kind);
    j["coupling"] = coupling_json(p);
    j["cavity"] = {{"e0", report_number(m.e0)}, {"n_eff", report_number(m.n_eff)}};

    const double eta = normalized_coupling(p);
    j["eta"] = report_number(eta);
    j["eta_rounded"] = std::round(eta * 10.0) / 10.0;
    j["gap"] = gap_report(p);
    const BranchEnergies res = resonance_energies(p);
    j["resonance"] = {{"lp", report_number(res.lp)}, {"up", report_number(res.up)}};

    // normal incidence
    const double ec0 = cavity_energy(m, 0.0);
    const BranchEnergies e0 = branch_energies(ec0, p, kind);
    const HopfieldSolution h0 = solve_hopfield(ec0, p);
    const BranchFractions lp_prob = branch_fractions(h0.coefficients, Branch::Lower, FractionNorm::Probability);
    const BranchFractions lp_bog = branch_fractions(h0.coefficients, Branch::Lower, FractionNorm::Bogoliubov);
    const GroundStateContent gs = ground_state_content(h0.coefficients);
    j["normal_incidence"] = {
        {"e_cav", report_number(ec0)},
        {"lp", report_number(e0.lp)},
        {"up", report_number(e0.up)},
        {"lp_fractions", fractions_json(lp_prob)},
        {"lp_fractions_bogoliubov", fractions_json(lp_bog)},
        {"up_fractions", fractions_json(branch_fractions(h0.coefficients, Branch::Upper))},
        {"ground_state", {{"n_photon", report_number(gs.n_photon)}, {"n_exciton", report_number(gs.n_exciton)}}},
    };

    const MaterialParams mat = cfg.has_section("material") ? cfg.material() : MaterialParams{};
    const double m_cavity = photon_effective_mass(m);
    json charged;
    charged["cavity_mass"] = charged_json(charged_polariton_report(lp_prob, gs, mat, m_cavity), m_cavity);
    if (mat.m_ph_override) {
        charged["override_mass"] =
            charged_json(charged_polariton_report(lp_prob, gs, mat, *mat.m_ph_override), *mat.m_ph_override);
    } else {
        charged["override_mass"] = nullptr;
    }
    if (const auto target = cfg.target_charge_to_mass()) {
        charged["m_ph_for_target"] = {{"target", report_number(*target)},
                                      {"m_ph", report_number(photon_mass_for_ratio(lp_prob, mat.m_ex, *target))}};
    } else {
        charged["m_ph_for_target"] = nullptr;
    }
    j["charged_polariton"] = charged;

    json table = json::array();
    const AngleGrid grid = cfg.angle_grid();
    const auto disp = branch_dispersion(p, m, grid, kind);
    const auto fr = fraction_table(p, m, grid);
    for (std::size_t i = 0; i < disp.size(); ++i) {
        table.push_back({{"theta_deg", report_number(disp[i].theta_deg)},
                         {"k_par_lp_inv_um", report_number(in_plane_wavevector(disp[i].lp, disp[i].theta_deg))},
                         {"e_cav", report_number(disp[i].e_cav)},
                         {"lp", report_number(disp[i].lp)},
                         {"up", report_number(disp[i].up)},
                         {"lp_exciton_fraction", report_number(fr[i].lp_fractions.exciton_fraction)},
                         {"up_exciton_fraction", report_number(fr[i].up_fractions.exciton_fraction)},
                         {"gs_n_photon", report_number(fr[i].ground_state.n_photon)},
                         {"gs_n_exciton", report_number(fr[i].ground_state.n_exciton)}});
    }
    j["dispersion"] = table;

    if (fit) {
        json residuals = json::array();
        for (double r : fit->residuals) {
            residuals.push_back(report_number(r));
        }
        j["fit"] = {{"rms_ev", report_number(fit->rms)},
                    {"residuals_ev", residuals},
                    {"converged", fit->converged},
                    {"iterations", fit->iterations},
                    {"best_restart", fit->best_restart}};
    } else {
        j["fit"] = nullptr;
    }
    return j;
}

std::vector<fs::path> cmd_simulate(const RunConfig& cfg, const CliOptions& opts) {
    if (!cfg.has_section("stack") || !cfg.has_section("film")) {
        throw ValidationError(cfg.source() + ": simulate needs [stack] and [film] sections");
    }
    const SimulationOutput sim = run_simulation(cfg, opts.polarization);
    const fs::path spectra = output_path(cfg, opts, "io.spectra", "spectra.csv");
    const fs::path peaks = output_path(cfg, opts, "io.peaks", "peaks.csv");
    {
        auto out = open_output(spectra);
        write_spectra_csv(out, sim.spectra);
    }
    {
        auto out = open_output(peaks);
        write_peak_dataset(out, sim.dataset);
    }
    return {spectra, peaks};
}

std::vector<fs::path> cmd_peaks(const RunConfig& cfg, const CliOptions& opts) {
    const std::string input = opts.input ? opts.input->string() : cfg.text_or("io.input", "");
    if (input.empty()) {
        throw ValidationError("peaks: no input spectra (use --input or io.input)");
    }
    std::ifstream in(input);
    if (!in) {
        throw ValidationError("cannot open spectra '" + input + "'");
    }
    const AngleSpectra spectra = read_spectra_csv(in, input);
    const PeakSettings settings = cfg.peak_settings();
    const PeakDataset d = dataset_from_peaks(spectra.angles, extract_all_peaks(spectra, settings), settings);
    const fs::path peaks = output_path(cfg, opts, "io.peaks", "peaks.csv");
    auto out = open_output(peaks);
    write_peak_dataset(out, d);
    return {peaks};
}

json cmd_fit(const RunConfig& cfg, const CliOptions& opts) {
    const std::string input = opts.input ? opts.input->string() : cfg.text_or("io.input", "");
    if (input.empty()) {
        throw ValidationError("fit: no peak dataset (use --input or io.input)");
    }
    const PeakDataset d = read_peak_dataset_file(input);
    FitConfig fc = cfg.fit_config();
    fc.model = effective_model(cfg, opts);
    if (opts.seed) {
        fc.seed = *opts.seed;
    }
    FitParameters init = initial_guess(d);
    auto params = init.to_array();
    for (std::size_t i = 0; i < kFitParamCount; ++i) {
        const std::string key = std::string("fit.init_") + to_string(static_cast<FitParam>(i));
        params[i] = cfg.number_or(key, params[i]);
        // keep the heuristic start inside the box
        params[i] = std::clamp(params[i], fc.bounds[i].lo, fc.bounds[i].hi);
    }
    init = FitParameters::from_array(params);

    const FitResult fit = fit_dispersion(d, init, fc);
    json report = build_report(cfg, fit.coupling, fit.cavity, fc.model, &fit);
    report["dataset"] = {{"path", input},
                         {"rows", d.size()},
                         {"lp_observations", d.lp_count()},
                         {"up_observations", d.up_count()}};
    write_json(output_path(cfg, opts, "io.report", "report.json"), report);
    return report;
}

json cmd_report(const RunConfig& cfg, const CliOptions& opts) {
    for (const char* section : {"coupling", "cavity", "material"}) {
        if (!cfg.has_section(section)) {
            throw ValidationError(cfg.source() + ": report needs a [" + section + "] section");
        }
    }
    const ModelKind kind = effective_model(cfg, opts);
    const json report = build_report(cfg, cfg.coupling(), cfg.cavity(kind), kind, nullptr);
    write_json(output_path(cfg, opts, "io.report", "report.json"), report);
    return report;
}

json cmd_gap(const RunConfig& cfg, const CliOptions&) { return gap_report(cfg.coupling()); }

std::vector<fs::path> cmd_fractions(const RunConfig& cfg, const CliOptions& opts) {
    const ModelKind kind = effective_model(cfg, opts);
    const auto rows = fraction_table(cfg.coupling(), cfg.cavity(kind), cfg.angle_grid());
    const fs::path p = output_path(cfg, opts, "io.fractions", "fractions.csv");
    auto out = open_output(p);
    write_fractions_csv(out, rows);
    return {p};
}

}  // namespace polariton
