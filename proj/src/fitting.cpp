#include "polariton/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "polariton/csv.hpp"
#include "polariton/errors.hpp"
#include "polariton/nelder_mead.hpp"

namespace polariton {

PeakDataset::PeakDataset(std::vector<PeakObservation> rows) : rows_(std::move(rows)) {
    std::size_t populated = 0;
    std::vector<double> thetas;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (!(r.weight >= 0.0) || !std::isfinite(r.weight)) {
            std::ostringstream msg;
            msg << "dataset row " << i << ": weight must be >= 0";
            throw ValidationError(msg.str());
        }
        for (const auto& e : {r.e_lp, r.e_up}) {
            if (e && !(*e > 0.0)) {
                std::ostringstream msg;
                msg << "dataset row " << i << ": branch energies must be > 0";
                throw ValidationError(msg.str());
            }
        }
        if (r.e_lp || r.e_up) {
            ++populated;
        }
        thetas.push_back(r.theta_deg);
    }
    std::sort(thetas.begin(), thetas.end());
    if (std::adjacent_find(thetas.begin(), thetas.end()) != thetas.end()) {
        throw ValidationError("dataset thetas must be unique");
    }
    if (populated < 4) {
        std::ostringstream msg;
        msg << "dataset under-determined: " << populated << " rows with observations (" << lp_count()
            << " LP, " << up_count() << " UP); need at least 4";
        throw ValidationError(msg.str());
    }
}

std::size_t PeakDataset::lp_count() const {
    return static_cast<std::size_t>(
        std::count_if(rows_.begin(), rows_.end(), [](const PeakObservation& r) { return r.e_lp.has_value(); }));
}

std::size_t PeakDataset::up_count() const {
    return static_cast<std::size_t>(
        std::count_if(rows_.begin(), rows_.end(), [](const PeakObservation& r) { return r.e_up.has_value(); }));
}

PeakDataset read_peak_dataset(std::istream& in, const std::string& source) {
    csv::expect_header(in, {"theta_deg", "e_lp_ev", "e_up_ev", "weight"}, source);
    std::vector<PeakObservation> rows;
    std::string line;
    std::size_t line_no = 1;
    while (csv::next_line(in, line, line_no)) {
        const auto cells = csv::split(line);
        const std::string where = source + ":" + std::to_string(line_no);
        if (cells.size() != 4) {
            throw ValidationError(where + ": expected 4 columns");
        }
        PeakObservation r;
        r.theta_deg = csv::parse_double(cells[0], where);
        r.e_lp = csv::parse_optional_double(cells[1], where);
        r.e_up = csv::parse_optional_double(cells[2], where);
        r.weight = csv::parse_optional_double(cells[3], where).value_or(1.0);
        rows.push_back(r);
    }
    return PeakDataset(std::move(rows));
}

PeakDataset read_peak_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open peak dataset '" + path + "'");
    }
    return read_peak_dataset(in, path);
}

void write_peak_dataset(std::ostream& out, const PeakDataset& d) {
    out << "theta_deg,e_lp_ev,e_up_ev,weight\n";
    for (const auto& r : d.rows()) {
        out << csv::format_double(r.theta_deg) << ',' << (r.e_lp ? csv::format_double(*r.e_lp) : "") << ','
            << (r.e_up ? csv::format_double(*r.e_up) : "") << ',' << csv::format_double(r.weight) << '\n';
    }
}

const char* to_string(FitParam p) {
    switch (p) {
        case FitParam::ExcitonEnergy:
            return "e_x";
        case FitParam::Rabi:
            return "rabi";
        case FitParam::CavityE0:
            return "e0";
        case FitParam::NEff:
            return "n_eff";
    }
    return "?";
}

std::array<double, kFitParamCount> FitParameters::to_array() const {
    return {coupling.e_x, coupling.rabi, cavity.e0, cavity.n_eff};
}

FitParameters FitParameters::from_array(const std::array<double, kFitParamCount>& v) {
    return {{v[0], v[1]}, {v[2], v[3]}};
}

void validate(const FitConfig& cfg) {
    if (std::none_of(cfg.free.begin(), cfg.free.end(), [](bool b) { return b; })) {
        throw ValidationError("fit: at least one parameter must be free");
    }
    for (std::size_t i = 0; i < kFitParamCount; ++i) {
        const auto& b = cfg.bounds[i];
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi)) {
            std::ostringstream msg;
            msg << "fit.bounds." << to_string(static_cast<FitParam>(i)) << ": need finite lo < hi";
            throw ValidationError(msg.str());
        }
    }
    if (cfg.restarts < 1 || cfg.max_iterations < 1 || !(cfg.tolerance > 0.0) || !(cfg.jitter >= 0.0)) {
        throw ValidationError("fit: restarts >= 1, max_iterations >= 1, tolerance > 0, jitter >= 0 required");
    }
}

std::vector<double> residuals(const CouplingParams& p, const CavityModel& m, const PeakDataset& d, ModelKind kind) {
    validate(p);
    validate(m);
    std::vector<double> out;
    out.reserve(d.observation_count());
    for (std::size_t i = 0; i < d.rows().size(); ++i) {
        const auto& r = d.rows()[i];
        if (!r.e_lp && !r.e_up) {
            continue;
        }
        BranchEnergies e;
        try {
            e = branch_energies(cavity_energy(m, r.theta_deg), p, kind);
        } catch (const NumericalError& err) {
            std::ostringstream msg;
            msg << "dataset row " << i << " (theta=" << r.theta_deg << "): " << err.what();
            throw NumericalError(msg.str());
        }
        const double w = std::sqrt(r.weight);
        if (r.e_lp) {
            out.push_back((e.lp - *r.e_lp) * w);
        }
        if (r.e_up) {
            out.push_back((e.up - *r.e_up) * w);
        }
    }
    return out;
}

namespace {

std::vector<std::size_t> theta_order(const PeakDataset& d) {
    std::vector<std::size_t> idx(d.rows().size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return d.rows()[a].theta_deg < d.rows()[b].theta_deg; });
    return idx;
}

double sorted_objective(const CouplingParams& p, const CavityModel& m, const PeakDataset& d,
                        const std::vector<std::size_t>& order, ModelKind kind) {
    double sum = 0.0;
    for (std::size_t i : order) {
        const auto& r = d.rows()[i];
        if ((!r.e_lp && !r.e_up) || r.weight == 0.0) {
            continue;
        }
        const BranchEnergies e = branch_energies(cavity_energy(m, r.theta_deg), p, kind);
        if (r.e_lp) {
            const double x = e.lp - *r.e_lp;
            sum += r.weight * x * x;
        }
        if (r.e_up) {
            const double x = e.up - *r.e_up;
            sum += r.weight * x * x;
        }
    }
    return sum;
}

struct RestartOutcome {
    std::array<double, kFitParamCount> params{};
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

}  // namespace

double objective(const CouplingParams& p, const CavityModel& m, const PeakDataset& d, ModelKind kind) {
    validate(p);
    validate(m);
    return sorted_objective(p, m, d, theta_order(d), kind);
}

FitResult fit_dispersion(const PeakDataset& d, const FitParameters& init, const FitConfig& cfg) {
    validate(cfg);
    const auto start = init.to_array();
    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < kFitParamCount; ++i) {
        if (cfg.free[i]) {
            free_idx.push_back(i);
            if (!(start[i] >= cfg.bounds[i].lo && start[i] <= cfg.bounds[i].hi)) {
                std::ostringstream msg;
                msg << "fit: initial " << to_string(static_cast<FitParam>(i)) << "=" << start[i]
                    << " outside bounds [" << cfg.bounds[i].lo << ", " << cfg.bounds[i].hi << "]";
                throw ValidationError(msg.str());
            }
        }
    }
    std::size_t weighted_lp = 0;
    std::size_t weighted_up = 0;
    for (const auto& r : d.rows()) {
        if (r.weight > 0.0) {
            weighted_lp += r.e_lp ? 1 : 0;
            weighted_up += r.e_up ? 1 : 0;
        }
    }
    if (weighted_lp + weighted_up < free_idx.size()) {
        std::ostringstream msg;
        msg << "fit under-determined: " << weighted_lp << " LP and " << weighted_up
            << " UP observations with nonzero weight for " << free_idx.size() << " free parameters";
        throw ValidationError(msg.str());
    }

    const auto order = theta_order(d);
    auto expand = [&](std::span<const double> u) {
        auto full = start;
        for (std::size_t k = 0; k < free_idx.size(); ++k) {
            const auto& b = cfg.bounds[free_idx[k]];
            full[free_idx[k]] = b.lo + u[k] * (b.hi - b.lo);
        }
        return full;
    };
    const Objective f = [&](std::span<const double> u) {
        for (double v : u) {
            if (!(v >= 0.0 && v <= 1.0)) {
                return std::numeric_limits<double>::infinity();
            }
        }
        const FitParameters fp = FitParameters::from_array(expand(u));
        try {
            validate(fp.coupling);
            validate(fp.cavity);
            const double v = sorted_objective(fp.coupling, fp.cavity, d, order, cfg.model);
            return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::vector<double> u0(free_idx.size());
    for (std::size_t k = 0; k < free_idx.size(); ++k) {
        const auto& b = cfg.bounds[free_idx[k]];
        u0[k] = (start[free_idx[k]] - b.lo) / (b.hi - b.lo);
    }

    NelderMeadOptions opt;
    opt.tolerance = cfg.tolerance;
    opt.max_iterations = cfg.max_iterations;

    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < cfg.restarts; ++r) {
        std::vector<double> u = u0;
        if (r > 0) {
            std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                              static_cast<std::uint32_t>(r)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> jitter(0.0, cfg.jitter);
            for (double& v : u) {
                v = std::clamp(v + jitter(rng), 0.0, 1.0);
            }
        }
        RestartOutcome& out = outcomes[static_cast<std::size_t>(r)];
        NelderMeadResult res = nelder_mead(f, u, opt);
        out.iterations = res.iterations;
        // a collapsed simplex can stall off the minimum; restart from its best
        // vertex until a fresh simplex stops improving
        for (int polish = 0; polish < 5 && std::isfinite(res.value); ++polish) {
            NelderMeadResult again = nelder_mead(f, res.x, opt);
            out.iterations += again.iterations;
            const bool improved = again.value < res.value;
            if (improved || again.value == res.value) {
                res = std::move(again);
            }
            if (!improved) {
                break;
            }
        }
        if (std::isfinite(res.value)) {
            out.value = res.value;
            out.converged = res.converged;
            out.params = expand(res.x);
        }
    }

    int best = -1;
    for (int r = 0; r < cfg.restarts; ++r) {
        const auto& o = outcomes[static_cast<std::size_t>(r)];
        if (!std::isfinite(o.value)) {
            continue;
        }
        if (best < 0 || o.value < outcomes[static_cast<std::size_t>(best)].value - 1e-15) {
            best = r;
        }
    }
    if (best < 0) {
        throw NumericalError("fit: objective could not be evaluated in any restart");
    }

    const auto& win = outcomes[static_cast<std::size_t>(best)];
    const FitParameters fp = FitParameters::from_array(win.params);
    FitResult result;
    result.coupling = fp.coupling;
    result.cavity = fp.cavity;
    result.residuals = residuals(fp.coupling, fp.cavity, d, cfg.model);
    double ss = 0.0;
    for (double x : result.residuals) {
        ss += x * x;
    }
    result.rms = result.residuals.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(result.residuals.size()));
    result.converged = win.converged;
    result.iterations = win.iterations;
    result.best_restart = best;
    return result;
}

FitParameters initial_guess(const PeakDataset& d) {
    const PeakObservation* tightest = nullptr;
    const PeakObservation* lowest_lp = nullptr;
    for (const auto& r : d.rows()) {
        if (r.e_lp && r.e_up && (!tightest || *r.e_up - *r.e_lp < *tightest->e_up - *tightest->e_lp)) {
            tightest = &r;
        }
        if (r.e_lp && (!lowest_lp || r.theta_deg < lowest_lp->theta_deg)) {
            lowest_lp = &r;
        }
    }
    if (!tightest || !lowest_lp) {
        std::ostringstream msg;
        msg << "cannot initialise fit: need at least one row with both branches and one LP observation ("
            << d.lp_count() << " LP, " << d.up_count() << " UP)";
        throw ValidationError(msg.str());
    }
    FitParameters p;
    p.coupling.e_x = 0.5 * (*tightest->e_lp + *tightest->e_up);
    p.coupling.rabi = *tightest->e_up - *tightest->e_lp;
    p.cavity.e0 = *lowest_lp->e_lp;
    p.cavity.n_eff = 1.7;
    return p;
}

PeakDataset synthesize_dataset(const CouplingParams& p, const CavityModel& m, const AngleGrid& g, ModelKind kind,
                               double noise_sigma, std::uint64_t seed) {
    if (!(noise_sigma >= 0.0)) {
        throw ValidationError("noise_sigma must be >= 0");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<PeakObservation> rows;
    for (const auto& row : branch_dispersion(p, m, g, kind)) {
        PeakObservation o;
        o.theta_deg = row.theta_deg;
        o.e_lp = row.lp + noise_sigma * noise(rng);
        o.e_up = row.up + noise_sigma * noise(rng);
        rows.push_back(o);
    }
    return PeakDataset(std::move(rows));
}

}  // namespace polariton
