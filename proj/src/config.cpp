#include "polariton/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "polariton/csv.hpp"
#include "polariton/errors.hpp"

namespace polariton {

namespace {

enum class KeyKind { Number, Text };

const std::map<std::string, KeyKind>& known_keys() {
    static const std::map<std::string, KeyKind> keys = {
        {"coupling.e_x", KeyKind::Number},
        {"coupling.rabi", KeyKind::Number},
        {"cavity.e0", KeyKind::Number},
        {"cavity.lp0", KeyKind::Number},
        {"cavity.n_eff", KeyKind::Number},
        {"material.m_ex", KeyKind::Number},
        {"material.m_ph_override", KeyKind::Number},
        {"material.alpha_peak", KeyKind::Number},
        {"material.sigma", KeyKind::Number},
        {"material.target_charge_to_mass", KeyKind::Number},
        {"film.eps_inf", KeyKind::Number},
        {"film.e_res", KeyKind::Number},
        {"film.gamma", KeyKind::Number},
        {"film.alpha_target", KeyKind::Number},
        {"film.strength", KeyKind::Number},
        {"film.strength_scale", KeyKind::Number},
        {"film.thickness_nm", KeyKind::Number},
        {"mirror.table", KeyKind::Text},
        {"mirror.thickness_nm", KeyKind::Number},
        {"stack.layers", KeyKind::Text},
        {"stack.ambient_n", KeyKind::Number},
        {"stack.substrate_n", KeyKind::Number},
        {"grid.theta_min", KeyKind::Number},
        {"grid.theta_max", KeyKind::Number},
        {"grid.theta_step", KeyKind::Number},
        {"grid.energy_min", KeyKind::Number},
        {"grid.energy_max", KeyKind::Number},
        {"grid.energy_step", KeyKind::Number},
        {"peaks.min_prominence", KeyKind::Number},
        {"peaks.window_min", KeyKind::Number},
        {"peaks.window_max", KeyKind::Number},
        {"peaks.split_hint", KeyKind::Number},
        {"fit.model", KeyKind::Text},
        {"fit.free", KeyKind::Text},
        {"fit.restarts", KeyKind::Number},
        {"fit.max_iterations", KeyKind::Number},
        {"fit.tolerance", KeyKind::Number},
        {"fit.seed", KeyKind::Number},
        {"fit.jitter", KeyKind::Number},
        {"fit.bounds_e_x", KeyKind::Text},
        {"fit.bounds_rabi", KeyKind::Text},
        {"fit.bounds_e0", KeyKind::Text},
        {"fit.bounds_n_eff", KeyKind::Text},
        {"fit.init_e_x", KeyKind::Number},
        {"fit.init_rabi", KeyKind::Number},
        {"fit.init_e0", KeyKind::Number},
        {"fit.init_n_eff", KeyKind::Number},
        {"io.input", KeyKind::Text},
        {"io.spectra", KeyKind::Text},
        {"io.peaks", KeyKind::Text},
        {"io.report", KeyKind::Text},
        {"io.fractions", KeyKind::Text},
    };
    return keys;
}

std::string canonical_value(const std::string& key, const std::string& value) {
    const auto it = known_keys().find(key);
    if (it != known_keys().end() && it->second == KeyKind::Number) {
        return csv::format_double(csv::parse_double(value, key));
    }
    if (key == "fit.model") {
        return to_string(parse_model(value));
    }
    // lists: normalise whitespace around commas
    std::string out;
    for (auto cell : csv::split(value)) {
        if (!out.empty()) {
            out += ',';
        }
        out += csv::trim(cell);
    }
    return out;
}

}  // namespace

ModelKind parse_model(const std::string& name) {
    if (name == "quadratic") {
        return ModelKind::Quadratic;
    }
    if (name == "hopfield") {
        return ModelKind::FullHopfield;
    }
    throw ValidationError("model must be 'quadratic' or 'hopfield', got '" + name + "'");
}

std::string to_string(ModelKind kind) { return kind == ModelKind::Quadratic ? "quadratic" : "hopfield"; }

Polarization parse_polarization(const std::string& name) {
    if (name == "te") {
        return Polarization::TE;
    }
    if (name == "tm") {
        return Polarization::TM;
    }
    throw ValidationError("polarization must be 'te' or 'tm', got '" + name + "'");
}

std::string to_string(Polarization pol) { return pol == Polarization::TE ? "te" : "tm"; }

RunConfig RunConfig::parse(std::istream& in, const std::string& source, std::filesystem::path base_dir) {
    RunConfig cfg;
    cfg.source_ = source;
    cfg.base_dir_ = std::move(base_dir);
    std::string section;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = csv::trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string loc = source + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ValidationError(loc + ": malformed section header");
            }
            section = std::string(csv::trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError(loc + ": expected key = value");
        }
        const std::string name(csv::trim(line.substr(0, eq)));
        const std::string value(csv::trim(line.substr(eq + 1)));
        const std::string key = section.empty() ? name : section + "." + name;
        if (!known_keys().count(key)) {
            throw ValidationError(loc + ": unknown key '" + key + "'");
        }
        if (cfg.entries_.count(key)) {
            throw ValidationError(loc + ": duplicate key '" + key + "'");
        }
        if (known_keys().at(key) == KeyKind::Number) {
            csv::parse_double(value, loc + ": " + key);
        }
        cfg.entries_[key] = {value, line_no};
    }

    cfg.validate_sections();
    return cfg;
}

void RunConfig::validate_sections() const {
    if (has_section("coupling")) {
        validate(coupling());
        if (has_section("cavity")) {
            validate(cavity(model()));
        }
    }
    if (has_section("material")) {
        validate(material());
    }
    if (has_section("film")) {
        film();
    }
    if (has_section("stack")) {
        stack();
    }
    if (has_section("grid")) {
        angle_grid();
        energy_grid();
    }
    if (has_section("fit")) {
        validate(fit_config());
    }
    if (has_section("peaks")) {
        peak_settings();
    }
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config '" + path.string() + "'");
    }
    return parse(in, path.string(), path.parent_path());
}

bool RunConfig::has_section(const std::string& section) const {
    const std::string prefix = section + ".";
    const auto it = entries_.lower_bound(prefix);
    return it != entries_.end() && it->first.compare(0, prefix.size(), prefix) == 0;
}

std::string RunConfig::where(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return source_ + ": " + key;
    }
    return source_ + ":" + std::to_string(it->second.line) + ": " + key;
}

double RunConfig::number(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw ValidationError(source_ + ": missing required key '" + key + "'");
    }
    return csv::parse_double(it->second.value, where(key));
}

double RunConfig::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

std::string RunConfig::text(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw ValidationError(source_ + ": missing required key '" + key + "'");
    }
    return it->second.value;
}

std::string RunConfig::text_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!known_keys().count(key)) {
        throw ValidationError("unknown key '" + key + "'");
    }
    if (known_keys().at(key) == KeyKind::Number) {
        csv::parse_double(value, "override " + key);
    }
    entries_[key] = {value, 0};
}

std::filesystem::path RunConfig::resolve(const std::string& path) const {
    std::filesystem::path p(path);
    return p.is_absolute() || base_dir_.empty() ? p : base_dir_ / p;
}

CouplingParams RunConfig::coupling() const {
    CouplingParams p{number("coupling.e_x"), number("coupling.rabi")};
    try {
        validate(p);
    } catch (const ValidationError& e) {
        throw ValidationError(where("coupling.rabi") + ": " + e.what());
    }
    return p;
}

CavityModel RunConfig::cavity(ModelKind kind) const {
    CavityModel m;
    m.n_eff = number("cavity.n_eff");
    if (has("cavity.e0") == has("cavity.lp0")) {
        throw ValidationError(source_ + ": set exactly one of cavity.e0 and cavity.lp0");
    }
    try {
        m.e0 = has("cavity.e0") ? number("cavity.e0")
                                : cavity_energy_for_lower_branch(number("cavity.lp0"), coupling(), kind);
        validate(m);
    } catch (const ValidationError& e) {
        throw ValidationError(where(has("cavity.e0") ? "cavity.e0" : "cavity.lp0") + ": " + e.what());
    }
    return m;
}

MaterialParams RunConfig::material() const {
    MaterialParams m;
    m.m_ex = number_or("material.m_ex", m.m_ex);
    if (has("material.m_ph_override")) {
        m.m_ph_override = number("material.m_ph_override");
    }
    m.alpha_peak = number_or("material.alpha_peak", m.alpha_peak);
    m.sigma = number_or("material.sigma", m.sigma);
    try {
        validate(m);
    } catch (const ValidationError& e) {
        throw ValidationError(source_ + ": [material] " + e.what());
    }
    return m;
}

std::optional<double> RunConfig::target_charge_to_mass() const {
    if (!has("material.target_charge_to_mass")) {
        return std::nullopt;
    }
    return number("material.target_charge_to_mass");
}

FilmSettings RunConfig::film() const {
    FilmSettings f;
    const double eps_inf = number_or("film.eps_inf", 2.5);
    const double e_res = number_or("film.e_res", 1.22);
    const double gamma = number_or("film.gamma", 0.15);
    const double scale = number_or("film.strength_scale", 1.0);
    if (!(scale >= 0.0)) {
        throw ValidationError(where("film.strength_scale") + ": must be >= 0");
    }
    try {
        validate(LorentzSet{eps_inf, {{0.0, e_res, gamma}}});
    } catch (const ValidationError& e) {
        throw ValidationError(source_ + ": [film] " + e.what());
    }
    if (has("film.strength") == has("film.alpha_target")) {
        throw ValidationError(source_ + ": set exactly one of film.strength and film.alpha_target");
    }
    f.strength_unscaled = has("film.strength")
                              ? number("film.strength")
                              : calibrate_oscillator_strength(number("film.alpha_target"), e_res, gamma, eps_inf);
    if (!(f.strength_unscaled >= 0.0)) {
        throw ValidationError(where("film.strength") + ": must be >= 0");
    }
    f.model = LorentzSet{eps_inf, {{f.strength_unscaled * scale, e_res, gamma}}};
    f.thickness_nm = number("film.thickness_nm");
    if (!(f.thickness_nm > 0.0)) {
        throw ValidationError(where("film.thickness_nm") + ": must be > 0");
    }
    return f;
}

Stack RunConfig::stack() const {
    const double ambient = number_or("stack.ambient_n", 1.0);
    const double substrate = number_or("stack.substrate_n", 1.0);
    if (!(ambient >= 1.0) || !(substrate >= 1.0)) {
        throw ValidationError(source_ + ": stack.ambient_n and stack.substrate_n must be >= 1");
    }
    std::vector<Layer> layers;
    layers.push_back(Layer::semi_infinite(ConstantIndex{ambient, 0.0}));
    std::optional<FilmSettings> film_cache;
    std::optional<TabulatedIndex> mirror_cache;
    const std::string layer_list = text("stack.layers");
    for (auto cell : csv::split(layer_list)) {
        const std::string token(csv::trim(cell));
        if (token == "film") {
            if (!film_cache) {
                film_cache = film();
            }
            layers.push_back(Layer::slab(film_cache->model, film_cache->thickness_nm));
        } else if (token == "mirror") {
            if (!mirror_cache) {
                mirror_cache = read_index_table_file(resolve(text("mirror.table")).string());
            }
            const double t = number("mirror.thickness_nm");
            if (!(t > 0.0)) {
                throw ValidationError(where("mirror.thickness_nm") + ": must be > 0");
            }
            layers.push_back(Layer::slab(*mirror_cache, t));
        } else if (token.rfind("index:", 0) == 0) {
            const auto parts = csv::split(token, ':');
            if (parts.size() != 4) {
                throw ValidationError(where("stack.layers") + ": expected index:<n>:<k>:<thickness_nm>, got '" +
                                      token + "'");
            }
            const double n = csv::parse_double(parts[1], where("stack.layers"));
            const double k = csv::parse_double(parts[2], where("stack.layers"));
            const double t = csv::parse_double(parts[3], where("stack.layers"));
            if (!(n > 0.0) || !(k >= 0.0) || !(t > 0.0)) {
                throw ValidationError(where("stack.layers") + ": index layer needs n > 0, k >= 0, thickness > 0");
            }
            layers.push_back(Layer::slab(ConstantIndex{n, k}, t));
        } else {
            throw ValidationError(where("stack.layers") + ": unknown layer '" + token + "'");
        }
    }
    layers.push_back(Layer::semi_infinite(ConstantIndex{substrate, 0.0}));
    return Stack(std::move(layers));
}

AngleGrid RunConfig::angle_grid() const {
    try {
        return AngleGrid::uniform(number_or("grid.theta_min", 0.0), number_or("grid.theta_max", 60.0),
                                  number_or("grid.theta_step", 5.0));
    } catch (const ValidationError& e) {
        throw ValidationError(source_ + ": [grid] " + e.what());
    }
}

std::vector<double> RunConfig::energy_grid() const {
    try {
        return uniform_energy_grid(number_or("grid.energy_min", 0.6), number_or("grid.energy_max", 2.2),
                                   number_or("grid.energy_step", 0.001));
    } catch (const ValidationError& e) {
        throw ValidationError(source_ + ": [grid] " + e.what());
    }
}

PeakSettings RunConfig::peak_settings() const {
    PeakSettings s;
    s.min_prominence = number_or("peaks.min_prominence", s.min_prominence);
    s.window.lo = number_or("peaks.window_min", s.window.lo);
    s.window.hi = number_or("peaks.window_max", s.window.hi);
    s.split_hint = number_or("peaks.split_hint", has("film.e_res") ? number("film.e_res") : s.split_hint);
    if (!(s.min_prominence >= 0.0) || !(s.window.lo < s.window.hi)) {
        throw ValidationError(source_ + ": [peaks] need min_prominence >= 0 and window_min < window_max");
    }
    return s;
}

ModelKind RunConfig::model() const {
    if (!has("fit.model")) {
        return ModelKind::FullHopfield;
    }
    try {
        return parse_model(text("fit.model"));
    } catch (const ValidationError& e) {
        throw ValidationError(where("fit.model") + ": " + e.what());
    }
}

FitConfig RunConfig::fit_config() const {
    FitConfig cfg;
    cfg.model = model();
    if (has("fit.free")) {
        cfg.free.fill(false);
        const std::string free_list = text("fit.free");
        for (auto cell : csv::split(free_list)) {
            const std::string name(csv::trim(cell));
            bool found = false;
            for (std::size_t i = 0; i < kFitParamCount; ++i) {
                if (name == to_string(static_cast<FitParam>(i))) {
                    cfg.free[i] = true;
                    found = true;
                }
            }
            if (!found) {
                throw ValidationError(where("fit.free") + ": unknown parameter '" + name + "'");
            }
        }
    }
    for (std::size_t i = 0; i < kFitParamCount; ++i) {
        const std::string key = std::string("fit.bounds_") + to_string(static_cast<FitParam>(i));
        if (!has(key)) {
            continue;
        }
        const std::string pair = text(key);
        const auto parts = csv::split(pair);
        if (parts.size() != 2) {
            throw ValidationError(where(key) + ": expected 'lo, hi'");
        }
        cfg.bounds[i] = {csv::parse_double(parts[0], where(key)), csv::parse_double(parts[1], where(key))};
    }
    auto integer = [&](const std::string& key, long long fallback) {
        const double v = number_or(key, static_cast<double>(fallback));
        if (v != static_cast<double>(static_cast<long long>(v))) {
            throw ValidationError(where(key) + ": expected an integer");
        }
        return static_cast<long long>(v);
    };
    cfg.restarts = static_cast<int>(integer("fit.restarts", cfg.restarts));
    cfg.max_iterations = static_cast<int>(integer("fit.max_iterations", cfg.max_iterations));
    cfg.seed = static_cast<std::uint64_t>(integer("fit.seed", static_cast<long long>(cfg.seed)));
    cfg.tolerance = number_or("fit.tolerance", cfg.tolerance);
    cfg.jitter = number_or("fit.jitter", cfg.jitter);
    try {
        validate(cfg);
    } catch (const ValidationError& e) {
        throw ValidationError(source_ + ": " + e.what());
    }
    return cfg;
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [key, entry] : entries_) {
        if (key.rfind("io.", 0) == 0) {
            continue;
        }
        mix(key);
        mix("=");
        mix(canonical_value(key, entry.value));
        mix("\n");
    }
    return h;
}

std::string RunConfig::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

}  // namespace polariton
