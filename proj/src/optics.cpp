#include "polariton/optics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "polariton/csv.hpp"
#include "polariton/errors.hpp"

namespace polariton {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Normal component of the reduced wavevector, branch with Im >= 0
// (Re >= 0 when purely real).
Complex normal_wavevector(Complex eps, Complex kx2) {
    Complex kz = std::sqrt(eps - kx2);
    if (kz.imag() < 0.0 || (kz.imag() == 0.0 && kz.real() < 0.0)) {
        kz = -kz;
    }
    return kz;
}

}  // namespace

TabulatedIndex::TabulatedIndex(std::vector<IndexRow> rows, std::string source)
    : rows_(std::move(rows)), source_(std::move(source)) {
    if (rows_.size() < 2) {
        throw ValidationError(source_ + ": tabulated index needs at least two rows");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (!(r.energy_ev > 0.0) || !(r.n > 0.0) || !(r.k >= 0.0)) {
            std::ostringstream msg;
            msg << source_ << ": row " << i << " needs energy > 0, n > 0, k >= 0";
            throw ValidationError(msg.str());
        }
        if (i > 0 && !(r.energy_ev > rows_[i - 1].energy_ev)) {
            std::ostringstream msg;
            msg << source_ << ": energies must be strictly increasing (row " << i << ")";
            throw ValidationError(msg.str());
        }
    }
}

Complex TabulatedIndex::index(double e) const {
    if (rows_.empty() || e < rows_.front().energy_ev || e > rows_.back().energy_ev) {
        std::ostringstream msg;
        msg << source_ << ": energy " << e << " eV outside tabulated range";
        if (!rows_.empty()) {
            msg << " [" << rows_.front().energy_ev << ", " << rows_.back().energy_ev << "]";
        }
        throw ValidationError(msg.str());
    }
    auto hi = std::lower_bound(rows_.begin(), rows_.end(), e,
                               [](const IndexRow& r, double v) { return r.energy_ev < v; });
    if (hi == rows_.begin()) {
        return {hi->n, hi->k};
    }
    auto lo = hi - 1;
    const double t = (e - lo->energy_ev) / (hi->energy_ev - lo->energy_ev);
    return {lo->n + t * (hi->n - lo->n), lo->k + t * (hi->k - lo->k)};
}

void validate(const LorentzSet& m) {
    if (!(m.eps_inf >= 1.0)) {
        throw ValidationError("film.eps_inf must be >= 1");
    }
    for (const auto& o : m.oscillators) {
        if (!(o.f >= 0.0) || !(o.e_res > 0.0) || !(o.gamma > 0.0)) {
            throw ValidationError("lorentz oscillator needs f >= 0, e_res > 0, gamma > 0");
        }
    }
}

Complex lorentz_epsilon(const LorentzSet& m, double e) {
    Complex eps(m.eps_inf, 0.0);
    for (const auto& o : m.oscillators) {
        eps += o.f / Complex(o.e_res * o.e_res - e * e, -o.gamma * e);
    }
    return eps;
}

Complex epsilon(const DielectricModel& m, double e) {
    return std::visit(overloaded{
                          [](const ConstantIndex& c) {
                              const Complex n(c.n, c.k);
                              return n * n;
                          },
                          [e](const TabulatedIndex& t) {
                              const Complex n = t.index(e);
                              return n * n;
                          },
                          [e](const LorentzSet& l) { return lorentz_epsilon(l, e); },
                      },
                      m);
}

double absorption_coefficient(Complex eps, double e) {
    const double kappa = std::abs(std::sqrt(eps).imag());
    return 2.0 * e * kappa / kHbarC_eV_cm;
}

double peak_absorption_coefficient(const LorentzSet& m) {
    validate(m);
    if (m.oscillators.empty()) {
        return 0.0;
    }
    double e_hi = 0.0;
    double gamma_max = 0.0;
    double f_sum = 0.0;
    for (const auto& o : m.oscillators) {
        e_hi = std::max(e_hi, o.e_res);
        gamma_max = std::max(gamma_max, o.gamma);
        f_sum += o.f;
    }
    // the absorption maximum sits between the transverse and longitudinal frequencies
    e_hi = 2.0 * std::sqrt(e_hi * e_hi + f_sum / m.eps_inf) + 10.0 * gamma_max;
    const double e_lo = 1e-3 * e_hi;

    auto alpha = [&](double e) { return absorption_coefficient(lorentz_epsilon(m, e), e); };

    constexpr int kSamples = 4000;
    const double step = (e_hi - e_lo) / kSamples;
    int best = 0;
    double best_val = -1.0;
    for (int i = 0; i <= kSamples; ++i) {
        const double v = alpha(e_lo + i * step);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    // golden-section refinement inside the bracketing cells
    double a = e_lo + std::max(0, best - 1) * step;
    double b = e_lo + std::min(kSamples, best + 1) * step;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = alpha(c);
    double fd = alpha(d);
    for (int it = 0; it < 100 && (b - a) > 1e-13 * b; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = alpha(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = alpha(d);
        }
    }
    return std::max({best_val, fc, fd});
}

double calibrate_oscillator_strength(double target_alpha, double e_res, double gamma, double eps_inf) {
    if (!(target_alpha >= 0.0) || !std::isfinite(target_alpha)) {
        throw ValidationError("target absorption coefficient must be >= 0");
    }
    if (target_alpha == 0.0) {
        return 0.0;
    }
    auto peak = [&](double f) {
        return peak_absorption_coefficient(LorentzSet{eps_inf, {{f, e_res, gamma}}});
    };
    // weak-absorber estimate: kappa ~ Im(eps) / (2 sqrt(eps_inf)) at resonance
    double hi = target_alpha * kHbarC_eV_cm * gamma * std::sqrt(eps_inf) / e_res;
    double lo = 0.0;
    int expansions = 0;
    while (peak(hi) < target_alpha) {
        lo = hi;
        hi *= 2.0;
        if (++expansions > 60) {
            throw NumericalError("calibrate_oscillator_strength: could not bracket target absorption");
        }
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (peak(mid) < target_alpha ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Stack::Stack(std::vector<Layer> layers) : layers_(std::move(layers)) {
    if (layers_.size() < 2) {
        throw ValidationError("stack needs at least ambient and substrate layers");
    }
    if (layers_.front().thickness_nm || layers_.back().thickness_nm) {
        throw ValidationError("stack ambient and substrate must be semi-infinite");
    }
    for (std::size_t i = 1; i + 1 < layers_.size(); ++i) {
        const auto& t = layers_[i].thickness_nm;
        if (!t || !(*t > 0.0) || !std::isfinite(*t)) {
            std::ostringstream msg;
            msg << "stack layer " << i << " needs a finite thickness > 0";
            throw ValidationError(msg.str());
        }
    }
    for (const auto& l : layers_) {
        if (const auto* lz = std::get_if<LorentzSet>(&l.medium)) {
            validate(*lz);
        }
    }
}

Stack Stack::reversed() const {
    std::vector<Layer> r(layers_.rbegin(), layers_.rend());
    return Stack(std::move(r));
}

TRA transfer_matrix(const Stack& s, double e, double theta_deg, Polarization pol) {
    const auto layers = s.layers();
    if (layers.size() < 2) {
        throw ValidationError("transfer_matrix: empty stack");
    }
    if (!(theta_deg >= 0.0 && theta_deg < 90.0)) {
        std::ostringstream msg;
        msg << "transfer_matrix: angle " << theta_deg << " deg outside [0, 90)";
        throw ValidationError(msg.str());
    }
    if (!(e > 0.0)) {
        throw ValidationError("transfer_matrix: energy must be > 0");
    }

    const Complex eps0 = epsilon(layers.front().medium, e);
    if (std::abs(eps0.imag()) > 1e-12 * std::abs(eps0) || !(eps0.real() > 0.0)) {
        throw ValidationError("transfer_matrix: ambient medium must be lossless with eps > 0");
    }
    const double n0 = std::sqrt(eps0.real());
    const double kx = n0 * std::sin(theta_deg * std::numbers::pi / 180.0);
    const Complex kx2(kx * kx, 0.0);
    const double k0 = e / kHbarC_eV_nm;  // vacuum wavenumber, 1/nm

    auto admittance = [&](Complex eps, Complex kz) { return pol == Polarization::TE ? kz : kz / eps; };

    // characteristic matrix [[m11, m12], [m21, m22]]
    Complex m11(1.0), m12(0.0), m21(0.0), m22(1.0);
    for (std::size_t i = 1; i + 1 < layers.size(); ++i) {
        const Complex eps = epsilon(layers[i].medium, e);
        const Complex kz = normal_wavevector(eps, kx2);
        const Complex q = admittance(eps, kz);
        const Complex delta = k0 * kz * *layers[i].thickness_nm;
        const Complex c = std::cos(delta);
        const Complex sn = std::sin(delta);
        const Complex j(0.0, 1.0);
        const Complex a11 = c;
        const Complex a12 = -j * sn / q;
        const Complex a21 = -j * q * sn;
        const Complex a22 = c;
        const Complex n11 = m11 * a11 + m12 * a21;
        const Complex n12 = m11 * a12 + m12 * a22;
        const Complex n21 = m21 * a11 + m22 * a21;
        const Complex n22 = m21 * a12 + m22 * a22;
        m11 = n11;
        m12 = n12;
        m21 = n21;
        m22 = n22;
    }

    const Complex eps_s = epsilon(layers.back().medium, e);
    const Complex q0 = admittance(eps0, normal_wavevector(eps0, kx2));
    const Complex qs = admittance(eps_s, normal_wavevector(eps_s, kx2));

    const Complex b = (m11 + m12 * qs) * q0;
    const Complex c = m21 + m22 * qs;
    const Complex den = b + c;
    if (!(std::abs(den) > 1e-300) || !std::isfinite(std::abs(den))) {
        std::ostringstream msg;
        msg << "transfer_matrix: singular system at E=" << e << " eV, theta=" << theta_deg << " deg";
        throw NumericalError(msg.str());
    }
    const Complex r = (b - c) / den;
    const Complex t = 2.0 * q0 / den;

    TRA out;
    out.R = std::norm(r);
    out.T = qs.real() / q0.real() * std::norm(t);
    out.A = 1.0 - out.T - out.R;
    if (!std::isfinite(out.T) || !std::isfinite(out.R)) {
        std::ostringstream msg;
        msg << "transfer_matrix: non-finite result at E=" << e << " eV, theta=" << theta_deg << " deg";
        throw NumericalError(msg.str());
    }
    return out;
}

std::vector<double> uniform_energy_grid(double first, double last, double step) {
    if (!(first > 0.0) || !(step > 0.0) || !(last >= first)) {
        throw ValidationError("energy grid needs first > 0, step > 0 and last >= first");
    }
    const auto n = static_cast<std::size_t>(std::floor((last - first) / step + 1e-9));
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        grid[i] = first + static_cast<double>(i) * step;
    }
    return grid;
}

namespace {

AngleSpectra allocate(const AngleGrid& g, std::span<const double> energies) {
    AngleSpectra out{g, {}};
    out.spectra.resize(g.size());
    for (auto& sp : out.spectra) {
        sp.energy.assign(energies.begin(), energies.end());
        sp.T.resize(energies.size());
        sp.R.resize(energies.size());
        sp.A.resize(energies.size());
    }
    return out;
}

void store(AngleSpectra& out, std::size_t ia, std::size_t ie, const TRA& v) {
    auto& sp = out.spectra[ia];
    sp.T[ie] = v.T;
    sp.R[ie] = v.R;
    sp.A[ie] = v.A;
}

}  // namespace

AngleSpectra simulate_angle_spectra_serial(const Stack& s, const AngleGrid& g,
                                           std::span<const double> energies, Polarization pol) {
    AngleSpectra out = allocate(g, energies);
    for (std::size_t ia = 0; ia < g.size(); ++ia) {
        for (std::size_t ie = 0; ie < energies.size(); ++ie) {
            store(out, ia, ie, transfer_matrix(s, energies[ie], g[ia], pol));
        }
    }
    return out;
}

AngleSpectra simulate_angle_spectra(const Stack& s, const AngleGrid& g, std::span<const double> energies,
                                    Polarization pol) {
    AngleSpectra out = allocate(g, energies);
    const auto n_e = static_cast<std::ptrdiff_t>(energies.size());
    const auto total = static_cast<std::ptrdiff_t>(g.size()) * n_e;
    std::vector<unsigned char> failed(static_cast<std::size_t>(total), 0);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
        const auto ia = static_cast<std::size_t>(idx / n_e);
        const auto ie = static_cast<std::size_t>(idx % n_e);
        try {
            store(out, ia, ie, transfer_matrix(s, energies[ie], g[ia], pol));
        } catch (...) {
            failed[static_cast<std::size_t>(idx)] = 1;
        }
    }

    // rethrow the first failure in grid order, independent of thread schedule
    const auto it = std::find(failed.begin(), failed.end(), 1);
    if (it != failed.end()) {
        const auto idx = static_cast<std::ptrdiff_t>(it - failed.begin());
        transfer_matrix(s, energies[static_cast<std::size_t>(idx % n_e)], g[static_cast<std::size_t>(idx / n_e)],
                        pol);
    }
    return out;
}

TabulatedIndex read_index_table(std::istream& in, const std::string& source) {
    csv::expect_header(in, {"energy_ev", "n", "k"}, source);
    std::vector<IndexRow> rows;
    std::string line;
    std::size_t line_no = 1;
    while (csv::next_line(in, line, line_no)) {
        const auto cells = csv::split(line);
        const std::string where = source + ":" + std::to_string(line_no);
        if (cells.size() != 3) {
            throw ValidationError(where + ": expected 3 columns");
        }
        rows.push_back({csv::parse_double(cells[0], where), csv::parse_double(cells[1], where),
                        csv::parse_double(cells[2], where)});
    }
    return TabulatedIndex(std::move(rows), source);
}

TabulatedIndex read_index_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open index table '" + path + "'");
    }
    return read_index_table(in, path);
}

}  // namespace polariton
