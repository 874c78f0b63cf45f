// Serial vs OpenMP transfer-matrix grid on the shipped cavity.
//
//   bench_tmm [config] [repeats]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "polariton/config.hpp"

using namespace polariton;

namespace {

template <class F>
double best_of(int repeats, F f) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

bool identical(const AngleSpectra& a, const AngleSpectra& b) {
    if (a.spectra.size() != b.spectra.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.spectra.size(); ++i) {
        if (a.spectra[i].T != b.spectra[i].T || a.spectra[i].R != b.spectra[i].R || a.spectra[i].A != b.spectra[i].A) {
            return false;
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : "configs/cavity.cfg";
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
    try {
        const RunConfig cfg = RunConfig::load(path);
        const Stack stack = cfg.stack();
        const AngleGrid grid = cfg.angle_grid();
        const auto energies = cfg.energy_grid();
        std::printf("grid: %zu angles x %zu energies, %d threads\n", grid.size(), energies.size(),
                    omp_get_max_threads());

        AngleSpectra serial, parallel;
        const double ts = best_of(repeats, [&] { serial = simulate_angle_spectra_serial(stack, grid, energies, Polarization::TE); });
        const double tp = best_of(repeats, [&] { parallel = simulate_angle_spectra(stack, grid, energies, Polarization::TE); });
        const double points = static_cast<double>(grid.size() * energies.size());
        std::printf("serial   %8.2f ms  %8.3f Mpts/s\n", 1e3 * ts, points / ts * 1e-6);
        std::printf("openmp   %8.2f ms  %8.3f Mpts/s  speedup %.2fx\n", 1e3 * tp, points / tp * 1e-6, ts / tp);
        const bool same = identical(serial, parallel);
        std::printf("bitwise identical: %s\n", same ? "yes" : "NO");
        return same ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
