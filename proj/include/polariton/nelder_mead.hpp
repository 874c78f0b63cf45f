#pragma once

#include <functional>
#include <span>
#include <vector>

namespace polariton {

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double initial_step = 0.05;  // taken backwards when the forward vertex would leave [0, 1]
    double tolerance = 1e-10;  // max vertex distance (inf-norm) relative to max(1, |best|)
    int max_iterations = 5000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Objective may return +inf for infeasible points.
using Objective = std::function<double(std::span<const double>)>;

/// Deterministic downhill simplex.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start, const NelderMeadOptions& opt = {});

}  // namespace polariton
