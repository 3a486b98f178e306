// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "edcal/edmodel.hpp"
#include "edcal/params.hpp"

namespace edcal {

// Right-continuous step function: 0 before the first breakpoint, y[i] on
// [x[i], x[i+1]), y.back() from the last breakpoint on.
struct StepFunction {
    std::vector<double> x;  // strictly increasing
    std::vector<double> y;

    double value_at(double t) const;

    friend bool operator==(const StepFunction&, const StepFunction&) = default;
};

// Empirical CDF: jumps 1/k at each sample value (ties stack).
StepFunction ecdf(std::span<const double> samples);

// Pointwise arithmetic mean on the union of the input breakpoints.
StepFunction mean_ecdf(std::span<const StepFunction> fs);

// Exact integral over [0, inf) of the squared difference of two step
// functions that agree at +inf (as CDFs do); closed form on the merged
// breakpoint grid, no discretization.
double ecdf_sq_integral(const StepFunction& f1, const StepFunction& f2);

// Sum of ecdf_sq_integral over all cells; the two maps must have
// identical key sets.
double objective(const std::map<CellKey, StepFunction>& sim,
                 const std::map<CellKey, StepFunction>& real);

struct KpiStats {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, n-1 denominator
    std::int64_t count = 0;
};

// count >= 1 required; std is 0 for a single sample.
KpiStats sample_stats(std::span<const double> xs);

// Relative accuracy constraints, feasible iff <= 0. The reference value
// must be nonzero.
double constraint_g(double mu_sim, double mu_real, double tol);
double constraint_h(double sd_sim, double sd_real, double tol);

// Relative-error tolerances per (tag, unit, metric).
struct Tolerances {
    double tol_mu[4][4][2] = {};
    double tol_sigma[4][4][2] = {};

    // 0.35 for green and yellow patients in MU and SU, 0.2 elsewhere.
    static Tolerances defaults();
};

// Result of one calibration-objective evaluation.
struct EvalResult {
    bool ok = false;
    std::string failure;  // set when !ok: which simulated cell came up empty

    double f = 0.0;
    std::vector<CellKey> cells;  // decision cells, fixed order (16)
    // Aligned with `cells`; a constraint dropped for a degenerate
    // reference is -inf (never active).
    std::vector<double> g, h;
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;

    double max_violation() const {
        double m = 0.0;
        for (double v : g) m = std::max(m, v);
        for (double v : h) m = std::max(m, v);
        return m;
    }

    static constexpr double kDropped = -std::numeric_limits<double>::infinity();
};

// Simulates n_reps replications of cfg at `params` (fixed base_seed:
// common random numbers make repeated calls identical) and compares
// against reference KPI groups, cell by cell over the decision set.
//
// The reference side is a list of per-replication sample sets; a dataset
// loaded from disk is one group. Reference ECDFs / moments average over
// the groups exactly as the simulated side averages over replications, so
// comparing a run against itself is exact.
//
// A decision cell empty in every replication makes the point unusable:
// ok = false and `failure` names the cell (the optimizer treats it as
// +inf). A cell empty in the reference throws DataError. Degenerate
// reference moments (mu or sigma equal to 0) drop that constraint with a
// warning.
EvalResult evaluate_point(const ParamVector& params, const ScenarioConfig& cfg,
                          std::span<const KpiSampleSet> real_sets, int n_reps,
                          std::uint64_t base_seed, int jobs = 1,
                          const Tolerances& tol = Tolerances::defaults());

}  // namespace edcal
