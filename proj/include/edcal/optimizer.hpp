// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace edcal {

// What the black box reports at a point. ok = false marks a point the
// evaluator could not judge (for the calibration problem: a decision cell
// with no simulated patients); the search treats it as +inf.
struct Evaluation {
    bool ok = false;
    double f = 0.0;
    std::vector<double> cons;  // feasible iff every entry <= 0
};

using Evaluator = std::function<Evaluation(std::span<const double>)>;

// Lattice mapping. Values are stored as integer multiples of per-
// coordinate granularities; from_lattice reproduces decimal-aligned
// values exactly (division by the integral inverse granularity).
std::vector<std::int64_t> to_lattice(std::span<const double> v, std::span<const double> delta,
                                     int* off_lattice_warnings = nullptr);
std::vector<double> from_lattice(std::span<const std::int64_t> k,
                                 std::span<const double> delta);

// Exterior l1 penalty: f + (1/eps) * sum of positive parts.
double penalty(double f, std::span<const double> cons, double eps);

struct SolveOptions {
    int budget = 3000;
    std::uint64_t seed = 0;
    double initial_eps = 1.0;
    double eps_shrink = 10.0;
    double eps_min = 1e-12;
    double feasibility_tol = 1e-6;
    int initial_step = 128;    // lattice units
    int step_cap = 1 << 22;    // lattice units
    std::size_t cache_capacity = 100000;
};

// One row per evaluator call (cache hits consume neither budget nor rows).
struct HistoryRow {
    int eval_index = 0;
    double f = 0.0;
    double max_violation = 0.0;
    bool accepted = false;
    double eps = 0.0;
};

struct SolveReport {
    std::vector<double> best_point;
    double best_f = 0.0;
    double best_max_violation = 0.0;
    int evaluations_used = 0;
    bool feasible = false;
    // True when the run ended at a point whose 2n unit-step neighbours
    // were all tried without improvement (rather than on budget).
    bool certified_stationary = false;
    std::vector<HistoryRow> history;
};

void write_history_csv(const SolveReport& rep, std::ostream& os);
void write_summary_json(const SolveReport& rep, std::ostream& os);

// Derivative-free lattice descent with an exterior penalty.
//
// Coordinates are visited in a per-pass shuffled order; each of the 2n
// directions keeps a persistent step size (in lattice units). A direction
// is probed at its current step: on success the move is accepted and the
// same direction is extended with doubling steps; on failure the step halves
// (once per pass, floor 1). A pass with no acceptance and all steps at 1
// certifies lattice stationarity: then either the point is feasible and
// the search stops, or eps shrinks by eps_shrink and the search resumes
// with the steps left at 1 (the line search regrows them on demand).
// Trials are clamped to the box; points are cached (LRU) so re-probes are
// free. Strict improvement only. If the final incumbent is infeasible but
// some evaluated point was feasible, the best feasible point is returned.
SolveReport solve(const Evaluator& evaluate, std::span<const double> start,
                  std::span<const double> lower, std::span<const double> upper,
                  std::span<const double> delta, const SolveOptions& opts = {});

}  // namespace edcal
