// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "edcal/edmodel.hpp"
#include "edcal/params.hpp"

namespace edcal {

// A recorded period of ED visits. Times are decimal hours from the period
// start. The CSV schema is `id,tag,unit,t0,t2,t5,t6,outcome` with four
// decimals on times and empty fields for missing timestamps.
struct Dataset {
    std::vector<PatientRecord> records;
    int start_day = 0;        // weekday of hour 0 (not stored in the CSV)
    double period_days = 0.0;
};

Dataset load_dataset(const std::filesystem::path& file);
void write_dataset(const Dataset& ds, const std::filesystem::path& file);

// One exam request by the physician; patients may have several. CSV
// schema `id,request_time`.
struct ExamRequest {
    std::int64_t id = 0;
    double request_time = 0.0;  // hours from period start
};

std::vector<ExamRequest> load_annotations(const std::filesystem::path& file);
void write_annotations(std::span<const ExamRequest> reqs, const std::filesystem::path& file);

struct SyntheticData {
    Dataset dataset;
    std::vector<ExamRequest> annotations;  // at the (hidden) end of each visit
};

// Simulates `reps` replications of cfg under true_params and returns the
// post-warm-up records as a dataset, times shifted to the window start,
// ids renumbered, t5 never set. Deceased entities (tagless) are dropped;
// LWBS and unfinished pathways stay, with their missing timestamps. For
// reps > 1 the replications are pooled over the same clock period.
SyntheticData gen_synthetic(const ParamVector& true_params, const ScenarioConfig& cfg,
                            std::uint64_t seed, int reps = 1);

// Method-of-moments Weibull fit: the shape solves
// Gamma(1+2/a) / Gamma(1+1/a)^2 = 1 + (s/m)^2 by bisection on
// [0.05, 1000], the scale is m / Gamma(1+1/a). The result is clamped to
// [lo, hi] and rounded to the parameter lattice (1e-3 shapes, 1e-4
// scales). Requires at least two distinct values, all positive.
WeibullParams fit_weibull(std::span<const double> durations,
                          const WeibullParams& lo = {0.01, 0.01},
                          const WeibullParams& hi = {1000.0,
                                                     std::numeric_limits<double>::max()});

struct GuessResult {
    ParamVector params;
    std::vector<std::string> fallback_cells;  // "visit G/MU", ...
    std::vector<std::string> warnings;
};

// Starting point for the calibration. Visit parameters are fitted per
// cell from the gap between the visit start and the latest exam request
// within cfg.guess_window_hours; exams parameters from the remaining time
// to discharge net of the mean final wait; triage parameters (timestamps
// give no handle on them) and any cell without a usable sample fall back
// to the configured defaults.
GuessResult initial_guess(const Dataset& ds, std::span<const ExamRequest> annotations,
                          const ScenarioConfig& cfg);

}  // namespace edcal
