// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "edcal/edmodel.hpp"
#include "edcal/params.hpp"
#include "edcal/simcore.hpp"

namespace edcal {

struct ReplicationOutput {
    // KPI samples of patients arriving in [warmup, horizon).
    KpiSampleSet kpis;
    // Patients arriving in the window, excluding deceased and LWBS.
    int patient_counts[4][4] = {};
    // Census events per cell over the whole run: +1 at visit start, -1 at
    // the final exit; hourly_census applies the statistics window.
    std::vector<std::pair<double, int>> census_log[4][4];
    // Every entity of the run, including warm-up, deceased and LWBS.
    std::vector<PatientRecord> records;
};

// One simulation run. Randomness is a pure function of (base_seed,
// rep_index, patient index): the arrival process and every patient get
// private substreams, so replications are independent and a parameter
// change never shifts another patient's draws (common random numbers).
ReplicationOutput run_replication(const ScenarioConfig& cfg, const ParamVector& params,
                                  int rep_index, std::uint64_t base_seed,
                                  TraceLog* trace = nullptr);

// Replications 0..n_reps-1, optionally on `jobs` worker threads. Output
// order matches rep_index and is independent of jobs.
std::vector<ReplicationOutput> run_replications(const ScenarioConfig& cfg,
                                                const ParamVector& params, int n_reps,
                                                std::uint64_t base_seed, int jobs = 1);

}  // namespace edcal
