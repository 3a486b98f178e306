// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "edcal/distributions.hpp"
#include "edcal/edtypes.hpp"
#include "edcal/params.hpp"
#include "edcal/simcore.hpp"

namespace edcal {

struct SurgeConfig {
    bool enabled = false;
    double threshold_hours = 4.0;
    int extra_seats = 1;  // per visit unit (MU and SU)

    friend bool operator==(const SurgeConfig&, const SurgeConfig&) = default;
};

// Everything about the department that is held fixed during calibration:
// arrival process, triage mix, routing, branch probabilities, seat
// schedules and the final-wait distributions.
struct ScenarioConfig {
    int start_day = 0;             // weekday of hour 0; 0 = Monday
    double horizon_hours = 912.0;  // 38 days
    double warmup_hours = 168.0;   // 7 days; stats window is [warmup, horizon)

    RateTable arrival_rates;
    double p_deceased = 0.0;

    // Triage-tag draw weights; "day" applies while the minor-injuries unit
    // is open (Mon-Sat 08:00-20:00), "night" otherwise. White patients and
    // MIU routing exist only on the day shift.
    std::array<double, 4> tag_weights_day{};    // indexed by TriageTag
    std::array<double, 4> tag_weights_night{};  // White weight must be 0

    // Unit draw weights per tag and shift (0 = day, 1 = night), indexed by
    // UnitId. Weights of inadmissible units must be 0.
    double unit_weights[4][2][4] = {};

    std::array<double, 4> p_lwbs{};  // per tag, applied after triage
    std::array<std::pair<double, double>, 4> pre_queue_delay{};  // per tag, uniform (lo, hi)
    double p_removed_after_exams[4][4] = {};                     // per (tag, unit)

    // Post-exams wait before discharge, per admissible (tag, unit); fixed,
    // not calibrated.
    WeibullParams final_wait[4][4] = {};

    std::vector<CapacityWindow> seats_mu, seats_su, seats_miu, seats_red;
    SurgeConfig surge;

    // Starting-point defaults for cells the data-driven initial guess
    // cannot fit (triage always, visit/exams on fallback).
    WeibullParams initial_triage{1.0, 0.1};
    WeibullParams initial_visit{1.0, 0.5};
    WeibullParams initial_exams{1.0, 2.0};
    double guess_window_hours = 4.0;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Bundled defaults: reference-month triage mix and routing splits, seat
// schedules, LWBS rates and final-wait distributions, representative
// arrival-rate table. See docs/default_scenario.md for the field-by-field
// description.
ScenarioConfig default_scenario();

// Throws ConfigError on inconsistent settings (negative rates, weights on
// inadmissible cells, missing final-wait distributions, bad windows, ...).
void validate_scenario(const ScenarioConfig& cfg);

ScenarioConfig load_scenario(const std::filesystem::path& file);
void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& file);

// True while the minor-injuries unit is open (Mon-Sat, 08:00-20:00); this
// is also the boundary between the "day" and "night" assignment mixes.
bool miu_open_at(int start_day, double t);

// One visit pathway through the department.
struct PatientRecord {
    std::int64_t id = 0;
    std::optional<TriageTag> tag;  // missing only for pre-triage deceased
    std::optional<UnitId> unit;
    std::optional<double> t0;  // triage start (arrival)
    std::optional<double> t2;  // visit start (seat granted)
    std::optional<double> t5;  // last report time; present only in real data
    std::optional<double> t6;  // discharge
    Outcome outcome = Outcome::InSystemAtHorizon;
    // Visit end (seat released); simulation-internal, feeds exam-request
    // annotations, never serialized into datasets.
    std::optional<double> t3;
};

struct TagUnit {
    TriageTag tag;
    UnitId unit;
};

// Draws the triage tag and destination unit for an arrival at time `now`.
// Exactly two uniforms per call.
TagUnit assign_tag_and_unit(double now, const ScenarioConfig& cfg, RngStream& rng);

// Service-time draws. The mixture cells resolve by a fair coin per call:
// (Green, MIU) triage borrows the Green/MU or Green/SU distribution, and
// (Red, RA) borrows Red/MU or Red/SU for every activity.
double triage_duration(TriageTag t, UnitId u, const ParamVector& p, RngStream& rng);
double visit_duration(TriageTag t, UnitId u, const ParamVector& p, RngStream& rng);
double exams_duration(TriageTag t, UnitId u, const ParamVector& p, RngStream& rng);

// Per-cell KPI samples of one replication (or of one dataset), in hours.
struct KpiSampleSet {
    std::vector<double> samples[4][4][2];  // [tag][unit][metric]

    const std::vector<double>& cell(TriageTag t, UnitId u, Metric m) const {
        return samples[static_cast<int>(t)][static_cast<int>(u)][static_cast<int>(m)];
    }
    std::vector<double>& cell(TriageTag t, UnitId u, Metric m) {
        return samples[static_cast<int>(t)][static_cast<int>(u)][static_cast<int>(m)];
    }
};

// DOT = t2 - t0 for every record that reached a visit; DIT = (t5 if
// present else t6) - t2 for discharged records only. Throws DataError on
// t2 < t0.
KpiSampleSet extract_kpis(std::span<const PatientRecord> records);

// Time-average number present per hour of day over the window, from a
// time-ordered log of (+1/-1) census events. Hour h averages over every
// occurrence of [h, h+1) within [win_start, win_end).
std::array<double, 24> hourly_census(std::span<const std::pair<double, int>> log,
                                     double win_start, double win_end);

}  // namespace edcal
