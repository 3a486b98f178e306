// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "edcal/errors.hpp"

namespace edcal {

// Numeric values double as queue priorities: red outranks yellow outranks
// green outranks white.
enum class TriageTag : int { White = 0, Green = 1, Yellow = 2, Red = 3 };

enum class UnitId : int { MU = 0, SU = 1, RA = 2, MIU = 3 };

// DOT: door-to-treatment, visit start minus triage start (t2 - t0).
// DIT: treatment-to-exit, discharge (or last report, if recorded) minus
// visit start.
enum class Metric : int { DOT = 0, DIT = 1 };

enum class Outcome : int {
    Discharged = 0,
    Lwbs = 1,
    Deceased = 2,
    LeftDuringExams = 3,
    Transferred = 4,
    InSystemAtHorizon = 5,
};

const char* to_string(TriageTag t);
const char* to_string(UnitId u);
const char* to_string(Metric m);
const char* to_string(Outcome o);
TriageTag tag_from_string(std::string_view s);
UnitId unit_from_string(std::string_view s);
Metric metric_from_string(std::string_view s);
Outcome outcome_from_string(std::string_view s);

inline int priority_of(TriageTag t) { return static_cast<int>(t); }

// Admissible (tag, unit) assignments: white only to the minor-injuries
// unit, green to MU/SU/MIU, yellow to MU/SU, red to MU/SU/RA.
bool feasible_assignment(TriageTag t, UnitId u);

struct CellKey {
    TriageTag tag;
    UnitId unit;
    Metric metric;

    auto operator<=>(const CellKey&) const = default;
    std::string label() const;
};

// The eight (tag, unit) pairs whose service times are calibrated and whose
// KPI cells enter the objective and constraints. Red/RA is folded into the
// red MU/SU cells and is not calibrated separately.
std::span<const std::pair<TriageTag, UnitId>> decision_pairs();

// All nine admissible (tag, unit) pairs, for validation and reporting.
std::span<const std::pair<TriageTag, UnitId>> feasible_pairs();

}  // namespace edcal
