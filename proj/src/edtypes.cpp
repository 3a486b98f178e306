// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "edcal/edtypes.hpp"

#include <string>

#include "edcal/errors.hpp"

namespace edcal {

const char* to_string(TriageTag t) {
    switch (t) {
        case TriageTag::White: return "W";
        case TriageTag::Green: return "G";
        case TriageTag::Yellow: return "Y";
        case TriageTag::Red: return "R";
    }
    throw EngineBug("bad TriageTag");
}

const char* to_string(UnitId u) {
    switch (u) {
        case UnitId::MU: return "MU";
        case UnitId::SU: return "SU";
        case UnitId::RA: return "RA";
        case UnitId::MIU: return "MIU";
    }
    throw EngineBug("bad UnitId");
}

const char* to_string(Metric m) {
    switch (m) {
        case Metric::DOT: return "DOT";
        case Metric::DIT: return "DIT";
    }
    throw EngineBug("bad Metric");
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Discharged: return "discharged";
        case Outcome::Lwbs: return "lwbs";
        case Outcome::Deceased: return "deceased";
        case Outcome::LeftDuringExams: return "left_during_exams";
        case Outcome::Transferred: return "transferred";
        case Outcome::InSystemAtHorizon: return "in_system_at_horizon";
    }
    throw EngineBug("bad Outcome");
}

TriageTag tag_from_string(std::string_view s) {
    if (s == "W") return TriageTag::White;
    if (s == "G") return TriageTag::Green;
    if (s == "Y") return TriageTag::Yellow;
    if (s == "R") return TriageTag::Red;
    throw DataError("unknown triage tag '" + std::string(s) + "'");
}

UnitId unit_from_string(std::string_view s) {
    if (s == "MU") return UnitId::MU;
    if (s == "SU") return UnitId::SU;
    if (s == "RA") return UnitId::RA;
    if (s == "MIU") return UnitId::MIU;
    throw DataError("unknown unit '" + std::string(s) + "'");
}

Metric metric_from_string(std::string_view s) {
    if (s == "DOT") return Metric::DOT;
    if (s == "DIT") return Metric::DIT;
    throw DataError("unknown metric '" + std::string(s) + "'");
}

Outcome outcome_from_string(std::string_view s) {
    if (s == "discharged") return Outcome::Discharged;
    if (s == "lwbs") return Outcome::Lwbs;
    if (s == "deceased") return Outcome::Deceased;
    if (s == "left_during_exams") return Outcome::LeftDuringExams;
    if (s == "transferred") return Outcome::Transferred;
    if (s == "in_system_at_horizon") return Outcome::InSystemAtHorizon;
    throw DataError("unknown outcome '" + std::string(s) + "'");
}

bool feasible_assignment(TriageTag t, UnitId u) {
    switch (t) {
        case TriageTag::White: return u == UnitId::MIU;
        case TriageTag::Green: return u == UnitId::MU || u == UnitId::SU || u == UnitId::MIU;
        case TriageTag::Yellow: return u == UnitId::MU || u == UnitId::SU;
        case TriageTag::Red: return u == UnitId::MU || u == UnitId::SU || u == UnitId::RA;
    }
    throw EngineBug("bad TriageTag");
}

std::string CellKey::label() const {
    std::string s = to_string(tag);
    s += '/';
    s += to_string(unit);
    s += '/';
    s += to_string(metric);
    return s;
}

std::span<const std::pair<TriageTag, UnitId>> decision_pairs() {
    static const std::pair<TriageTag, UnitId> pairs[] = {
        {TriageTag::White, UnitId::MIU},  {TriageTag::Green, UnitId::MU},
        {TriageTag::Green, UnitId::SU},   {TriageTag::Green, UnitId::MIU},
        {TriageTag::Yellow, UnitId::MU},  {TriageTag::Yellow, UnitId::SU},
        {TriageTag::Red, UnitId::MU},     {TriageTag::Red, UnitId::SU},
    };
    return pairs;
}

std::span<const std::pair<TriageTag, UnitId>> feasible_pairs() {
    static const std::pair<TriageTag, UnitId> pairs[] = {
        {TriageTag::White, UnitId::MIU},  {TriageTag::Green, UnitId::MU},
        {TriageTag::Green, UnitId::SU},   {TriageTag::Green, UnitId::MIU},
        {TriageTag::Yellow, UnitId::MU},  {TriageTag::Yellow, UnitId::SU},
        {TriageTag::Red, UnitId::MU},     {TriageTag::Red, UnitId::SU},
        {TriageTag::Red, UnitId::RA},
    };
    return pairs;
}

}  // namespace edcal
