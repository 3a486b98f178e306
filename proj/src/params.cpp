// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "edcal/params.hpp"

#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "edcal/errors.hpp"

namespace edcal {

namespace {

using Pair = std::pair<TriageTag, UnitId>;

constexpr Pair kTriagePairs[7] = {
    {TriageTag::White, UnitId::MIU}, {TriageTag::Green, UnitId::MU},
    {TriageTag::Green, UnitId::SU},  {TriageTag::Yellow, UnitId::MU},
    {TriageTag::Yellow, UnitId::SU}, {TriageTag::Red, UnitId::MU},
    {TriageTag::Red, UnitId::SU},
};

constexpr Pair kVisitPairs[8] = {
    {TriageTag::White, UnitId::MIU}, {TriageTag::Green, UnitId::MU},
    {TriageTag::Green, UnitId::SU},  {TriageTag::Green, UnitId::MIU},
    {TriageTag::Yellow, UnitId::MU}, {TriageTag::Yellow, UnitId::SU},
    {TriageTag::Red, UnitId::MU},    {TriageTag::Red, UnitId::SU},
};

std::string pair_label(TriageTag t, UnitId u) {
    return std::string(to_string(t)) + "/" + to_string(u);
}

}  // namespace

std::span<const Pair> triage_pairs() { return kTriagePairs; }
std::span<const Pair> visit_pairs() { return kVisitPairs; }

int triage_index(TriageTag t, UnitId u) {
    if (!feasible_assignment(t, u))
        throw DomainError("no triage process for cell " + pair_label(t, u));
    if (u == UnitId::RA || (t == TriageTag::Green && u == UnitId::MIU)) return -1;
    for (int i = 0; i < 7; ++i)
        if (kTriagePairs[i] == Pair{t, u}) return i;
    throw EngineBug("triage_index: unreachable");
}

int visit_index(TriageTag t, UnitId u) {
    if (!feasible_assignment(t, u))
        throw DomainError("no visit process for cell " + pair_label(t, u));
    if (u == UnitId::RA) return -1;
    for (int i = 0; i < 8; ++i)
        if (kVisitPairs[i] == Pair{t, u}) return i;
    throw EngineBug("visit_index: unreachable");
}

std::vector<double> flatten(const ParamVector& p) {
    std::vector<double> v;
    v.reserve(kNumVars);
    for (const auto& w : p.triage) {
        v.push_back(w.shape);
        v.push_back(w.scale);
    }
    for (const auto& w : p.visit) {
        v.push_back(w.shape);
        v.push_back(w.scale);
    }
    for (const auto& w : p.exams) {
        v.push_back(w.shape);
        v.push_back(w.scale);
    }
    return v;
}

ParamVector unflatten(std::span<const double> v) {
    if (v.size() != static_cast<std::size_t>(kNumVars))
        throw DomainError("unflatten: expected " + std::to_string(kNumVars) +
                          " values, got " + std::to_string(v.size()));
    ParamVector p;
    std::size_t k = 0;
    for (auto& w : p.triage) {
        w.shape = v[k++];
        w.scale = v[k++];
    }
    for (auto& w : p.visit) {
        w.shape = v[k++];
        w.scale = v[k++];
    }
    for (auto& w : p.exams) {
        w.shape = v[k++];
        w.scale = v[k++];
    }
    return p;
}

std::vector<double> lattice_deltas() {
    std::vector<double> d(kNumVars);
    for (int i = 0; i < kNumVars; ++i) d[i] = (i % 2 == 0) ? 1e-3 : 1e-4;
    return d;
}

ParamBounds default_bounds() {
    ParamBounds b;
    b.lower.assign(kNumVars, 0.01);
    b.upper.assign(kNumVars, 1000.0);
    auto cap_scales = [&](int first_cell, int n_cells, double cap) {
        for (int c = 0; c < n_cells; ++c) b.upper[2 * (first_cell + c) + 1] = cap;
    };
    cap_scales(0, 7, 0.5);   // triage
    cap_scales(7, 8, 4.0);   // visit
    cap_scales(15, 8, 40.0); // exams
    return b;
}

ParamVector reference_params() {
    ParamVector p;
    // Triage: W/MIU, G/MU, G/SU, Y/MU, Y/SU, R/MU, R/SU.
    p.triage = {WeibullParams{0.61, 0.42}, WeibullParams{0.60, 0.49},
                WeibullParams{1000.0, 0.50}, WeibullParams{0.55, 0.50},
                WeibullParams{1000.0, 0.28}, WeibullParams{0.80, 0.19},
                WeibullParams{0.92, 0.10}};
    // Visit: W/MIU, G/MU, G/SU, G/MIU, Y/MU, Y/SU, R/MU, R/SU.
    p.visit = {WeibullParams{0.99, 0.57}, WeibullParams{1000.0, 1.63},
               WeibullParams{0.64, 0.31}, WeibullParams{1.06, 0.41},
               WeibullParams{0.62, 0.72}, WeibullParams{0.51, 0.22},
               WeibullParams{2.24, 0.36}, WeibullParams{0.88, 0.75}};
    // Exams, same order as visit.
    p.exams = {WeibullParams{0.62, 0.23}, WeibullParams{0.69, 12.26},
               WeibullParams{0.68, 2.11}, WeibullParams{1.29, 1.61},
               WeibullParams{0.78, 25.46}, WeibullParams{0.72, 6.32},
               WeibullParams{0.78, 30.92}, WeibullParams{1.41, 19.34}};
    return p;
}

namespace {

nlohmann::json block_to_json(std::span<const Pair> pairs, std::span<const WeibullParams> ws) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        j[pair_label(pairs[i].first, pairs[i].second)] = {{"shape", ws[i].shape},
                                                          {"scale", ws[i].scale}};
    }
    return j;
}

void block_from_json(const nlohmann::json& j, std::span<const Pair> pairs,
                     std::span<WeibullParams> ws, const char* block) {
    if (!j.is_object())
        throw DataError(std::string("params: '") + block + "' must be an object");
    if (j.size() != pairs.size())
        throw DataError(std::string("params: '") + block + "' must have " +
                        std::to_string(pairs.size()) + " cells, got " +
                        std::to_string(j.size()));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        std::string key = pair_label(pairs[i].first, pairs[i].second);
        auto it = j.find(key);
        if (it == j.end())
            throw DataError(std::string("params: '") + block + "' misses cell " + key);
        if (!it->contains("shape") || !it->contains("scale"))
            throw DataError("params: cell " + key + " needs 'shape' and 'scale'");
        ws[i].shape = it->at("shape").get<double>();
        ws[i].scale = it->at("scale").get<double>();
        if (!(ws[i].shape > 0.0) || !(ws[i].scale > 0.0))
            throw DataError("params: cell " + key + " has non-positive entries");
    }
}

}  // namespace

ParamVector load_params(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open params file " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("params file " + file.string() + ": " + e.what());
    }
    ParamVector p;
    block_from_json(j.value("triage", nlohmann::json()), triage_pairs(), p.triage, "triage");
    block_from_json(j.value("visit", nlohmann::json()), visit_pairs(), p.visit, "visit");
    block_from_json(j.value("exams", nlohmann::json()), visit_pairs(), p.exams, "exams");
    return p;
}

void save_params(const ParamVector& p, const std::filesystem::path& file) {
    nlohmann::json j;
    j["triage"] = block_to_json(triage_pairs(), p.triage);
    j["visit"] = block_to_json(visit_pairs(), p.visit);
    j["exams"] = block_to_json(visit_pairs(), p.exams);
    std::ofstream out(file);
    if (!out) throw DataError("cannot write params file " + file.string());
    out << j.dump(2) << '\n';
}

}  // namespace edcal
