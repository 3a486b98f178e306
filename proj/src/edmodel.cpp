// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "edcal/edmodel.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "edcal/errors.hpp"

namespace edcal {

namespace {

// Representative weekly arrival-rate table: diurnal shape with a night
// trough near 00:35 of the mean and a late-morning peak near 01:75, mild
// day-of-week factors, about 101 arrivals per day, 70.5% of them on the
// day shift (08-20).
RateTable representative_rates() {
    constexpr double hour_mult[24] = {0.55, 0.45, 0.40, 0.35, 0.33, 0.35, 0.45, 0.70,
                                      1.10, 1.50, 1.70, 1.75, 1.60, 1.45, 1.35, 1.30,
                                      1.30, 1.35, 1.35, 1.25, 1.10, 0.95, 0.80, 0.67};
    constexpr double day_factor[7] = {1.10, 1.05, 1.00, 0.98, 0.97, 0.92, 0.98};
    RateTable rt;
    for (int d = 0; d < 7; ++d)
        for (int h = 0; h < 24; ++h)
            rt.rates[d][h] = std::round(420.0 * day_factor[d] * hour_mult[h]) / 100.0;
    return rt;
}

constexpr int kDay = 0, kNight = 1;

int idx(TriageTag t) { return static_cast<int>(t); }
int idx(UnitId u) { return static_cast<int>(u); }

}  // namespace

ScenarioConfig default_scenario() {
    ScenarioConfig cfg;
    cfg.arrival_rates = representative_rates();

    cfg.tag_weights_day = {65.0, 1306.0, 1420.0, 157.0};
    cfg.tag_weights_night = {0.0, 498.0, 638.0, 95.0};

    // Reference-month routing counts per tag and shift (MU, SU, RA, MIU).
    cfg.unit_weights[idx(TriageTag::White)][kDay][idx(UnitId::MIU)] = 47.0;
    cfg.unit_weights[idx(TriageTag::Green)][kDay][idx(UnitId::MU)] = 132.0;
    cfg.unit_weights[idx(TriageTag::Green)][kDay][idx(UnitId::SU)] = 403.0;
    cfg.unit_weights[idx(TriageTag::Green)][kDay][idx(UnitId::MIU)] = 260.0;
    cfg.unit_weights[idx(TriageTag::Green)][kNight][idx(UnitId::MU)] = 116.0;
    cfg.unit_weights[idx(TriageTag::Green)][kNight][idx(UnitId::SU)] = 225.0;
    for (int s : {kDay, kNight}) {
        cfg.unit_weights[idx(TriageTag::Yellow)][s][idx(UnitId::MU)] = 1316.0;
        cfg.unit_weights[idx(TriageTag::Yellow)][s][idx(UnitId::SU)] = 693.0;
        cfg.unit_weights[idx(TriageTag::Red)][s][idx(UnitId::MU)] = 191.0;
        cfg.unit_weights[idx(TriageTag::Red)][s][idx(UnitId::SU)] = 45.0;
        cfg.unit_weights[idx(TriageTag::Red)][s][idx(UnitId::RA)] = 16.0;
    }

    cfg.p_lwbs = {1.0 / 66.0, 16.0 / 1820.0, 0.0, 0.0};
    for (auto& d : cfg.pre_queue_delay) d = {0.0, 0.5};

    auto set_fw = [&](TriageTag t, UnitId u, double shape, double scale) {
        cfg.final_wait[idx(t)][idx(u)] = WeibullParams{shape, scale};
    };
    set_fw(TriageTag::White, UnitId::MIU, 1.12, 0.41);
    set_fw(TriageTag::Green, UnitId::MIU, 0.83, 0.57);
    set_fw(TriageTag::Green, UnitId::SU, 0.61, 1.07);
    set_fw(TriageTag::Green, UnitId::MU, 0.57, 4.91);
    set_fw(TriageTag::Yellow, UnitId::SU, 0.63, 2.33);
    set_fw(TriageTag::Yellow, UnitId::MU, 0.62, 7.22);
    set_fw(TriageTag::Red, UnitId::RA, 0.67, 9.26);
    set_fw(TriageTag::Red, UnitId::SU, 0.71, 4.47);
    set_fw(TriageTag::Red, UnitId::MU, 0.69, 6.65);

    // Day shift 08-20, every day unless masked out (bit 0 = Monday).
    cfg.seats_mu = {{8.0, 20.0, 0x7f, 3}, {0.0, 8.0, 0x7f, 2}, {20.0, 24.0, 0x7f, 2}};
    cfg.seats_su = {{8.0, 20.0, 0x7f, 2}, {0.0, 8.0, 0x7f, 1}, {20.0, 24.0, 0x7f, 1}};
    cfg.seats_miu = {{8.0, 20.0, 0x3f, 2}};
    // Red-dedicated seats (1 in MU, 2 in SU, 2 in RA) pooled, around the
    // clock.
    cfg.seats_red = {{0.0, 24.0, 0x7f, 5}};

    return cfg;
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("scenario: " + what);
}

void check_schedule(const std::vector<CapacityWindow>& ws, const std::string& name) {
    require(!ws.empty(), name + " schedule is empty");
    for (const auto& w : ws) {
        require(w.start_hour >= 0.0 && w.start_hour < w.end_hour && w.end_hour <= 24.0,
                name + " window hours out of range");
        require(w.day_mask != 0 && (w.day_mask & ~0x7f) == 0, name + " window day mask invalid");
        require(w.seats >= 0, name + " window has negative seats");
    }
}

bool is_prob(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void validate_scenario(const ScenarioConfig& cfg) {
    require(cfg.start_day >= 0 && cfg.start_day < 7, "start_day must be 0..6");
    require(cfg.warmup_hours >= 0.0 && cfg.horizon_hours > cfg.warmup_hours,
            "need 0 <= warmup < horizon");
    for (const auto& day : cfg.arrival_rates.rates)
        for (double r : day) require(r >= 0.0 && std::isfinite(r), "arrival rate out of range");
    require(cfg.arrival_rates.max_rate() > 0.0, "arrival rates are all zero");
    require(is_prob(cfg.p_deceased), "p_deceased out of range");

    double day_sum = 0.0, night_sum = 0.0;
    for (int t = 0; t < 4; ++t) {
        require(cfg.tag_weights_day[t] >= 0.0 && cfg.tag_weights_night[t] >= 0.0,
                "tag weights must be non-negative");
        day_sum += cfg.tag_weights_day[t];
        night_sum += cfg.tag_weights_night[t];
    }
    require(day_sum > 0.0 && night_sum > 0.0, "tag weights must have a positive sum");
    require(cfg.tag_weights_night[idx(TriageTag::White)] == 0.0,
            "White tag weight must be 0 at night");

    for (int t = 0; t < 4; ++t) {
        for (int s : {kDay, kNight}) {
            double sum = 0.0;
            for (int u = 0; u < 4; ++u) {
                const double w = cfg.unit_weights[t][s][u];
                require(w >= 0.0, "unit weights must be non-negative");
                if (w > 0.0) {
                    require(feasible_assignment(static_cast<TriageTag>(t),
                                                static_cast<UnitId>(u)),
                            "unit weight on inadmissible cell " +
                                CellKey{static_cast<TriageTag>(t), static_cast<UnitId>(u),
                                        Metric::DOT}
                                    .label());
                    require(!(s == kNight && u == idx(UnitId::MIU)),
                            "MIU unit weight must be 0 at night");
                }
                sum += w;
            }
            const double tag_w =
                (s == kDay) ? cfg.tag_weights_day[t] : cfg.tag_weights_night[t];
            if (tag_w > 0.0)
                require(sum > 0.0, std::string("no unit weights for tag ") +
                                       to_string(static_cast<TriageTag>(t)) +
                                       (s == kDay ? " (day)" : " (night)"));
        }
        require(is_prob(cfg.p_lwbs[t]), "p_lwbs out of range");
        const auto [lo, hi] = cfg.pre_queue_delay[t];
        require(lo >= 0.0 && hi >= lo, "pre_queue_delay needs 0 <= lo <= hi");
    }

    for (auto [t, u] : feasible_pairs()) {
        require(is_prob(cfg.p_removed_after_exams[idx(t)][idx(u)]),
                "p_removed_after_exams out of range");
        const auto& fw = cfg.final_wait[idx(t)][idx(u)];
        require(fw.shape > 0.0 && fw.scale > 0.0,
                "final_wait missing for cell " + CellKey{t, u, Metric::DIT}.label());
    }

    check_schedule(cfg.seats_mu, "MU");
    check_schedule(cfg.seats_su, "SU");
    check_schedule(cfg.seats_miu, "MIU");
    check_schedule(cfg.seats_red, "RED");

    require(cfg.surge.threshold_hours > 0.0, "surge threshold must be positive");
    require(cfg.surge.extra_seats >= 0, "surge extra seats must be non-negative");

    for (const auto& w : {cfg.initial_triage, cfg.initial_visit, cfg.initial_exams})
        require(w.shape > 0.0 && w.scale > 0.0, "initial defaults must be positive");
    require(cfg.guess_window_hours > 0.0, "guess window must be positive");
}

bool miu_open_at(int start_day, double t) {
    if (start_day < 0 || start_day > 6) throw DomainError("miu_open_at: start_day must be 0..6");
    if (t < 0.0) throw DomainError("miu_open_at: negative time");
    const int day = static_cast<int>(t / 24.0);
    const double hour = t - 24.0 * day;
    const int weekday = (start_day + day) % 7;  // 6 = Sunday
    return weekday != 6 && hour >= 8.0 && hour < 20.0;
}

TagUnit assign_tag_and_unit(double now, const ScenarioConfig& cfg, RngStream& rng) {
    const bool day = miu_open_at(cfg.start_day, now);
    const auto& tw = day ? cfg.tag_weights_day : cfg.tag_weights_night;
    const auto tag = static_cast<TriageTag>(categorical_sample(tw, rng));
    const double* uw = cfg.unit_weights[idx(tag)][day ? kDay : kNight];
    const auto unit = static_cast<UnitId>(categorical_sample({uw, 4}, rng));
    return {tag, unit};
}

namespace {

// Mixture cells resolve to the MU or SU distribution of the same tag by a
// fair coin; two draws total, so per-cell draw counts stay fixed.
template <std::size_t N>
double cell_sample(TriageTag t, int index, const std::array<WeibullParams, N>& block,
                   int (*reindex)(TriageTag, UnitId), RngStream& rng) {
    if (index < 0) {
        const UnitId pick = rng.bernoulli(0.5) ? UnitId::MU : UnitId::SU;
        index = reindex(t, pick);
    }
    return weibull_sample(block[static_cast<std::size_t>(index)], rng);
}

}  // namespace

double triage_duration(TriageTag t, UnitId u, const ParamVector& p, RngStream& rng) {
    return cell_sample(t, triage_index(t, u), p.triage, &triage_index, rng);
}

double visit_duration(TriageTag t, UnitId u, const ParamVector& p, RngStream& rng) {
    return cell_sample(t, visit_index(t, u), p.visit, &visit_index, rng);
}

double exams_duration(TriageTag t, UnitId u, const ParamVector& p, RngStream& rng) {
    return cell_sample(t, visit_index(t, u), p.exams, &visit_index, rng);
}

KpiSampleSet extract_kpis(std::span<const PatientRecord> records) {
    KpiSampleSet out;
    for (const auto& r : records) {
        if (!r.tag || !r.unit || !r.t0 || !r.t2) continue;
        if (*r.t2 < *r.t0)
            throw DataError("record " + std::to_string(r.id) + ": t2 precedes t0");
        out.cell(*r.tag, *r.unit, Metric::DOT).push_back(*r.t2 - *r.t0);
        if (r.outcome != Outcome::Discharged) continue;
        const std::optional<double> end = r.t5 ? r.t5 : r.t6;
        if (!end)
            throw DataError("record " + std::to_string(r.id) +
                            ": discharged without t5 or t6");
        if (*end < *r.t2)
            throw DataError("record " + std::to_string(r.id) + ": exit precedes t2");
        out.cell(*r.tag, *r.unit, Metric::DIT).push_back(*end - *r.t2);
    }
    return out;
}

std::array<double, 24> hourly_census(std::span<const std::pair<double, int>> log,
                                     double win_start, double win_end) {
    if (!(win_start >= 0.0) || !(win_end > win_start))
        throw DomainError("hourly_census: need 0 <= win_start < win_end");
    std::array<double, 24> integral{}, width{};

    int census = 0;
    std::size_t i = 0;
    while (i < log.size() && log[i].first <= win_start) census += log[i++].second;

    double t = win_start;
    while (t < win_end) {
        const double seg_end =
            (i < log.size()) ? std::min(log[i].first, win_end) : win_end;
        // Split the constant segment at whole-hour boundaries.
        double a = t;
        while (a < seg_end) {
            double b = std::min(seg_end, std::floor(a) + 1.0);
            if (!(b > a)) b = seg_end;
            const int h = static_cast<int>(std::fmod(std::floor(a), 24.0));
            integral[h] += census * (b - a);
            width[h] += b - a;
            a = b;
        }
        t = seg_end;
        while (i < log.size() && log[i].first <= t) census += log[i++].second;
    }

    std::array<double, 24> avg{};
    for (int h = 0; h < 24; ++h) avg[h] = width[h] > 0.0 ? integral[h] / width[h] : 0.0;
    return avg;
}

namespace {

using nlohmann::json;

json weibull_to_json(const WeibullParams& w) {
    return {{"shape", w.shape}, {"scale", w.scale}};
}

WeibullParams weibull_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("shape") || !j.contains("scale"))
        throw DataError("scenario: " + where + " needs 'shape' and 'scale'");
    return {j.at("shape").get<double>(), j.at("scale").get<double>()};
}

json windows_to_json(const std::vector<CapacityWindow>& ws) {
    json arr = json::array();
    for (const auto& w : ws)
        arr.push_back({{"start_hour", w.start_hour},
                       {"end_hour", w.end_hour},
                       {"day_mask", w.day_mask},
                       {"seats", w.seats}});
    return arr;
}

std::vector<CapacityWindow> windows_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw DataError("scenario: " + where + " must be an array");
    std::vector<CapacityWindow> ws;
    for (const auto& e : j) {
        CapacityWindow w;
        w.start_hour = e.at("start_hour").get<double>();
        w.end_hour = e.at("end_hour").get<double>();
        w.day_mask = static_cast<std::uint8_t>(e.at("day_mask").get<int>());
        w.seats = e.at("seats").get<int>();
        ws.push_back(w);
    }
    return ws;
}

const char* kTagNames[4] = {"W", "G", "Y", "R"};

}  // namespace

ScenarioConfig load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open scenario file " + file.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("scenario file " + file.string() + ": " + e.what());
    }

    ScenarioConfig cfg = default_scenario();
    try {
        cfg.start_day = j.at("start_day").get<int>();
        cfg.horizon_hours = j.at("horizon_hours").get<double>();
        cfg.warmup_hours = j.at("warmup_hours").get<double>();
        const auto& rates = j.at("arrival_rates");
        if (!rates.is_array() || rates.size() != 7)
            throw DataError("scenario: arrival_rates must be 7 arrays of 24 rates");
        for (int d = 0; d < 7; ++d) {
            if (!rates[d].is_array() || rates[d].size() != 24)
                throw DataError("scenario: arrival_rates must be 7 arrays of 24 rates");
            for (int h = 0; h < 24; ++h) cfg.arrival_rates.rates[d][h] = rates[d][h].get<double>();
        }
        cfg.p_deceased = j.at("p_deceased").get<double>();
        for (int t = 0; t < 4; ++t) {
            cfg.tag_weights_day[t] = j.at("tag_weights_day").at(kTagNames[t]).get<double>();
            cfg.tag_weights_night[t] = j.at("tag_weights_night").at(kTagNames[t]).get<double>();
            cfg.p_lwbs[t] = j.at("p_lwbs").at(kTagNames[t]).get<double>();
            const auto& pq = j.at("pre_queue_delay").at(kTagNames[t]);
            cfg.pre_queue_delay[t] = {pq.at(0).get<double>(), pq.at(1).get<double>()};
            for (int s : {kDay, kNight}) {
                const auto& uw =
                    j.at("unit_weights").at(kTagNames[t]).at(s == kDay ? "day" : "night");
                for (int u = 0; u < 4; ++u)
                    cfg.unit_weights[t][s][u] =
                        uw.value(to_string(static_cast<UnitId>(u)), 0.0);
            }
        }
        for (auto& row : cfg.p_removed_after_exams)
            for (auto& p : row) p = 0.0;
        for (auto [t, u] : feasible_pairs()) {
            const std::string key = std::string(to_string(t)) + "/" + to_string(u);
            cfg.p_removed_after_exams[idx(t)][idx(u)] =
                j.at("p_removed_after_exams").value(key, 0.0);
            cfg.final_wait[idx(t)][idx(u)] =
                weibull_from_json(j.at("final_wait").at(key), "final_wait " + key);
        }
        cfg.seats_mu = windows_from_json(j.at("seats").at("MU"), "seats.MU");
        cfg.seats_su = windows_from_json(j.at("seats").at("SU"), "seats.SU");
        cfg.seats_miu = windows_from_json(j.at("seats").at("MIU"), "seats.MIU");
        cfg.seats_red = windows_from_json(j.at("seats").at("RED"), "seats.RED");
        const auto& surge = j.at("surge");
        cfg.surge.enabled = surge.at("enabled").get<bool>();
        cfg.surge.threshold_hours = surge.at("threshold_hours").get<double>();
        cfg.surge.extra_seats = surge.at("extra_seats").get<int>();
        const auto& init = j.at("initial_defaults");
        cfg.initial_triage = weibull_from_json(init.at("triage"), "initial_defaults.triage");
        cfg.initial_visit = weibull_from_json(init.at("visit"), "initial_defaults.visit");
        cfg.initial_exams = weibull_from_json(init.at("exams"), "initial_defaults.exams");
        cfg.guess_window_hours = j.at("guess_window_hours").get<double>();
    } catch (const json::exception& e) {
        throw DataError("scenario file " + file.string() + ": " + e.what());
    }

    validate_scenario(cfg);
    return cfg;
}

void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& file) {
    json j;
    j["start_day"] = cfg.start_day;
    j["horizon_hours"] = cfg.horizon_hours;
    j["warmup_hours"] = cfg.warmup_hours;
    json rates = json::array();
    for (const auto& day : cfg.arrival_rates.rates) rates.push_back(day);
    j["arrival_rates"] = rates;
    j["p_deceased"] = cfg.p_deceased;
    for (int t = 0; t < 4; ++t) {
        j["tag_weights_day"][kTagNames[t]] = cfg.tag_weights_day[t];
        j["tag_weights_night"][kTagNames[t]] = cfg.tag_weights_night[t];
        j["p_lwbs"][kTagNames[t]] = cfg.p_lwbs[t];
        j["pre_queue_delay"][kTagNames[t]] = {cfg.pre_queue_delay[t].first,
                                              cfg.pre_queue_delay[t].second};
        for (int s : {kDay, kNight}) {
            json uw = json::object();
            for (int u = 0; u < 4; ++u)
                if (cfg.unit_weights[t][s][u] > 0.0)
                    uw[to_string(static_cast<UnitId>(u))] = cfg.unit_weights[t][s][u];
            j["unit_weights"][kTagNames[t]][s == kDay ? "day" : "night"] = uw;
        }
    }
    j["p_removed_after_exams"] = json::object();
    j["final_wait"] = json::object();
    for (auto [t, u] : feasible_pairs()) {
        const std::string key = std::string(to_string(t)) + "/" + to_string(u);
        if (cfg.p_removed_after_exams[idx(t)][idx(u)] > 0.0)
            j["p_removed_after_exams"][key] = cfg.p_removed_after_exams[idx(t)][idx(u)];
        j["final_wait"][key] = weibull_to_json(cfg.final_wait[idx(t)][idx(u)]);
    }
    j["seats"]["MU"] = windows_to_json(cfg.seats_mu);
    j["seats"]["SU"] = windows_to_json(cfg.seats_su);
    j["seats"]["MIU"] = windows_to_json(cfg.seats_miu);
    j["seats"]["RED"] = windows_to_json(cfg.seats_red);
    j["surge"] = {{"enabled", cfg.surge.enabled},
                  {"threshold_hours", cfg.surge.threshold_hours},
                  {"extra_seats", cfg.surge.extra_seats}};
    j["initial_defaults"] = {{"triage", weibull_to_json(cfg.initial_triage)},
                             {"visit", weibull_to_json(cfg.initial_visit)},
                             {"exams", weibull_to_json(cfg.initial_exams)}};
    j["guess_window_hours"] = cfg.guess_window_hours;

    std::ofstream out(file);
    if (!out) throw DataError("cannot write scenario file " + file.string());
    out << j.dump(2) << '\n';
}

}  // namespace edcal
