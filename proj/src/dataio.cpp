// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "edcal/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "edcal/errors.hpp"
#include "edcal/metrics.hpp"
#include "edcal/replication.hpp"

namespace edcal {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

[[noreturn]] void fail_line(const std::filesystem::path& file, int line, const std::string& what) {
    throw DataError(file.string() + ":" + std::to_string(line) + ": " + what);
}

double parse_time(const std::string& s, const std::filesystem::path& file, int line,
                  const char* field) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v) || v < 0.0)
        fail_line(file, line, std::string(field) + ": bad time '" + s + "'");
    return v;
}

std::int64_t parse_id(const std::string& s, const std::filesystem::path& file, int line) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        fail_line(file, line, "bad id '" + s + "'");
    return v;
}

void put_time(std::string& row, const std::optional<double>& t) {
    row.push_back(',');
    if (t) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", *t);
        row += buf;
    }
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open dataset " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(file.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,tag,unit,t0,t2,t5,t6,outcome")
        throw DataError(file.string() + ": unexpected header '" + line + "'");

    Dataset ds;
    std::vector<std::int64_t> infeasible;
    double tmax = 0.0;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv(line);
        if (f.size() != 8) fail_line(file, lineno, "expected 8 fields, got " + std::to_string(f.size()));

        PatientRecord rec;
        rec.id = parse_id(f[0], file, lineno);
        try {
            rec.tag = tag_from_string(f[1]);
            rec.unit = unit_from_string(f[2]);
            rec.outcome = outcome_from_string(f[7]);
        } catch (const DataError& e) {
            fail_line(file, lineno, e.what());
        }
        if (f[3].empty()) fail_line(file, lineno, "t0 is required");
        rec.t0 = parse_time(f[3], file, lineno, "t0");
        if (!f[4].empty()) rec.t2 = parse_time(f[4], file, lineno, "t2");
        if (!f[5].empty()) rec.t5 = parse_time(f[5], file, lineno, "t5");
        if (!f[6].empty()) rec.t6 = parse_time(f[6], file, lineno, "t6");

        double prev = *rec.t0;
        for (const auto* t : {&rec.t2, &rec.t5, &rec.t6}) {
            if (!t->has_value()) continue;
            if (**t < prev) fail_line(file, lineno, "timestamps out of order");
            prev = **t;
        }
        if (rec.outcome == Outcome::Discharged && (!rec.t2 || !rec.t6))
            fail_line(file, lineno, "discharged record needs t2 and t6");
        if (!feasible_assignment(*rec.tag, *rec.unit)) infeasible.push_back(rec.id);
        tmax = std::max(tmax, prev);
        ds.records.push_back(rec);
    }
    if (!infeasible.empty()) {
        std::string msg = file.string() + ": infeasible tag/unit assignment for ids";
        for (auto id : infeasible) msg += " " + std::to_string(id);
        throw DataError(msg);
    }
    ds.period_days = std::floor(tmax / 24.0) + 1.0;
    return ds;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write dataset " + file.string());
    out << "id,tag,unit,t0,t2,t5,t6,outcome\n";
    std::string row;
    for (const auto& rec : ds.records) {
        if (!rec.tag || !rec.unit || !rec.t0)
            throw DataError("record " + std::to_string(rec.id) + ": tag, unit and t0 are required");
        row = std::to_string(rec.id);
        row += ',';
        row += to_string(*rec.tag);
        row += ',';
        row += to_string(*rec.unit);
        put_time(row, rec.t0);
        put_time(row, rec.t2);
        put_time(row, rec.t5);
        put_time(row, rec.t6);
        row += ',';
        row += to_string(rec.outcome);
        row += '\n';
        out << row;
    }
    if (!out) throw DataError("write failed for " + file.string());
}

std::vector<ExamRequest> load_annotations(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open annotations " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(file.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,request_time")
        throw DataError(file.string() + ": unexpected header '" + line + "'");
    std::vector<ExamRequest> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv(line);
        if (f.size() != 2) fail_line(file, lineno, "expected 2 fields, got " + std::to_string(f.size()));
        ExamRequest r;
        r.id = parse_id(f[0], file, lineno);
        r.request_time = parse_time(f[1], file, lineno, "request_time");
        out.push_back(r);
    }
    return out;
}

void write_annotations(std::span<const ExamRequest> reqs, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write annotations " + file.string());
    out << "id,request_time\n";
    char buf[64];
    for (const auto& r : reqs) {
        std::snprintf(buf, sizeof buf, "%lld,%.4f\n", static_cast<long long>(r.id),
                      r.request_time);
        out << buf;
    }
    if (!out) throw DataError("write failed for " + file.string());
}

SyntheticData gen_synthetic(const ParamVector& true_params, const ScenarioConfig& cfg,
                            std::uint64_t seed, int reps) {
    if (reps < 1) throw DomainError("gen_synthetic: reps must be >= 1");
    auto runs = run_replications(cfg, true_params, reps, seed);

    const double w = cfg.warmup_hours;
    SyntheticData out;
    out.dataset.start_day =
        (cfg.start_day + static_cast<int>(std::floor(w / 24.0))) % 7;
    out.dataset.period_days = (cfg.horizon_hours - w) / 24.0;

    std::int64_t next_id = 0;
    for (const auto& run : runs) {
        for (const auto& rec : run.records) {
            if (!rec.tag || !rec.t0 || *rec.t0 < w) continue;  // warm-up or deceased
            PatientRecord obs;
            obs.id = next_id++;
            obs.tag = rec.tag;
            obs.unit = rec.unit;
            obs.t0 = *rec.t0 - w;
            if (rec.t2) obs.t2 = *rec.t2 - w;
            if (rec.t6) obs.t6 = *rec.t6 - w;
            obs.outcome = rec.outcome;
            if (rec.t3) out.annotations.push_back({obs.id, *rec.t3 - w});
            out.dataset.records.push_back(obs);
        }
    }
    return out;
}

WeibullParams fit_weibull(std::span<const double> durations, const WeibullParams& lo,
                          const WeibullParams& hi) {
    if (durations.size() < 2)
        throw DomainError("fit_weibull: need at least two durations");
    for (double v : durations)
        if (!std::isfinite(v) || v <= 0.0)
            throw DomainError("fit_weibull: durations must be positive");
    KpiStats st = sample_stats(durations);
    if (!(st.std > 0.0))
        throw DomainError("fit_weibull: need two distinct durations");

    // Gamma(1+2/a)/Gamma(1+1/a)^2 is strictly decreasing in the shape a,
    // so the squared-cv match has a unique root when bracketed.
    const double target = 1.0 + (st.std / st.mean) * (st.std / st.mean);
    auto ratio = [](double a) {
        double g1 = gamma_fn(1.0 + 1.0 / a);
        return gamma_fn(1.0 + 2.0 / a) / (g1 * g1);
    };
    double a_lo = 0.05, a_hi = 1000.0;
    double shape;
    if (ratio(a_lo) <= target) {
        shape = a_lo;
    } else if (ratio(a_hi) >= target) {
        shape = a_hi;
    } else {
        for (int i = 0; i < 100; ++i) {
            double mid = 0.5 * (a_lo + a_hi);
            (ratio(mid) > target ? a_lo : a_hi) = mid;
        }
        shape = 0.5 * (a_lo + a_hi);
    }
    double scale = st.mean / gamma_fn(1.0 + 1.0 / shape);

    shape = std::clamp(shape, lo.shape, hi.shape);
    scale = std::clamp(scale, lo.scale, hi.scale);
    shape = static_cast<double>(std::llround(shape / 1e-3)) / 1000.0;
    scale = static_cast<double>(std::llround(scale / 1e-4)) / 10000.0;
    shape = std::clamp(shape, lo.shape, hi.shape);
    scale = std::clamp(scale, lo.scale, hi.scale);
    return {shape, scale};
}

GuessResult initial_guess(const Dataset& ds, std::span<const ExamRequest> annotations,
                          const ScenarioConfig& cfg) {
    if (!(cfg.guess_window_hours > 0.0))
        throw ConfigError("initial_guess: guess_window_hours must be positive");

    std::unordered_map<std::int64_t, std::vector<double>> requests;
    for (const auto& r : annotations) requests[r.id].push_back(r.request_time);

    const auto& pairs = visit_pairs();
    std::array<std::vector<double>, 8> visit_gaps;  // t2 -> latest request
    std::array<std::vector<double>, 8> exam_gaps;   // latest request -> exit, net of final wait
    for (const auto& rec : ds.records) {
        if (!rec.tag || !rec.unit || !rec.t2) continue;
        int idx = visit_index(*rec.tag, *rec.unit);
        if (idx < 0) continue;  // resuscitation pathway is not calibrated
        auto it = requests.find(rec.id);
        if (it == requests.end()) continue;
        double latest = -1.0;
        for (double q : it->second)
            if (q >= *rec.t2 && q <= *rec.t2 + cfg.guess_window_hours) latest = std::max(latest, q);
        if (latest < 0.0) continue;
        double gap = latest - *rec.t2;
        if (gap > 0.0) visit_gaps[idx].push_back(gap);
        if (rec.outcome == Outcome::Discharged) {
            const double* exit_t = rec.t5 ? &*rec.t5 : (rec.t6 ? &*rec.t6 : nullptr);
            if (exit_t) {
                double fw = weibull_mean_std(
                                cfg.final_wait[static_cast<int>(*rec.tag)][static_cast<int>(*rec.unit)])
                                .first;
                double rest = *exit_t - latest - fw;
                if (rest > 0.0) exam_gaps[idx].push_back(rest);
            }
        }
    }

    GuessResult out;
    for (auto& t : out.params.triage) t = cfg.initial_triage;

    ParamBounds pb = default_bounds();
    auto fit_or_default = [&](const std::vector<double>& xs, int flat_shape,
                              const WeibullParams& fallback, const char* activity,
                              const CellKey& cell) -> WeibullParams {
        WeibullParams blo{pb.lower[flat_shape], pb.lower[flat_shape + 1]};
        WeibullParams bhi{pb.upper[flat_shape], pb.upper[flat_shape + 1]};
        try {
            return fit_weibull(xs, blo, bhi);
        } catch (const DomainError&) {
            std::string name = std::string(activity) + " " + to_string(cell.tag) + "/" +
                               to_string(cell.unit);
            out.fallback_cells.push_back(name);
            out.warnings.push_back(name + ": " + std::to_string(xs.size()) +
                                   " usable samples, using configured default");
            return fallback;
        }
    };
    for (int i = 0; i < 8; ++i) {
        CellKey cell{pairs[i].first, pairs[i].second, Metric::DOT};
        out.params.visit[i] =
            fit_or_default(visit_gaps[i], 14 + 2 * i, cfg.initial_visit, "visit", cell);
        out.params.exams[i] =
            fit_or_default(exam_gaps[i], 30 + 2 * i, cfg.initial_exams, "exams", cell);
    }
    return out;
}

}  // namespace edcal
