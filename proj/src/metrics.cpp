// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "edcal/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "edcal/errors.hpp"
#include "edcal/replication.hpp"

namespace edcal {

double StepFunction::value_at(double t) const {
    // First breakpoint strictly greater than t; the value in force is the
    // one at the breakpoint before it.
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.begin()) return 0.0;
    return y[static_cast<std::size_t>(it - x.begin()) - 1];
}

StepFunction ecdf(std::span<const double> samples) {
    if (samples.empty()) throw DomainError("ecdf: empty sample");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    StepFunction f;
    const double k = static_cast<double>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i + 1 < s.size() && s[i + 1] == s[i]) continue;  // ties stack
        f.x.push_back(s[i]);
        f.y.push_back(static_cast<double>(i + 1) / k);
    }
    return f;
}

StepFunction mean_ecdf(std::span<const StepFunction> fs) {
    if (fs.empty()) throw DomainError("mean_ecdf: no input functions");
    std::vector<double> grid;
    for (const auto& f : fs) grid.insert(grid.end(), f.x.begin(), f.x.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    StepFunction out;
    out.x = std::move(grid);
    out.y.resize(out.x.size());
    const double inv_n = 1.0 / static_cast<double>(fs.size());
    // One forward cursor per input keeps the merge linear overall.
    std::vector<std::size_t> cursor(fs.size(), 0);
    for (std::size_t j = 0; j < out.x.size(); ++j) {
        const double t = out.x[j];
        double sum = 0.0;
        for (std::size_t k = 0; k < fs.size(); ++k) {
            const auto& f = fs[k];
            auto& c = cursor[k];
            while (c < f.x.size() && f.x[c] <= t) ++c;
            sum += (c == 0) ? 0.0 : f.y[c - 1];
        }
        out.y[j] = sum * inv_n;
    }
    return out;
}

double ecdf_sq_integral(const StepFunction& f1, const StepFunction& f2) {
    std::vector<double> grid;
    grid.reserve(f1.x.size() + f2.x.size());
    grid.insert(grid.end(), f1.x.begin(), f1.x.end());
    grid.insert(grid.end(), f2.x.begin(), f2.x.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double total = 0.0;
    for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
        const double d = f1.value_at(grid[j]) - f2.value_at(grid[j]);
        total += d * d * (grid[j + 1] - grid[j]);
    }
    return total;
}

double objective(const std::map<CellKey, StepFunction>& sim,
                 const std::map<CellKey, StepFunction>& real) {
    if (sim.size() != real.size())
        throw DomainError("objective: cell sets differ in size");
    double total = 0.0;
    for (const auto& [key, f_sim] : sim) {
        const auto it = real.find(key);
        if (it == real.end())
            throw DomainError("objective: cell " + key.label() + " missing on the real side");
        total += ecdf_sq_integral(f_sim, it->second);
    }
    return total;
}

KpiStats sample_stats(std::span<const double> xs) {
    if (xs.empty()) throw DomainError("sample_stats: empty sample");
    KpiStats st;
    st.count = static_cast<std::int64_t>(xs.size());
    double sum = 0.0;
    for (double v : xs) sum += v;
    st.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double v : xs) ss += (v - st.mean) * (v - st.mean);
        st.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return st;
}

namespace {

double relative_gap(double sim, double real, double tol, const char* what) {
    if (real == 0.0) throw DomainError(std::string(what) + ": zero reference value");
    if (!(tol > 0.0)) throw DomainError(std::string(what) + ": tolerance must be positive");
    return std::abs((sim - real) / real) - tol;
}

}  // namespace

double constraint_g(double mu_sim, double mu_real, double tol) {
    return relative_gap(mu_sim, mu_real, tol, "constraint_g");
}

double constraint_h(double sd_sim, double sd_real, double tol) {
    return relative_gap(sd_sim, sd_real, tol, "constraint_h");
}

Tolerances Tolerances::defaults() {
    Tolerances t;
    for (int c = 0; c < 4; ++c)
        for (int u = 0; u < 4; ++u)
            for (int i = 0; i < 2; ++i) {
                const bool wide = (c == static_cast<int>(TriageTag::Green) ||
                                   c == static_cast<int>(TriageTag::Yellow)) &&
                                  (u == static_cast<int>(UnitId::MU) ||
                                   u == static_cast<int>(UnitId::SU));
                t.tol_mu[c][u][i] = wide ? 0.35 : 0.2;
                t.tol_sigma[c][u][i] = wide ? 0.35 : 0.2;
            }
    return t;
}

namespace {

// Mean ECDF and mean per-group moments of one cell across sample groups;
// groups with an empty cell are skipped.
struct CellAggregate {
    int groups = 0;
    StepFunction f;
    double mean = 0.0;
    double std = 0.0;
};

CellAggregate aggregate_cell(std::span<const KpiSampleSet> sets, TriageTag t, UnitId u,
                             Metric m) {
    CellAggregate agg;
    std::vector<StepFunction> fs;
    double mean_sum = 0.0, std_sum = 0.0;
    for (const auto& set : sets) {
        const auto& xs = set.cell(t, u, m);
        if (xs.empty()) continue;
        fs.push_back(ecdf(xs));
        const KpiStats st = sample_stats(xs);
        mean_sum += st.mean;
        std_sum += st.std;
    }
    agg.groups = static_cast<int>(fs.size());
    if (agg.groups > 0) {
        agg.f = mean_ecdf(fs);
        agg.mean = mean_sum / agg.groups;
        agg.std = std_sum / agg.groups;
    }
    return agg;
}

}  // namespace

EvalResult evaluate_point(const ParamVector& params, const ScenarioConfig& cfg,
                          std::span<const KpiSampleSet> real_sets, int n_reps,
                          std::uint64_t base_seed, int jobs, const Tolerances& tol) {
    if (real_sets.empty()) throw DomainError("evaluate_point: no reference sample sets");
    const auto t_begin = std::chrono::steady_clock::now();

    EvalResult res;
    const auto reps = run_replications(cfg, params, n_reps, base_seed, jobs);
    std::vector<KpiSampleSet> sim_sets;
    sim_sets.reserve(reps.size());
    for (const auto& r : reps) sim_sets.push_back(r.kpis);

    res.ok = true;
    for (auto [t, u] : decision_pairs()) {
        for (Metric m : {Metric::DOT, Metric::DIT}) {
            const CellKey key{t, u, m};
            const CellAggregate real = aggregate_cell(real_sets, t, u, m);
            if (real.groups == 0)
                throw DataError("evaluate_point: reference cell " + key.label() + " is empty");
            const CellAggregate sim = aggregate_cell(sim_sets, t, u, m);
            res.cells.push_back(key);
            if (sim.groups == 0) {
                res.ok = false;
                if (res.failure.empty())
                    res.failure = "simulated cell " + key.label() + " empty in every replication";
                res.g.push_back(EvalResult::kDropped);
                res.h.push_back(EvalResult::kDropped);
                continue;
            }
            res.f += ecdf_sq_integral(sim.f, real.f);
            const int c = static_cast<int>(t), un = static_cast<int>(u),
                      mi = static_cast<int>(m);
            if (real.mean == 0.0) {
                res.g.push_back(EvalResult::kDropped);
                res.warnings.push_back("cell " + key.label() +
                                       ": zero reference mean, g dropped");
            } else {
                res.g.push_back(constraint_g(sim.mean, real.mean, tol.tol_mu[c][un][mi]));
            }
            if (real.std == 0.0) {
                res.h.push_back(EvalResult::kDropped);
                res.warnings.push_back("cell " + key.label() +
                                       ": zero reference std, h dropped");
            } else {
                res.h.push_back(constraint_h(sim.std, real.std, tol.tol_sigma[c][un][mi]));
            }
        }
    }

    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return res;
}

}  // namespace edcal
