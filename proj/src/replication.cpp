// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "edcal/replication.hpp"

#include <atomic>
#include <thread>

#include "edcal/distributions.hpp"
#include "edcal/errors.hpp"

namespace edcal {

namespace {

int idx(TriageTag t) { return static_cast<int>(t); }
int idx(UnitId u) { return static_cast<int>(u); }

// State of one replication. Patients are engine entities; each stage
// schedules the next one, and every random draw comes from the patient's
// private stream in a fixed trajectory order.
struct Run {
    const ScenarioConfig& cfg;
    const ParamVector& params;
    Engine eng;
    Resource mu, su, miu, red;
    std::vector<RngStream> prng;
    std::vector<PatientRecord> recs;
    std::vector<std::pair<double, int>> census[4][4];

    Run(const ScenarioConfig& c, const ParamVector& p, int start_day)
        : cfg(c),
          params(p),
          mu(eng, "MU", c.seats_mu, start_day),
          su(eng, "SU", c.seats_su, start_day),
          miu(eng, "MIU", c.seats_miu, start_day),
          red(eng, "RED", c.seats_red, start_day) {
        if (c.surge.enabled) {
            mu.set_surge(c.surge.threshold_hours, c.surge.extra_seats);
            su.set_surge(c.surge.threshold_hours, c.surge.extra_seats);
        }
    }

    Resource& resource_for(TriageTag t, UnitId u) {
        if (t == TriageTag::Red) return red;  // dedicated pool, all red units
        switch (u) {
            case UnitId::MU: return mu;
            case UnitId::SU: return su;
            case UnitId::MIU: return miu;
            case UnitId::RA: break;
        }
        throw EngineBug("non-red entity routed to RA");
    }

    void mark_census(const PatientRecord& r, double t, int delta) {
        census[idx(*r.tag)][idx(*r.unit)].emplace_back(t, delta);
    }

    void depart(std::size_t i, Outcome o) {
        recs[i].outcome = o;
        eng.trace(TraceKind::Depart, recs[i].id, "", static_cast<double>(static_cast<int>(o)));
    }

    void start(std::size_t i) {
        auto& r = recs[i];
        auto& g = prng[i];
        eng.trace(TraceKind::Create, r.id, "", 0.0);
        if (g.bernoulli(cfg.p_deceased)) {
            depart(i, Outcome::Deceased);
            return;
        }
        const TagUnit tu = assign_tag_and_unit(eng.now(), cfg, g);
        r.tag = tu.tag;
        r.unit = tu.unit;
        r.t0 = eng.now();
        const double d = triage_duration(tu.tag, tu.unit, params, g);
        eng.at(eng.now() + d, [this, i] { after_triage(i); });
    }

    void after_triage(std::size_t i) {
        auto& r = recs[i];
        auto& g = prng[i];
        if (g.bernoulli(cfg.p_lwbs[idx(*r.tag)])) {
            depart(i, Outcome::Lwbs);
            return;
        }
        const auto [lo, hi] = cfg.pre_queue_delay[idx(*r.tag)];
        const double d = uniform_sample(lo, hi, g);
        eng.at(eng.now() + d, [this, i] { enter_queue(i); });
    }

    void enter_queue(std::size_t i) {
        auto& r = recs[i];
        resource_for(*r.tag, *r.unit)
            .seize(r.id, priority_of(*r.tag), [this, i](double t) { on_grant(i, t); });
    }

    void on_grant(std::size_t i, double t) {
        auto& r = recs[i];
        r.t2 = t;
        mark_census(r, t, +1);
        const double d = visit_duration(*r.tag, *r.unit, params, prng[i]);
        eng.at(t + d, [this, i] { end_visit(i); });
    }

    void end_visit(std::size_t i) {
        auto& r = recs[i];
        resource_for(*r.tag, *r.unit).release(r.id);
        r.t3 = eng.now();
        const double d = exams_duration(*r.tag, *r.unit, params, prng[i]);
        eng.at(eng.now() + d, [this, i] { after_exams(i); });
    }

    void after_exams(std::size_t i) {
        auto& r = recs[i];
        auto& g = prng[i];
        if (g.bernoulli(cfg.p_removed_after_exams[idx(*r.tag)][idx(*r.unit)])) {
            mark_census(r, eng.now(), -1);
            depart(i, Outcome::Transferred);
            return;
        }
        const double d = weibull_sample(cfg.final_wait[idx(*r.tag)][idx(*r.unit)], g);
        eng.at(eng.now() + d, [this, i] { discharge(i); });
    }

    void discharge(std::size_t i) {
        auto& r = recs[i];
        r.t6 = eng.now();
        mark_census(r, eng.now(), -1);
        depart(i, Outcome::Discharged);
    }
};

}  // namespace

ReplicationOutput run_replication(const ScenarioConfig& cfg, const ParamVector& params,
                                  int rep_index, std::uint64_t base_seed, TraceLog* trace) {
    validate_scenario(cfg);
    if (rep_index < 0) throw DomainError("run_replication: negative rep_index");

    RngStream rep_root(base_seed, static_cast<std::uint64_t>(rep_index));
    RngStream arrivals_rng = rep_root.substream(0);
    const std::vector<double> arrivals =
        nhpp_arrivals(cfg.arrival_rates, cfg.start_day, cfg.horizon_hours, arrivals_rng);

    Run run(cfg, params, cfg.start_day);
    run.eng.set_trace(trace);
    run.recs.resize(arrivals.size());
    run.prng.reserve(arrivals.size());
    for (std::size_t i = 0; i < arrivals.size(); ++i) {
        run.recs[i].id = static_cast<std::int64_t>(i);
        run.prng.push_back(rep_root.substream(i + 1));
        run.eng.at(arrivals[i], [&run, i] { run.start(i); });
    }
    run.mu.schedule_capacity_events(cfg.horizon_hours);
    run.su.schedule_capacity_events(cfg.horizon_hours);
    run.miu.schedule_capacity_events(cfg.horizon_hours);
    run.red.schedule_capacity_events(cfg.horizon_hours);
    run.eng.run_until(cfg.horizon_hours);

    ReplicationOutput out;
    std::vector<PatientRecord> in_window;
    in_window.reserve(run.recs.size());
    for (const auto& r : run.recs) {
        if (r.t0 && *r.t0 >= cfg.warmup_hours) {
            in_window.push_back(r);
            if (r.outcome != Outcome::Deceased && r.outcome != Outcome::Lwbs)
                ++out.patient_counts[idx(*r.tag)][idx(*r.unit)];
        }
    }
    out.kpis = extract_kpis(in_window);
    for (int t = 0; t < 4; ++t)
        for (int u = 0; u < 4; ++u) out.census_log[t][u] = std::move(run.census[t][u]);
    out.records = std::move(run.recs);
    return out;
}

std::vector<ReplicationOutput> run_replications(const ScenarioConfig& cfg,
                                                const ParamVector& params, int n_reps,
                                                std::uint64_t base_seed, int jobs) {
    if (n_reps < 1) throw DomainError("run_replications: need n_reps >= 1");
    std::vector<ReplicationOutput> out(static_cast<std::size_t>(n_reps));
    if (jobs <= 1) {
        for (int r = 0; r < n_reps; ++r) out[r] = run_replication(cfg, params, r, base_seed);
        return out;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next.fetch_add(1); r < n_reps; r = next.fetch_add(1))
            out[r] = run_replication(cfg, params, r, base_seed);
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min(jobs, n_reps);
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace edcal
