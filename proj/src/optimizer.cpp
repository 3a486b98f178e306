// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "edcal/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <list>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <utility>

#include <nlohmann/json.hpp>

#include "edcal/errors.hpp"
#include "edcal/rng.hpp"

namespace edcal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact decimal reconstruction: for granularities of the form 1/N the
// value k*delta is computed as k/N, which is correctly rounded and agrees
// bit for bit with parsed decimal literals.
double lattice_value(std::int64_t k, double delta) {
    const double inv = 1.0 / delta;
    const double n = std::round(inv);
    if (n > 0.0 && std::abs(inv - n) < 1e-6 * n) return static_cast<double>(k) / n;
    return static_cast<double>(k) * delta;
}

}  // namespace

std::vector<std::int64_t> to_lattice(std::span<const double> v, std::span<const double> delta,
                                     int* off_lattice_warnings) {
    if (v.size() != delta.size()) throw DomainError("to_lattice: size mismatch");
    std::vector<std::int64_t> k(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(delta[i] > 0.0)) throw DomainError("to_lattice: granularity must be positive");
        k[i] = std::llround(v[i] / delta[i]);
        if (off_lattice_warnings && std::abs(v[i] - lattice_value(k[i], delta[i])) > 1e-9)
            ++*off_lattice_warnings;
    }
    return k;
}

std::vector<double> from_lattice(std::span<const std::int64_t> k,
                                 std::span<const double> delta) {
    if (k.size() != delta.size()) throw DomainError("from_lattice: size mismatch");
    std::vector<double> v(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) v[i] = lattice_value(k[i], delta[i]);
    return v;
}

double penalty(double f, std::span<const double> cons, double eps) {
    if (!(eps > 0.0)) throw DomainError("penalty: eps must be positive");
    double sum = 0.0;
    for (double c : cons) sum += std::max(0.0, c);
    return f + sum / eps;
}

void write_history_csv(const SolveReport& rep, std::ostream& os) {
    os << "eval,f,max_violation,accepted,eps\n";
    char buf[160];
    for (const auto& r : rep.history) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d,%.17g\n", r.eval_index, r.f,
                      r.max_violation, r.accepted ? 1 : 0, r.eps);
        os << buf;
    }
}

void write_summary_json(const SolveReport& rep, std::ostream& os) {
    nlohmann::json j;
    j["best_point"] = rep.best_point;
    j["best_f"] = rep.best_f;
    j["best_max_violation"] = rep.best_max_violation;
    j["evaluations_used"] = rep.evaluations_used;
    j["feasible"] = rep.feasible;
    j["certified_stationary"] = rep.certified_stationary;
    j["history_rows"] = rep.history.size();
    os << j.dump(2) << '\n';
}

namespace {

using Key = std::vector<std::int64_t>;

struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ k.size();
        for (std::int64_t x : k)
            h = RngStream::mix64(h ^ (static_cast<std::uint64_t>(x) * 0xd1b54a32d192ed03ULL));
        return static_cast<std::size_t>(h);
    }
};

class LruCache {
  public:
    explicit LruCache(std::size_t capacity) : capacity_(std::max<std::size_t>(1, capacity)) {}

    const Evaluation* find(const Key& k) {
        const auto it = map_.find(k);
        if (it == map_.end()) return nullptr;
        order_.splice(order_.begin(), order_, it->second);
        return &it->second->second;
    }

    void insert(Key k, Evaluation e) {
        order_.emplace_front(std::move(k), std::move(e));
        map_[order_.front().first] = order_.begin();
        if (map_.size() > capacity_) {
            map_.erase(order_.back().first);
            order_.pop_back();
        }
    }

  private:
    std::size_t capacity_;
    std::list<std::pair<Key, Evaluation>> order_;
    std::unordered_map<Key, std::list<std::pair<Key, Evaluation>>::iterator, KeyHash> map_;
};

double max_violation_of(const Evaluation& e) {
    if (!e.ok) return kInf;
    double m = 0.0;
    for (double c : e.cons) m = std::max(m, c);
    return m;
}

double penalized(const Evaluation& e, double eps) {
    return e.ok ? penalty(e.f, e.cons, eps) : kInf;
}

}  // namespace

SolveReport solve(const Evaluator& evaluate, std::span<const double> start,
                  std::span<const double> lower, std::span<const double> upper,
                  std::span<const double> delta, const SolveOptions& opts) {
    const std::size_t n = start.size();
    if (n == 0) throw DomainError("solve: empty start point");
    if (lower.size() != n || upper.size() != n || delta.size() != n)
        throw DomainError("solve: bounds/granularity size mismatch");
    if (opts.budget < 1) throw DomainError("solve: budget must be >= 1");
    if (!(opts.initial_eps > 0.0) || !(opts.eps_shrink > 1.0) || opts.initial_step < 1)
        throw DomainError("solve: bad options");

    // Integer box. Granularities divide the usable range exactly or the
    // trial points simply stay strictly inside.
    std::vector<std::int64_t> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(delta[i] > 0.0)) throw DomainError("solve: granularity must be positive");
        if (!(lower[i] < upper[i])) throw DomainError("solve: need lower < upper");
        lo[i] = std::llround(std::ceil(lower[i] / delta[i] - 1e-9));
        hi[i] = std::llround(std::floor(upper[i] / delta[i] + 1e-9));
        if (lo[i] > hi[i]) throw DomainError("solve: no lattice point inside the bounds");
    }

    SolveReport rep;
    LruCache cache(opts.cache_capacity);
    double eps = opts.initial_eps;

    Key inc = to_lattice(start, delta);
    for (std::size_t i = 0; i < n; ++i) inc[i] = std::clamp(inc[i], lo[i], hi[i]);

    std::optional<Key> best_feas_key;
    Evaluation best_feas;

    // Evaluates (or recalls) one lattice point; nullopt once the budget is
    // spent. The bool reports whether the evaluator actually ran.
    auto probe = [&](const Key& k) -> std::optional<std::pair<Evaluation, bool>> {
        if (const Evaluation* hit = cache.find(k)) return std::pair{*hit, false};
        if (rep.evaluations_used >= opts.budget) return std::nullopt;
        Evaluation e = evaluate(from_lattice(k, delta));
        ++rep.evaluations_used;
        const double viol = max_violation_of(e);
        rep.history.push_back(
            HistoryRow{rep.evaluations_used, e.ok ? e.f : kInf, viol, false, eps});
        if (e.ok && viol <= opts.feasibility_tol &&
            (!best_feas_key || e.f < best_feas.f)) {
            best_feas_key = k;
            best_feas = e;
        }
        cache.insert(k, e);
        return std::pair{std::move(e), true};
    };

    auto first = probe(inc);
    Evaluation einc = std::move(first->first);
    rep.history.back().accepted = true;
    double pen_inc = penalized(einc, eps);

    std::vector<std::int64_t> step(2 * n, opts.initial_step);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    bool budget_out = rep.evaluations_used >= opts.budget;
    bool stopped_stationary = false;

    for (std::uint64_t pass = 0; !budget_out && !stopped_stationary; ++pass) {
        const bool unit_steps_entering =
            std::all_of(step.begin(), step.end(), [](std::int64_t s) { return s == 1; });
        bool any_accept = false;

        RngStream shuffle_rng(opts.seed, pass);
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(order[i], order[shuffle_rng.next_u64() % (i + 1)]);

        for (std::size_t oi = 0; oi < n && !budget_out; ++oi) {
            const std::size_t i = order[oi];
            for (int sign : {+1, -1}) {
                const std::size_t d = 2 * i + (sign < 0 ? 1 : 0);
                std::int64_t s = step[d];
                bool improved = false;

                Key trial = inc;
                trial[i] = std::clamp(inc[i] + sign * s, lo[i], hi[i]);
                if (trial[i] != inc[i]) {
                    auto got = probe(trial);
                    if (!got) {
                        budget_out = true;
                        break;
                    }
                    if (penalized(got->first, eps) < pen_inc) {
                        inc = trial;
                        einc = std::move(got->first);
                        pen_inc = penalized(einc, eps);
                        if (got->second) rep.history.back().accepted = true;
                        improved = true;
                        any_accept = true;
                        // Ride the successful direction with doubling steps.
                        while (true) {
                            s = std::min<std::int64_t>(s * 2, opts.step_cap);
                            Key next = inc;
                            next[i] = std::clamp(inc[i] + sign * s, lo[i], hi[i]);
                            if (next[i] == inc[i]) break;
                            auto more = probe(next);
                            if (!more) {
                                budget_out = true;
                                break;
                            }
                            if (penalized(more->first, eps) < pen_inc) {
                                inc = next;
                                einc = std::move(more->first);
                                pen_inc = penalized(einc, eps);
                                if (more->second) rep.history.back().accepted = true;
                            } else {
                                break;
                            }
                        }
                        step[d] = s;
                    }
                }
                if (!improved) step[d] = std::max<std::int64_t>(1, step[d] / 2);
                if (budget_out || improved) break;  // skip '-' after a '+' success
            }
        }

        if (budget_out || any_accept || !unit_steps_entering) continue;

        // Lattice-stationary for the current eps: all 2n unit neighbours
        // were probed (or lie outside the box) without improvement.
        if (max_violation_of(einc) <= opts.feasibility_tol) {
            stopped_stationary = true;
        } else {
            eps /= opts.eps_shrink;
            if (eps < opts.eps_min) {
                stopped_stationary = true;
            } else {
                // Steps stay at 1: the doubling line search regrows any
                // direction the stiffer penalty re-opens, so the next
                // stationarity pass costs ~2n evaluations, not a fresh
                // coarse-to-fine sweep.
                pen_inc = penalized(einc, eps);
            }
        }
    }

    // Prefer the incumbent; fall back to the best feasible point seen if
    // the incumbent ends up infeasible.
    const bool inc_feasible = einc.ok && max_violation_of(einc) <= opts.feasibility_tol;
    if (!inc_feasible && best_feas_key) {
        rep.best_point = from_lattice(*best_feas_key, delta);
        rep.best_f = best_feas.f;
        rep.best_max_violation = std::max(0.0, max_violation_of(best_feas));
        rep.feasible = true;
        rep.certified_stationary = false;  // certificate described the incumbent
    } else {
        rep.best_point = from_lattice(inc, delta);
        rep.best_f = einc.ok ? einc.f : kInf;
        rep.best_max_violation = einc.ok ? std::max(0.0, max_violation_of(einc)) : kInf;
        rep.feasible = inc_feasible;
        rep.certified_stationary = stopped_stationary;
    }
    return rep;
}

}  // namespace edcal
