// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
//
// Trace-replay audits. Each check re-derives the invariant from the raw
// event log and the schedule description alone, on purpose not calling
// the library's own bookkeeping, so a bug in the engine cannot hide in
// the auditor.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "edcal/simcore.hpp"

namespace edcal::test {

struct AuditResult {
    bool ok = true;
    std::string detail;
};

inline AuditResult audit_fail(std::string msg) { return {false, std::move(msg)}; }

// Independent seat-count lookup (first matching window wins, no match
// means closed). Deliberately re-implemented.
inline int seats_open(const std::vector<CapacityWindow>& schedule, int start_day, double t) {
    int day = (start_day + static_cast<int>(std::floor(t / 24.0))) % 7;
    double hour = t - std::floor(t / 24.0) * 24.0;
    for (const auto& w : schedule) {
        if (((w.day_mask >> day) & 1) && hour >= w.start_hour && hour < w.end_hour)
            return w.seats;
    }
    return 0;
}

// Every grant instant must leave the holder count within the seats open
// at that instant (no surge). Decreases never evict, so between grants
// the count may legally exceed a shrunk schedule.
inline AuditResult audit_capacity_safety(
    const TraceLog& log, const std::map<std::string, std::vector<CapacityWindow>>& schedules,
    int start_day) {
    std::map<std::string, int> holders;
    for (std::size_t i = 0; i < log.rows.size(); ++i) {
        const TraceRow& row = log.rows[i];
        if (row.kind == TraceKind::Grant) {
            auto sched = schedules.find(row.resource);
            if (sched == schedules.end())
                return audit_fail("grant on unknown resource " + row.resource);
            int cap = seats_open(sched->second, start_day, row.time);
            int n = ++holders[row.resource];
            if (n > cap)
                return audit_fail(row.resource + ": " + std::to_string(n) + " holders vs " +
                                  std::to_string(cap) + " seats at t=" + std::to_string(row.time));
        } else if (row.kind == TraceKind::Release) {
            if (--holders[row.resource] < 0)
                return audit_fail(row.resource + ": release without grant at t=" +
                                  std::to_string(row.time));
        }
    }
    return {};
}

// Each grant must pick, among the entities currently waiting on that
// resource, the one with the highest priority, breaking ties by earliest
// enqueue time and then by trace order.
inline AuditResult audit_queue_discipline(const TraceLog& log) {
    struct Waiting {
        int priority;
        double since;
        std::size_t order;
    };
    std::map<std::string, std::map<std::int64_t, Waiting>> queues;
    for (std::size_t i = 0; i < log.rows.size(); ++i) {
        const TraceRow& row = log.rows[i];
        if (row.kind == TraceKind::Enqueue) {
            queues[row.resource][row.entity] =
                Waiting{static_cast<int>(row.value), row.time, i};
        } else if (row.kind == TraceKind::Grant) {
            auto& q = queues[row.resource];
            auto it = q.find(row.entity);
            if (it == q.end())
                return audit_fail("grant without enqueue: entity " +
                                  std::to_string(row.entity) + " on " + row.resource);
            for (const auto& [other, w] : q) {
                auto better = [](const Waiting& a, const Waiting& b) {
                    return std::tuple(-a.priority, a.since, a.order) <
                           std::tuple(-b.priority, b.since, b.order);
                };
                if (other != row.entity && better(w, it->second))
                    return audit_fail("entity " + std::to_string(other) +
                                      " should have been granted before " +
                                      std::to_string(row.entity) + " on " + row.resource +
                                      " at t=" + std::to_string(row.time));
            }
            // The logged waiting time must match enqueue bookkeeping.
            if (std::abs((row.time - it->second.since) - row.value) > 1e-9)
                return audit_fail("grant wait mismatch for entity " +
                                  std::to_string(row.entity));
            q.erase(it);
        }
    }
    return {};
}

// Every created entity departs exactly once, and nobody departs twice or
// out of thin air. Entities still inside at the horizon are the only
// permitted non-departures and are passed in by id.
inline AuditResult audit_conservation(const TraceLog& log,
                                      const std::set<std::int64_t>& still_inside) {
    std::set<std::int64_t> created, departed;
    for (const auto& row : log.rows) {
        if (row.kind == TraceKind::Create) {
            if (!created.insert(row.entity).second)
                return audit_fail("entity created twice: " + std::to_string(row.entity));
        } else if (row.kind == TraceKind::Depart) {
            if (!created.count(row.entity))
                return audit_fail("departure without creation: " + std::to_string(row.entity));
            if (!departed.insert(row.entity).second)
                return audit_fail("entity departed twice: " + std::to_string(row.entity));
        }
    }
    for (auto id : created) {
        if (!departed.count(id) && !still_inside.count(id))
            return audit_fail("entity lost: " + std::to_string(id));
        if (departed.count(id) && still_inside.count(id))
            return audit_fail("entity both departed and in system: " + std::to_string(id));
    }
    return {};
}

// A census event log must never dip below zero.
inline AuditResult audit_census_nonneg(std::span<const std::pair<double, int>> events) {
    int level = 0;
    for (const auto& [t, d] : events) {
        level += d;
        if (level < 0)
            return audit_fail("census below zero at t=" + std::to_string(t));
    }
    return {};
}

}  // namespace edcal::test
