// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_set>
#include <vector>

#include "edcal/errors.hpp"

namespace edcal {

enum class TraceKind { Create, Enqueue, Grant, Release, CapacityChange, Depart };

const char* to_string(TraceKind k);

// One line per engine event; `value` carries the priority (Enqueue), the
// waiting time (Grant), the new seat count (CapacityChange) or an outcome
// code (Depart), and is 0 otherwise.
struct TraceRow {
    double time = 0.0;
    TraceKind kind = TraceKind::Create;
    std::int64_t entity = -1;
    std::string resource;
    double value = 0.0;
};

struct TraceLog {
    std::vector<TraceRow> rows;
    void dump_tsv(std::ostream& os) const;
};

// Event calendar plus simulation clock. Events fire in (time, insertion
// order) order; ties in time are broken by insertion sequence, which makes
// every run fully deterministic.
class Engine {
  public:
    double now() const { return now_; }

    void at(double t, std::function<void()> fn) {
        if (t < now_) throw EngineBug("Engine::at: scheduling into the past");
        cal_.push_back(Ev{t, seq_++, std::move(fn)});
        std::push_heap(cal_.begin(), cal_.end(), later);
    }

    // Executes every event with time < horizon, then parks the clock at
    // the horizon. Events at or beyond the horizon stay unexecuted.
    void run_until(double horizon) {
        while (!cal_.empty() && cal_.front().t < horizon) {
            std::pop_heap(cal_.begin(), cal_.end(), later);
            Ev ev = std::move(cal_.back());
            cal_.pop_back();
            now_ = ev.t;
            ev.fn();
        }
        now_ = horizon;
    }

    void set_trace(TraceLog* log) { trace_ = log; }

    void trace(TraceKind kind, std::int64_t entity, const std::string& resource, double value) {
        if (trace_) trace_->rows.push_back(TraceRow{now_, kind, entity, resource, value});
    }

  private:
    struct Ev {
        double t;
        std::uint64_t seq;
        std::function<void()> fn;
    };
    static bool later(const Ev& a, const Ev& b) {
        return a.t > b.t || (a.t == b.t && a.seq > b.seq);
    }

    std::vector<Ev> cal_;
    double now_ = 0.0;
    std::uint64_t seq_ = 0;
    TraceLog* trace_ = nullptr;
};

// Weekly seat-schedule entry: `seats` seats are open on [start_hour,
// end_hour) of every weekday whose bit is set in day_mask (bit 0 = Monday).
struct CapacityWindow {
    double start_hour = 0.0;
    double end_hour = 24.0;
    std::uint8_t day_mask = 0x7f;
    int seats = 0;

    friend bool operator==(const CapacityWindow&, const CapacityWindow&) = default;
};

// Capacity at time t for a schedule starting on weekday start_day: the
// first matching window wins, no match means closed. Right-continuous at
// window edges (at 20:00 the night window is already in effect).
int capacity_at(const std::vector<CapacityWindow>& schedule, int start_day, double t);

// Seats with a weekly schedule and a priority + FIFO queue. Grants happen
// on seize (seat free), on release, and on upward capacity changes; a
// capacity decrease never interrupts entities already in service. The
// optional surge rule adds extra seats while the queue head has been
// waiting longer than a threshold.
class Resource {
  public:
    Resource(Engine& eng, std::string name, std::vector<CapacityWindow> schedule, int start_day);

    void set_surge(double threshold_hours, int extra_seats);

    const std::string& name() const { return name_; }
    int scheduled_capacity(double t) const { return capacity_at(schedule_, start_day_, t); }
    int effective_capacity(double t) const;
    int in_service() const { return in_service_; }
    std::size_t queue_length() const { return queue_.size(); }

    enum class SeizeResult { Granted, Enqueued };

    // Requests a seat. If one is free (queue discipline permitting) the
    // grant happens now and on_grant runs synchronously; otherwise the
    // entity waits in (priority desc, enqueue time asc, insertion) order.
    SeizeResult seize(std::int64_t entity, int priority, std::function<void(double)> on_grant);

    // Frees the seat held by entity; granting the queue head if possible.
    void release(std::int64_t entity);

    // Schedules one engine event per potential capacity-change instant
    // (window edges plus midnight) up to the horizon.
    void schedule_capacity_events(double horizon);

  private:
    struct Waiter {
        int priority;
        double enqueue_time;
        std::uint64_t seq;
        std::int64_t entity;
        std::function<void(double)> on_grant;
    };
    // "Worse-than" ordering so the heap's top is the next entity to grant.
    static bool worse(const Waiter& a, const Waiter& b) {
        if (a.priority != b.priority) return a.priority < b.priority;
        if (a.enqueue_time != b.enqueue_time) return a.enqueue_time > b.enqueue_time;
        return a.seq > b.seq;
    }

    void pump();

    Engine& eng_;
    std::string name_;
    std::vector<CapacityWindow> schedule_;
    int start_day_;
    double surge_threshold_ = 0.0;
    int surge_extra_ = 0;
    int in_service_ = 0;
    std::uint64_t next_seq_ = 0;
    std::vector<Waiter> queue_;
    std::unordered_set<std::int64_t> holders_;
};

}  // namespace edcal
