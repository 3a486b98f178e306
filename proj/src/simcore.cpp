// Copyright (c) 2026 edcal contributors
// SPDX-License-Identifier: Apache-2.0
#include "edcal/simcore.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

namespace edcal {

const char* to_string(TraceKind k) {
    switch (k) {
        case TraceKind::Create: return "create";
        case TraceKind::Enqueue: return "enqueue";
        case TraceKind::Grant: return "grant";
        case TraceKind::Release: return "release";
        case TraceKind::CapacityChange: return "capacity";
        case TraceKind::Depart: return "depart";
    }
    return "?";
}

void TraceLog::dump_tsv(std::ostream& os) const {
    os << "time\ttype\tentity\tresource\tvalue\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f\t%s\t%lld\t%s\t%.6f\n", r.time, to_string(r.kind),
                      static_cast<long long>(r.entity), r.resource.c_str(), r.value);
        os << buf;
    }
}

int capacity_at(const std::vector<CapacityWindow>& schedule, int start_day, double t) {
    const int day = (start_day + static_cast<int>(t / 24.0)) % 7;
    const double hour = t - 24.0 * std::floor(t / 24.0);
    for (const auto& w : schedule) {
        if ((w.day_mask >> day) & 1) {
            if (hour >= w.start_hour && hour < w.end_hour) return w.seats;
        }
    }
    return 0;
}

Resource::Resource(Engine& eng, std::string name, std::vector<CapacityWindow> schedule,
                   int start_day)
    : eng_(eng), name_(std::move(name)), schedule_(std::move(schedule)), start_day_(start_day) {
    for (const auto& w : schedule_) {
        if (w.seats < 0 || w.start_hour < 0.0 || w.end_hour > 24.0 || w.start_hour >= w.end_hour ||
            w.day_mask == 0 || (w.day_mask & ~0x7f) != 0)
            throw ConfigError("Resource " + name_ + ": malformed capacity window");
    }
    if (start_day_ < 0 || start_day_ > 6)
        throw ConfigError("Resource " + name_ + ": start_day out of range");
}

void Resource::set_surge(double threshold_hours, int extra_seats) {
    if (threshold_hours < 0.0 || extra_seats < 0)
        throw ConfigError("Resource " + name_ + ": bad surge settings");
    surge_threshold_ = threshold_hours;
    surge_extra_ = extra_seats;
}

int Resource::effective_capacity(double t) const {
    int cap = scheduled_capacity(t);
    if (surge_extra_ > 0 && !queue_.empty() &&
        t - queue_.front().enqueue_time >= surge_threshold_)
        cap += surge_extra_;
    return cap;
}

Resource::SeizeResult Resource::seize(std::int64_t entity, int priority,
                                      std::function<void(double)> on_grant) {
    eng_.trace(TraceKind::Enqueue, entity, name_, static_cast<double>(priority));
    queue_.push_back(Waiter{priority, eng_.now(), next_seq_++, entity, std::move(on_grant)});
    std::push_heap(queue_.begin(), queue_.end(), worse);
    if (surge_extra_ > 0) {
        // A seat may open for this entity once it has waited past the
        // threshold; check again then.
        eng_.at(eng_.now() + surge_threshold_, [this] { pump(); });
    }
    pump();
    return holders_.contains(entity) ? SeizeResult::Granted : SeizeResult::Enqueued;
}

void Resource::release(std::int64_t entity) {
    if (holders_.erase(entity) == 0)
        throw EngineBug("Resource " + name_ + ": release by non-holder entity " +
                        std::to_string(entity));
    --in_service_;
    eng_.trace(TraceKind::Release, entity, name_, 0.0);
    pump();
}

void Resource::pump() {
    const double now = eng_.now();
    while (!queue_.empty() && in_service_ < effective_capacity(now)) {
        std::pop_heap(queue_.begin(), queue_.end(), worse);
        Waiter w = std::move(queue_.back());
        queue_.pop_back();
        ++in_service_;
        holders_.insert(w.entity);
        eng_.trace(TraceKind::Grant, w.entity, name_, now - w.enqueue_time);
        w.on_grant(now);
    }
}

void Resource::schedule_capacity_events(double horizon) {
    std::set<double> edges = {0.0};  // midnight: the weekday bit may flip
    for (const auto& w : schedule_) {
        edges.insert(w.start_hour);
        if (w.end_hour < 24.0) edges.insert(w.end_hour);
    }
    for (int day = 0; day * 24.0 < horizon; ++day) {
        for (double e : edges) {
            const double t = day * 24.0 + e;
            if (t > 0.0 && t < horizon) {
                eng_.at(t, [this] {
                    eng_.trace(TraceKind::CapacityChange, -1, name_,
                               static_cast<double>(scheduled_capacity(eng_.now())));
                    pump();
                });
            }
        }
    }
}

}  // namespace edcal
