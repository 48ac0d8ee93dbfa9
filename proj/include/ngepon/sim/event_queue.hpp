#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ngepon/sim/time.hpp"

namespace ngepon::sim {

enum class EventKind : std::uint8_t {
  kPacketArrival,
  kReportReceived,
  kGrantStart,
  kGrantEnd,
  kAgentTick,
  kLoadProfileTick,
};

constexpr std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kPacketArrival: return "packet-arrival";
    case EventKind::kReportReceived: return "report-received";
    case EventKind::kGrantStart: return "grant-start";
    case EventKind::kGrantEnd: return "grant-end";
    case EventKind::kAgentTick: return "agent-tick";
    case EventKind::kLoadProfileTick: return "load-profile-tick";
  }
  return "unknown";
}

struct Event {
  SimTime fire_at{};
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kAgentTick;
  std::uint32_t subject = 0;  // ONU id for per-ONU events
  std::uint64_t payload = 0;
};

/// Sequence number of a scheduled event; unique within one queue.
using EventHandle = std::uint64_t;

/// Raised when a handler fails; carries the event that was being dispatched.
class EventDispatchError : public std::runtime_error {
 public:
  EventDispatchError(const Event& event, const std::string& what)
      : std::runtime_error(describe(event) + ": " + what), event_{event} {}

  const Event& event() const { return event_; }

 private:
  static std::string describe(const Event& e) {
    return "event seq=" + std::to_string(e.seq) + " kind=" + std::string(to_string(e.kind)) +
           " subject=" + std::to_string(e.subject) + " at " + std::to_string(e.fire_at.count()) + " ns";
  }

  Event event_;
};

/// Binary min-heap of events keyed by (fire_at, seq). Equal fire times pop in
/// insertion order.
class EventQueue {
 public:
  using Handler = std::function<void(const Event&)>;

  EventHandle schedule(SimTime fire_at, EventKind kind, std::uint32_t subject = 0, std::uint64_t payload = 0) {
    if (fire_at < now_) {
      throw std::logic_error("EventQueue::schedule: fire_at " + std::to_string(fire_at.count()) +
                             " ns is before the clock at " + std::to_string(now_.count()) + " ns");
    }
    Event e{fire_at, next_seq_++, kind, subject, payload};
    heap_.push(e);
    return e.seq;
  }

  EventHandle schedule(const Event& event) {
    return schedule(event.fire_at, event.kind, event.subject, event.payload);
  }

  /// Removes the earliest event and advances the clock to it.
  std::optional<Event> pop() {
    if (heap_.empty()) return std::nullopt;
    Event e = heap_.top();
    heap_.pop();
    now_ = e.fire_at;
    return e;
  }

  std::optional<SimTime> next_time() const {
    if (heap_.empty()) return std::nullopt;
    return heap_.top().fire_at;
  }

  /// Dispatches every event with fire_at <= t_end, then parks the clock at
  /// t_end. Handlers may schedule further events.
  std::size_t run_until(SimTime t_end, const Handler& handler) {
    if (t_end < now_) throw std::logic_error("EventQueue::run_until: t_end is before the clock");
    std::size_t dispatched = 0;
    while (!heap_.empty() && heap_.top().fire_at <= t_end) {
      Event e = *pop();
      try {
        handler(e);
      } catch (const EventDispatchError&) {
        throw;
      } catch (const std::exception& ex) {
        std::throw_with_nested(EventDispatchError(e, ex.what()));
      }
      ++dispatched;
    }
    now_ = t_end;
    return dispatched;
  }

  SimTime now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  SimTime now_{0};
  std::uint64_t next_seq_ = 0;
};

}  // namespace ngepon::sim
