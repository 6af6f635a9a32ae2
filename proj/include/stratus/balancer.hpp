#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stratus/events.hpp"
#include "stratus/simtime.hpp"
#include "stratus/telemetry.hpp"

namespace stratus {

struct BalancerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RouteEntry {
  std::string instance_id;
  std::string node_id;
  std::string provider_id;
  bool healthy = true;
};

struct RequestOutcome {
  enum class Status { ok, timeout, no_backend };
  std::string request_id;
  std::string application;
  std::string instance_id;  // empty for no_backend
  SimTime dispatched_at = 0;
  SimTime latency_ms = 0;
  Status status = Status::ok;
};

std::string_view to_string(RequestOutcome::Status s);

/// Routing table plus round-robin dispatch. One logical actor; every
/// mutation bumps the table version and dispatch reads a consistent
/// version. Only healthy entries receive traffic.
class Balancer {
 public:
  explicit Balancer(EventLog* log, SimTime request_timeout_ms = 5 * kSecond)
      : log_(log), request_timeout_ms_(request_timeout_ms) {}

  std::uint64_t version() const { return version_; }
  SimTime request_timeout_ms() const { return request_timeout_ms_; }

  std::uint64_t register_instance(const std::string& application, RouteEntry entry, SimTime now);
  std::uint64_t deregister_instance(const std::string& application, const std::string& instance_id,
                                    SimTime now);
  /// Throws on unknown instance. Idempotent on repeated marks.
  std::uint64_t mark_health(const std::string& instance_id, bool healthy, SimTime now);

  bool has_application(const std::string& application) const {
    return entries_.count(application) > 0;
  }
  const std::vector<RouteEntry>& entries(const std::string& application) const;
  std::vector<std::string> applications() const;
  int healthy_count(const std::string& application) const;

  /// Routes one request round-robin among healthy entries. The admit hook
  /// decides queue admission; its latency becomes the outcome latency, and
  /// a shed admission is a timeout. No healthy entry yields no_backend.
  RequestOutcome dispatch(const std::string& application, const std::string& request_id,
                          SimTime now);

  /// Dispatched requests per second over the closed window (now - window,
  /// now]. Also the arrival stream the workload manager's EWMA consumes.
  double connection_rate(const std::string& application, SimTime window_ms, SimTime now) const;

  void set_admit(std::function<Admission(const std::string& instance_id, const std::string& request_id,
                                         SimTime now)> admit) {
    admit_ = std::move(admit);
  }
  void set_arrival_observer(std::function<void(const std::string& application, SimTime at)> fn) {
    arrival_observer_ = std::move(fn);
  }

 private:
  EventLog* log_;
  SimTime request_timeout_ms_;
  std::uint64_t version_ = 1;
  std::map<std::string, std::vector<RouteEntry>> entries_;
  std::map<std::string, std::size_t> cursor_;
  std::map<std::string, std::deque<SimTime>> arrivals_;
  std::function<Admission(const std::string&, const std::string&, SimTime)> admit_;
  std::function<void(const std::string&, SimTime)> arrival_observer_;
};

}  // namespace stratus
