#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "stratus/fabric.hpp"
#include "stratus/simtime.hpp"

namespace stratus {

/// One ResponsivenessEvent row for an application instance.
struct MetricEvent {
  std::string instance_id;
  std::string application;
  SimTime timestamp = 0;
  SimTime response_time_ms = 0;
  long long request_count = 0;  // requests routed in the sample interval
  double cpu_load = 0;          // 0..1

  bool operator==(const MetricEvent&) const = default;
};

struct HealthReport {
  std::string component_id;
  SimTime timestamp = 0;
  bool reachable = false;
  std::optional<SimTime> latency_ms;  // present iff reachable
};

/// A deployed application instance modeled as a single-server deterministic
/// FIFO queue: a request arriving with q requests in flight completes after
/// (q + 1) * service_time. Requests whose completion would breach the
/// timeout are shed at admission.
struct Instance {
  std::string id;
  std::string application;
  std::string component;
  std::string node_id;
  std::string provider_id;
  SimTime service_time_ms = 100;
  SimTime request_timeout_ms = 5 * kSecond;
  bool monitorable = true;
  bool running = true;

  // queue state
  SimTime next_free_at = 0;
  int queue_len = 0;
  struct InFlight {
    std::string request_id;
    SimTime arrival;
    SimTime completion;
  };
  std::deque<InFlight> in_flight;

  // sample-interval counters
  long long routed_since_sample = 0;
  SimTime served_ms_since_sample = 0;
  SimTime last_sample_at = 0;
  long long total_routed = 0;

  // ResponsivenessEvent buffer and the unacknowledged outbox
  std::vector<MetricEvent> buffer;
  std::vector<MetricEvent> outbox;
};

struct Admission {
  bool admitted = false;
  SimTime latency_ms = 0;  // completion - arrival; equals timeout when shed
};

/// Admits or sheds one request at `now`. Counters always record the routed
/// request; only admitted requests occupy the queue.
Admission admit_request(Instance& inst, const std::string& request_id, SimTime now);

/// Marks the head in-flight entry done. The caller schedules this at the
/// admission's completion time.
void complete_request(Instance& inst, const std::string& request_id, SimTime now);

/// Synthesizes one sample from the load model and appends it to the buffer.
/// A non-running instance emits nothing.
std::optional<MetricEvent> sample_instance(Instance& inst, SimTime now);

/// Drains buffer into the returned batch and stages it in the outbox until
/// the workload manager acknowledges delivery.
std::vector<MetricEvent> flush_interval(Instance& inst);

/// Drops acknowledged events (timestamp <= up_to) from the outbox.
void acknowledge(Instance& inst, SimTime up_to);

/// Ping passthrough from the fabric edge.
HealthReport health_check(const Fabric& fabric, const std::string& component_id,
                          const std::string& node_id);

}  // namespace stratus
