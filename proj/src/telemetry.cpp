#include "stratus/telemetry.hpp"

#include <algorithm>

namespace stratus {

Admission admit_request(Instance& inst, const std::string& request_id, SimTime now) {
  inst.routed_since_sample += 1;
  inst.total_routed += 1;
  SimTime start = std::max(now, inst.next_free_at);
  SimTime completion = start + inst.service_time_ms;
  SimTime latency = completion - now;
  if (latency >= inst.request_timeout_ms) {
    return Admission{false, inst.request_timeout_ms};
  }
  inst.queue_len += 1;
  inst.in_flight.push_back(Instance::InFlight{request_id, now, completion});
  inst.next_free_at = completion;
  return Admission{true, latency};
}

void complete_request(Instance& inst, const std::string& request_id, SimTime now) {
  (void)now;
  if (inst.in_flight.empty() || inst.in_flight.front().request_id != request_id) return;
  inst.in_flight.pop_front();
  inst.queue_len -= 1;
  inst.served_ms_since_sample += inst.service_time_ms;
}

std::optional<MetricEvent> sample_instance(Instance& inst, SimTime now) {
  if (!inst.running) return std::nullopt;
  MetricEvent ev;
  ev.instance_id = inst.id;
  ev.application = inst.application;
  ev.timestamp = now;
  ev.response_time_ms = (static_cast<SimTime>(inst.queue_len) + 1) * inst.service_time_ms;
  ev.request_count = inst.routed_since_sample;
  SimTime elapsed = now - inst.last_sample_at;
  if (elapsed > 0) {
    double load = static_cast<double>(inst.served_ms_since_sample) / static_cast<double>(elapsed);
    ev.cpu_load = std::min(1.0, load);
  }
  inst.routed_since_sample = 0;
  inst.served_ms_since_sample = 0;
  inst.last_sample_at = now;
  inst.buffer.push_back(ev);
  return ev;
}

std::vector<MetricEvent> flush_interval(Instance& inst) {
  std::vector<MetricEvent> batch;
  batch.swap(inst.buffer);
  inst.outbox.insert(inst.outbox.end(), batch.begin(), batch.end());
  return batch;
}

void acknowledge(Instance& inst, SimTime up_to) {
  std::erase_if(inst.outbox, [up_to](const MetricEvent& e) { return e.timestamp <= up_to; });
}

HealthReport health_check(const Fabric& fabric, const std::string& component_id,
                          const std::string& node_id) {
  HealthReport report;
  report.component_id = component_id;
  report.timestamp = fabric.now();
  auto latency = fabric.probe(node_id);
  report.reachable = latency.has_value();
  report.latency_ms = latency;
  return report;
}

}  // namespace stratus
