#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "stratus/manifest.hpp"
#include "stratus/simtime.hpp"
#include "stratus/telemetry.hpp"
#include "stratus/types.hpp"

namespace stratus {

/// Inter-arrival estimator state:
///   f(t) = (1 - alpha) * f(t-1) + alpha * gap
/// with gap the difference between consecutive arrival timestamps.
struct EwmaState {
  double f_prev = 0;  // current estimate, ms
  SimTime last_arrival = 0;
  double alpha = 0.125;
};

/// One update step. Throws on clock regression.
EwmaState ewma_update(const EwmaState& state, SimTime arrival);

/// Stateful wrapper seeding f(0) with the first observed gap. No estimate
/// is available before two arrivals.
class ArrivalTracker {
 public:
  explicit ArrivalTracker(double alpha = 0.125) { state_.alpha = alpha; }

  void observe(SimTime arrival);
  bool ready() const { return arrivals_ >= 2; }
  double estimate_ms() const { return state_.f_prev; }
  long long arrivals() const { return arrivals_; }

 private:
  EwmaState state_{};
  long long arrivals_ = 0;
};

/// A sample in a rule-evaluation window. `metric` is one of response_time,
/// cpu_load, request_rate; `subject` names an application or app/component.
struct Sample {
  std::string subject;
  std::string metric;
  SimTime timestamp = 0;
  double value = 0;
};

struct DriftIndicator {
  enum class Severity { info, overload, underload };
  std::string id;
  std::string subject;
  std::string metric;
  Comparator comparator = Comparator::greater;
  double threshold = 0;
  SimTime sustain_ms = 0;  // > 0
  Severity severity = Severity::info;
};

struct DriftAlert {
  std::string indicator_id;
  std::string subject;
  SimTime fired_at = 0;
  struct Evidence {
    long long count = 0;
    double mean = 0;
    double max = 0;
  } evidence;
};

struct ScaleDecision {
  std::string application;
  std::string component;
  ScaleAction action = ScaleAction::scale_out;
  std::string trigger;  // rule text or "platform-ewma"
  SimTime decided_at = 0;
  DriftAlert::Evidence evidence;
};

/// Removes redundant metric events: identical (instance, timestamp) pairs
/// collapse to the first occurrence. Idempotent.
std::vector<MetricEvent> correlate(std::vector<MetricEvent> batch);

/// Collapses repeated alerts for the same (indicator, subject) episode to
/// the earliest one.
std::vector<DriftAlert> correlate(std::vector<DriftAlert> alerts);

/// Pure evaluation: an indicator fires at `now` when its condition held
/// continuously (last-observation-carried-forward) for sustain_ms ending at
/// now. `window` must be sorted by timestamp.
std::vector<DriftAlert> evaluate_indicators(std::span<const Sample> window,
                                            std::span<const DriftIndicator> indicators,
                                            SimTime now);

/// Threshold check of an elasticity rule: the arithmetic mean of the rule's
/// metric over the rule window, compared in the rule's direction.
std::optional<ScaleDecision> check_elasticity(const ElasticityRule& rule,
                                              std::span<const Sample> window, SimTime now,
                                              const std::string& application,
                                              const std::string& component);

/// Canonical sample-metric name for a rule metric (ResponseTime ->
/// response_time, ...).
std::string rule_metric_name(const std::string& rule_metric);

/// The Workload Manager actor: ingests metric batches (deduplicating
/// retries), tracks per-application arrival EWMAs, evaluates drift
/// indicators and elasticity rules, and forwards scale decisions.
class WorkloadManager {
 public:
  struct Capacity {
    int instances = 0;
    SimTime service_time_ms = 0;
    std::string component;  // the served component scale decisions target
  };
  struct PlatformThresholds {
    // Absolute inter-arrival thresholds in ms; <= 0 disables the side.
    double overload_ms = -1;   // default: service_time / instances
    double underload_ms = -1;  // default: 10 * service_time / instances
    bool use_defaults = true;
  };

  explicit WorkloadManager(EventLog* log) : log_(log) {}

  void register_rule(const std::string& application, const std::string& component,
                     ElasticityRule rule);
  void register_indicator(DriftIndicator indicator);
  void set_platform_thresholds(const std::string& application, PlatformThresholds t);
  void set_platform_loop_enabled(bool enabled) { platform_loop_enabled_ = enabled; }
  /// Scales request_count samples into a per-second rate.
  void set_sample_interval_hint(SimTime ms) { sample_interval_hint_ms_ = ms; }

  void set_capacity_query(std::function<std::optional<Capacity>(const std::string&)> q) {
    capacity_query_ = std::move(q);
  }
  void set_decision_sink(std::function<void(const ScaleDecision&)> sink) {
    decision_sink_ = std::move(sink);
  }
  void set_alert_sink(std::function<void(const DriftAlert&)> sink) { alert_sink_ = std::move(sink); }

  /// Batch delivery from an instance monitor. Duplicate (instance,
  /// timestamp) events from retried batches are discarded. Returns the
  /// highest timestamp accepted (the acknowledgement watermark).
  SimTime deliver_batch(const std::string& component, const std::vector<MetricEvent>& batch);

  /// Per-arrival stream from the load balancer.
  void observe_arrival(const std::string& application, SimTime at);

  /// Periodic evaluation tick.
  void evaluate(SimTime now);

  const std::deque<Sample>& window(const std::string& application,
                                   const std::string& component) const;

 private:
  struct RuleEntry {
    std::string application;
    std::string component;
    ElasticityRule rule;
    bool latched = false;
  };
  struct IndicatorEntry {
    DriftIndicator indicator;
    bool latched = false;
  };

  void emit_decision(ScaleDecision d);
  void prune(std::deque<Sample>& w, SimTime now) const;

  EventLog* log_;
  bool platform_loop_enabled_ = true;
  SimTime sample_interval_hint_ms_ = 1 * kSecond;
  std::map<std::pair<std::string, std::string>, std::deque<Sample>> windows_;
  std::map<std::string, std::set<std::pair<std::string, SimTime>>> seen_;  // app -> (instance, ts)
  std::map<std::string, ArrivalTracker> trackers_;
  std::map<std::string, PlatformThresholds> thresholds_;
  std::map<std::string, bool> platform_latched_;  // app -> overload episode latch
  std::vector<RuleEntry> rules_;
  std::vector<IndicatorEntry> indicators_;
  std::function<std::optional<Capacity>(const std::string&)> capacity_query_;
  std::function<void(const ScaleDecision&)> decision_sink_;
  std::function<void(const DriftAlert&)> alert_sink_;
};

}  // namespace stratus
