#include "stratus/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stratus {

EwmaState ewma_update(const EwmaState& state, SimTime arrival) {
  if (arrival < state.last_arrival) throw std::invalid_argument("ewma_update: clock regression");
  EwmaState next = state;
  double gap = static_cast<double>(arrival - state.last_arrival);
  next.f_prev = (1.0 - state.alpha) * state.f_prev + state.alpha * gap;
  next.last_arrival = arrival;
  return next;
}

void ArrivalTracker::observe(SimTime arrival) {
  ++arrivals_;
  if (arrivals_ == 1) {
    state_.last_arrival = arrival;
    return;
  }
  if (arrivals_ == 2) {
    // f(0) = first observed gap
    state_.f_prev = static_cast<double>(arrival - state_.last_arrival);
    state_.last_arrival = arrival;
    return;
  }
  state_ = ewma_update(state_, arrival);
}

std::vector<MetricEvent> correlate(std::vector<MetricEvent> batch) {
  std::vector<MetricEvent> out;
  std::set<std::pair<std::string, SimTime>> seen;
  out.reserve(batch.size());
  for (auto& e : batch) {
    if (seen.emplace(e.instance_id, e.timestamp).second) out.push_back(std::move(e));
  }
  return out;
}

std::vector<DriftAlert> correlate(std::vector<DriftAlert> alerts) {
  std::vector<DriftAlert> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (auto& a : alerts) {
    if (seen.emplace(a.indicator_id, a.subject).second) out.push_back(std::move(a));
  }
  return out;
}

namespace {

bool subject_matches(const std::string& sample_subject, const std::string& indicator_subject) {
  if (sample_subject == indicator_subject) return true;
  return sample_subject.size() > indicator_subject.size() + 1 &&
         sample_subject.compare(0, indicator_subject.size(), indicator_subject) == 0 &&
         sample_subject[indicator_subject.size()] == '/';
}

}  // namespace

std::vector<DriftAlert> evaluate_indicators(std::span<const Sample> window,
                                            std::span<const DriftIndicator> indicators,
                                            SimTime now) {
  std::vector<DriftAlert> alerts;
  for (const auto& ind : indicators) {
    if (ind.sustain_ms <= 0) continue;
    SimTime start = now - ind.sustain_ms;

    // Last-observation-carried-forward over the matching samples: the value
    // at the window start is the latest sample at or before it, and every
    // sample inside (start, now] must satisfy the condition too.
    const Sample* base = nullptr;
    bool in_window_violation = false;
    DriftAlert::Evidence ev;
    bool have_values = false;
    for (const auto& s : window) {
      if (s.metric != ind.metric || !subject_matches(s.subject, ind.subject)) continue;
      if (s.timestamp > now) continue;
      if (s.timestamp <= start) {
        if (!base || s.timestamp >= base->timestamp) base = &s;
        continue;
      }
      if (!compare(ind.comparator, s.value, ind.threshold)) in_window_violation = true;
      ev.count += 1;
      ev.mean += s.value;
      ev.max = have_values ? std::max(ev.max, s.value) : s.value;
      have_values = true;
    }
    if (!base || in_window_violation) continue;
    if (!compare(ind.comparator, base->value, ind.threshold)) continue;
    if (ev.count > 0)
      ev.mean /= static_cast<double>(ev.count);
    else {
      ev.count = 1;
      ev.mean = base->value;
      ev.max = base->value;
    }
    alerts.push_back(DriftAlert{ind.id, ind.subject, now, ev});
  }
  return alerts;
}

std::string rule_metric_name(const std::string& rule_metric) {
  if (rule_metric == "ResponseTime") return "response_time";
  if (rule_metric == "RequestRate") return "request_rate";
  if (rule_metric == "CpuLoad") return "cpu_load";
  return rule_metric;
}

std::optional<ScaleDecision> check_elasticity(const ElasticityRule& rule,
                                              std::span<const Sample> window, SimTime now,
                                              const std::string& application,
                                              const std::string& component) {
  const std::string metric = rule_metric_name(rule.metric);
  const std::string subject = application + "/" + component;
  SimTime start = now - rule.window_ms;
  double sum = 0, maxv = 0;
  long long count = 0;
  for (const auto& s : window) {
    if (s.metric != metric || s.subject != subject) continue;
    if (s.timestamp <= start || s.timestamp > now) continue;
    sum += s.value;
    maxv = count == 0 ? s.value : std::max(maxv, s.value);
    ++count;
  }
  if (count == 0) return std::nullopt;
  double mean = sum / static_cast<double>(count);
  if (!compare(rule.comparator, mean, rule.threshold)) return std::nullopt;
  ScaleDecision d;
  d.application = application;
  d.component = component;
  d.action = rule.action;
  d.trigger = rule.text;
  d.decided_at = now;
  d.evidence = DriftAlert::Evidence{count, mean, maxv};
  return d;
}

void WorkloadManager::register_rule(const std::string& application, const std::string& component,
                                    ElasticityRule rule) {
  rules_.push_back(RuleEntry{application, component, std::move(rule), false});
}

void WorkloadManager::register_indicator(DriftIndicator indicator) {
  indicators_.push_back(IndicatorEntry{std::move(indicator), false});
}

void WorkloadManager::set_platform_thresholds(const std::string& application,
                                              PlatformThresholds t) {
  t.use_defaults = false;
  thresholds_[application] = t;
}

SimTime WorkloadManager::deliver_batch(const std::string& component,
                                       const std::vector<MetricEvent>& batch) {
  SimTime watermark = -1;
  for (const auto& e : batch) {
    watermark = std::max(watermark, e.timestamp);
    auto& seen = seen_[e.application];
    if (!seen.emplace(e.instance_id, e.timestamp).second) continue;  // retried duplicate
    auto& w = windows_[{e.application, component}];
    std::string subject = e.application + "/" + component;
    w.push_back(Sample{subject, "response_time", e.timestamp,
                       static_cast<double>(e.response_time_ms)});
    w.push_back(Sample{subject, "cpu_load", e.timestamp, e.cpu_load});
    w.push_back(Sample{subject, "request_rate", e.timestamp,
                       static_cast<double>(e.request_count) * 1000.0 /
                           static_cast<double>(sample_interval_hint_ms_)});
  }
  return watermark;
}

void WorkloadManager::observe_arrival(const std::string& application, SimTime at) {
  trackers_[application].observe(at);
}

void WorkloadManager::prune(std::deque<Sample>& w, SimTime now) const {
  SimTime horizon = 180 * kSecond;
  while (!w.empty() && w.front().timestamp < now - horizon) w.pop_front();
}

void WorkloadManager::emit_decision(ScaleDecision d) {
  if (log_)
    log_->append(d.decided_at, "workload-manager", "scale-decision",
                 {{"application", d.application},
                  {"component", d.component},
                  {"action", to_string(d.action)},
                  {"trigger", d.trigger},
                  {"evidence",
                   {{"count", d.evidence.count}, {"mean", d.evidence.mean}, {"max", d.evidence.max}}}});
  if (decision_sink_) decision_sink_(d);
}

void WorkloadManager::evaluate(SimTime now) {
  for (auto& [key, w] : windows_) prune(w, now);
  for (auto& [app, seen] : seen_) {
    (void)app;
    std::erase_if(seen, [now](const auto& p) { return p.second < now - 180 * kSecond; });
  }

  // manifest elasticity rules
  for (auto& entry : rules_) {
    auto it = windows_.find({entry.application, entry.component});
    if (it == windows_.end()) continue;
    std::vector<Sample> snapshot(it->second.begin(), it->second.end());
    auto decision =
        check_elasticity(entry.rule, snapshot, now, entry.application, entry.component);
    if (decision && !entry.latched) {
      entry.latched = true;
      emit_decision(*decision);
    } else if (!decision) {
      entry.latched = false;
    }
  }

  // drift indicators
  if (!indicators_.empty()) {
    std::vector<Sample> all;
    for (const auto& [key, w] : windows_) all.insert(all.end(), w.begin(), w.end());
    std::sort(all.begin(), all.end(),
              [](const Sample& a, const Sample& b) { return a.timestamp < b.timestamp; });
    for (auto& entry : indicators_) {
      auto fired = evaluate_indicators(all, std::span(&entry.indicator, 1), now);
      if (!fired.empty()) {
        if (!entry.latched) {
          entry.latched = true;
          const DriftAlert& a = fired.front();
          if (log_)
            log_->append(now, "workload-manager", "drift-alert",
                         {{"indicator", a.indicator_id},
                          {"subject", a.subject},
                          {"evidence",
                           {{"count", a.evidence.count},
                            {"mean", a.evidence.mean},
                            {"max", a.evidence.max}}}});
          if (alert_sink_) alert_sink_(a);
        }
      } else {
        // unlatch once the latest observation stops satisfying the condition
        const Sample* latest = nullptr;
        for (const auto& s : all) {
          if (s.metric != entry.indicator.metric || s.timestamp > now) continue;
          if (s.subject != entry.indicator.subject &&
              !(s.subject.size() > entry.indicator.subject.size() &&
                s.subject.compare(0, entry.indicator.subject.size(), entry.indicator.subject) == 0 &&
                s.subject[entry.indicator.subject.size()] == '/'))
            continue;
          if (!latest || s.timestamp >= latest->timestamp) latest = &s;
        }
        if (latest && !compare(entry.indicator.comparator, latest->value, entry.indicator.threshold))
          entry.latched = false;
      }
    }
  }

  // platform-level threshold loop on the arrival EWMA
  if (!platform_loop_enabled_ || !capacity_query_) return;
  for (auto& [app, tracker] : trackers_) {
    if (!tracker.ready()) continue;
    auto capacity = capacity_query_(app);
    if (!capacity || capacity->instances <= 0) continue;
    double over_ms, under_ms;
    auto th = thresholds_.find(app);
    if (th != thresholds_.end() && !th->second.use_defaults) {
      over_ms = th->second.overload_ms;
      under_ms = th->second.underload_ms;
    } else {
      over_ms = static_cast<double>(capacity->service_time_ms) / capacity->instances;
      under_ms = 10.0 * over_ms;
    }
    double est = tracker.estimate_ms();

    bool& over_latch = platform_latched_[app + "/overload"];
    if (over_ms > 0 && est < over_ms) {
      if (!over_latch) {
        over_latch = true;
        ScaleDecision d;
        d.application = app;
        d.component = capacity->component;
        d.action = ScaleAction::scale_out;
        d.trigger = "platform-ewma";
        d.decided_at = now;
        d.evidence = DriftAlert::Evidence{tracker.arrivals(), est, est};
        emit_decision(d);
      }
    } else {
      over_latch = false;
    }

    bool& under_latch = platform_latched_[app + "/underload"];
    if (under_ms > 0 && est > under_ms) {
      if (!under_latch) {
        under_latch = true;
        ScaleDecision d;
        d.application = app;
        d.component = capacity->component;
        d.action = ScaleAction::scale_in;
        d.trigger = "platform-ewma";
        d.decided_at = now;
        d.evidence = DriftAlert::Evidence{tracker.arrivals(), est, est};
        emit_decision(d);
      }
    } else {
      under_latch = false;
    }
  }
}

const std::deque<Sample>& WorkloadManager::window(const std::string& application,
                                                  const std::string& component) const {
  static const std::deque<Sample> empty;
  auto it = windows_.find({application, component});
  return it == windows_.end() ? empty : it->second;
}

}  // namespace stratus
