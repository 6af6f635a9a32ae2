#include "stratus/balancer.hpp"

#include <algorithm>

namespace stratus {

std::string_view to_string(RequestOutcome::Status s) {
  switch (s) {
    case RequestOutcome::Status::ok: return "ok";
    case RequestOutcome::Status::timeout: return "timeout";
    case RequestOutcome::Status::no_backend: return "no-backend";
  }
  return "?";
}

std::uint64_t Balancer::register_instance(const std::string& application, RouteEntry entry,
                                          SimTime now) {
  auto& list = entries_[application];
  for (const auto& e : list) {
    if (e.instance_id == entry.instance_id)
      throw BalancerError("instance already registered: " + entry.instance_id);
  }
  list.push_back(std::move(entry));
  ++version_;
  if (log_)
    log_->append(now, "balancer", "route-registered",
                 {{"application", application},
                  {"instance", list.back().instance_id},
                  {"node", list.back().node_id},
                  {"provider", list.back().provider_id},
                  {"version", version_}});
  return version_;
}

std::uint64_t Balancer::deregister_instance(const std::string& application,
                                            const std::string& instance_id, SimTime now) {
  auto it = entries_.find(application);
  if (it == entries_.end()) throw BalancerError("unknown application: " + application);
  auto& list = it->second;
  auto pos = std::find_if(list.begin(), list.end(),
                          [&](const RouteEntry& e) { return e.instance_id == instance_id; });
  if (pos == list.end()) throw BalancerError("unknown instance: " + instance_id);
  std::size_t index = static_cast<std::size_t>(pos - list.begin());
  list.erase(pos);
  auto& cursor = cursor_[application];
  if (index < cursor) --cursor;
  if (!list.empty()) cursor %= list.size();
  ++version_;
  if (log_)
    log_->append(now, "balancer", "route-deregistered",
                 {{"application", application}, {"instance", instance_id}, {"version", version_}});
  return version_;
}

std::uint64_t Balancer::mark_health(const std::string& instance_id, bool healthy, SimTime now) {
  for (auto& [app, list] : entries_) {
    for (auto& e : list) {
      if (e.instance_id != instance_id) continue;
      bool changed = e.healthy != healthy;
      e.healthy = healthy;
      ++version_;
      if (log_)
        log_->append(now, "balancer", "route-health",
                     {{"application", app},
                      {"instance", instance_id},
                      {"healthy", healthy},
                      {"changed", changed},
                      {"version", version_}});
      return version_;
    }
  }
  throw BalancerError("unknown instance: " + instance_id);
}

const std::vector<RouteEntry>& Balancer::entries(const std::string& application) const {
  static const std::vector<RouteEntry> empty;
  auto it = entries_.find(application);
  return it == entries_.end() ? empty : it->second;
}

std::vector<std::string> Balancer::applications() const {
  std::vector<std::string> out;
  for (const auto& [app, list] : entries_) {
    (void)list;
    out.push_back(app);
  }
  return out;
}

int Balancer::healthy_count(const std::string& application) const {
  int n = 0;
  for (const auto& e : entries(application))
    if (e.healthy) ++n;
  return n;
}

RequestOutcome Balancer::dispatch(const std::string& application, const std::string& request_id,
                                  SimTime now) {
  auto it = entries_.find(application);
  if (it == entries_.end()) throw BalancerError("unknown application: " + application);

  arrivals_[application].push_back(now);
  auto& window = arrivals_[application];
  while (!window.empty() && window.front() < now - 120 * kSecond) window.pop_front();
  if (arrival_observer_) arrival_observer_(application, now);

  RequestOutcome outcome;
  outcome.request_id = request_id;
  outcome.application = application;
  outcome.dispatched_at = now;

  auto& list = it->second;
  std::size_t n = list.size();
  std::size_t& cursor = cursor_[application];
  std::size_t chosen = n;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t idx = (cursor + step) % n;
    if (list[idx].healthy) {
      chosen = idx;
      break;
    }
  }
  if (chosen == n) {
    outcome.status = RequestOutcome::Status::no_backend;
    outcome.latency_ms = 0;
    return outcome;
  }
  cursor = (chosen + 1) % n;
  outcome.instance_id = list[chosen].instance_id;

  Admission adm{true, 0};
  if (admit_) adm = admit_(list[chosen].instance_id, request_id, now);
  outcome.latency_ms = adm.latency_ms;
  outcome.status = adm.admitted && adm.latency_ms < request_timeout_ms_
                       ? RequestOutcome::Status::ok
                       : RequestOutcome::Status::timeout;
  if (!adm.admitted) outcome.latency_ms = request_timeout_ms_;
  return outcome;
}

double Balancer::connection_rate(const std::string& application, SimTime window_ms,
                                 SimTime now) const {
  if (window_ms <= 0) throw BalancerError("connection_rate: window must be positive");
  auto it = arrivals_.find(application);
  if (it == arrivals_.end()) return 0.0;
  long long count = 0;
  for (auto ts : it->second) {
    if (ts > now - window_ms && ts <= now) ++count;
  }
  return static_cast<double>(count) * 1000.0 / static_cast<double>(window_ms);
}

}  // namespace stratus
