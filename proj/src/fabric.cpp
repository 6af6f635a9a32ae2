#include "stratus/fabric.hpp"

#include <algorithm>
#include <cinttypes>

namespace stratus {

VmType classify_vm(int vcpu, double ram_gib) {
  if (vcpu < 1 || ram_gib <= 0) throw FabricError("classify_vm: vcpu >= 1 and ram > 0 required");
  if (vcpu <= 1 && ram_gib < 1.0) return VmType::micro;
  if (vcpu <= 1 && ram_gib <= 2.0) return VmType::small;
  if (vcpu <= 2 && ram_gib <= 4.0) return VmType::medium;
  return VmType::large;
}

std::string_view to_string(NodeState s) {
  switch (s) {
    case NodeState::provisioning: return "provisioning";
    case NodeState::running: return "running";
    case NodeState::failed: return "failed";
    case NodeState::terminated: return "terminated";
  }
  return "?";
}

nlohmann::json provider_to_json(const ProviderProfile& p) {
  nlohmann::json catalog = nlohmann::json::object();
  for (const auto& [type, offer] : p.vm_catalog) {
    catalog[std::string(to_string(type))] = {{"vcpu", offer.vcpu},
                                             {"ram_gib", offer.ram_gib},
                                             {"price_per_hour", offer.price_per_hour}};
  }
  return {{"id", p.id},
          {"display_name", p.display_name},
          {"location", p.location},
          {"vm_catalog", catalog},
          {"provision_delay_ms", p.provision_delay_ms},
          {"base_latency_ms", p.base_latency_ms},
          {"monitorable", p.monitorable}};
}

ProviderProfile provider_from_json(const nlohmann::json& j) {
  ProviderProfile p;
  p.id = j.at("id").get<std::string>();
  if (p.id.empty()) throw FabricError("provider with empty id");
  p.display_name = j.value("display_name", p.id);
  p.location = j.value("location", std::string{});
  if (!j.contains("vm_catalog") || j.at("vm_catalog").empty())
    throw FabricError("provider '" + p.id + "' has an empty vm_catalog");
  for (const auto& [key, offer] : j.at("vm_catalog").items()) {
    auto type = parse_vm_type(key);
    if (!type) throw FabricError("provider '" + p.id + "': unknown vm type '" + key + "'");
    VmOffer o;
    o.vcpu = offer.value("vcpu", 1);
    o.ram_gib = offer.value("ram_gib", 1.0);
    o.price_per_hour = offer.at("price_per_hour").get<double>();
    if (o.price_per_hour <= 0)
      throw FabricError("provider '" + p.id + "': price must be strictly positive");
    p.vm_catalog[*type] = o;
  }
  p.provision_delay_ms = j.value("provision_delay_ms", SimTime{54 * kSecond});
  if (p.provision_delay_ms < 0) throw FabricError("provider '" + p.id + "': negative provision delay");
  p.base_latency_ms = j.value("base_latency_ms", SimTime{3});
  p.monitorable = j.value("monitorable", true);
  return p;
}

std::vector<ProviderProfile> parse_registry(const nlohmann::json& j) {
  const nlohmann::json* arr = &j;
  if (j.is_object() && j.contains("providers")) arr = &j.at("providers");
  if (!arr->is_array()) throw FabricError("registry must be an array of provider profiles");
  std::vector<ProviderProfile> out;
  for (const auto& item : *arr) out.push_back(provider_from_json(item));
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

Fabric::Fabric(std::uint64_t seed) : seed_(seed), rng_state_(seed ^ 0xa0761d6478bd642full) {}

void Fabric::schedule(SimTime at, std::function<void()> fn) {
  if (at < now_) throw FabricError("schedule in the past");
  queue_.push(Scheduled{at, next_seq_++, std::move(fn)});
}

void Fabric::run_until(SimTime t) {
  while (!queue_.empty() && queue_.top().at <= t) {
    Scheduled ev = queue_.top();
    queue_.pop();
    now_ = ev.at;
    ev.fn();
  }
  if (t > now_) now_ = t;
}

void Fabric::run_all(std::size_t max_events) {
  std::size_t dispatched = 0;
  while (!queue_.empty()) {
    if (++dispatched > max_events) throw FabricError("event budget exhausted");
    Scheduled ev = queue_.top();
    queue_.pop();
    now_ = ev.at;
    ev.fn();
  }
}

std::uint64_t Fabric::rand_below(std::uint64_t n) {
  if (n == 0) throw FabricError("rand_below(0)");
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = splitmix64(rng_state_);
  } while (x >= limit);
  return x % n;
}

void Fabric::add_provider(ProviderProfile p) {
  if (p.vm_catalog.empty()) throw FabricError("provider '" + p.id + "' has an empty vm_catalog");
  for (const auto& [type, offer] : p.vm_catalog) {
    (void)type;
    if (offer.price_per_hour <= 0)
      throw FabricError("provider '" + p.id + "': price must be strictly positive");
  }
  if (p.provision_delay_ms < 0) throw FabricError("provider '" + p.id + "': negative provision delay");
  providers_[p.id] = std::move(p);
}

const ProviderProfile& Fabric::provider(const std::string& id) const {
  auto it = providers_.find(id);
  if (it == providers_.end()) throw FabricError("unknown provider '" + id + "'");
  return it->second;
}

std::vector<ProviderProfile> Fabric::registry() const {
  std::vector<ProviderProfile> out;
  for (const auto& [id, p] : providers_) {
    (void)id;
    out.push_back(p);
  }
  return out;
}

std::pair<std::string, SimTime> Fabric::provision_node(const std::string& provider_id, VmType type) {
  const ProviderProfile& prov = provider(provider_id);
  if (!prov.vm_catalog.count(type))
    throw FabricError("provider '" + provider_id + "' does not offer vm type '" +
                      std::string(to_string(type)) + "'");
  char buf[16];
  std::snprintf(buf, sizeof buf, "n-%04" PRIu64, ++next_node_);
  std::string id = buf;
  SimNode n;
  n.id = id;
  n.provider = provider_id;
  n.vm_type = type;
  n.state = NodeState::provisioning;
  n.provisioned_at = now_;
  n.reachable_latency_ms = std::max<SimTime>(1, prov.base_latency_ms) +
                           static_cast<SimTime>(rand_below(3));
  nodes_[id] = n;
  SimTime ready_at = now_ + prov.provision_delay_ms;
  log_.append(now_, "fabric", "node-provisioning",
              {{"node", id}, {"provider", provider_id}, {"vm", to_string(type)}, {"ready_at", ready_at}});
  schedule(ready_at, [this, id] {
    auto it = nodes_.find(id);
    if (it == nodes_.end() || it->second.state != NodeState::provisioning) return;
    it->second.state = NodeState::running;
    it->second.running_since = now_;
    log_.append(now_, "fabric", "node-running", {{"node", id}, {"provider", it->second.provider}});
  });
  return {id, ready_at};
}

std::string Fabric::preprovision_node(const std::string& provider_id, VmType type, bool master_stack) {
  const ProviderProfile& prov = provider(provider_id);
  if (!prov.vm_catalog.count(type))
    throw FabricError("provider '" + provider_id + "' does not offer vm type '" +
                      std::string(to_string(type)) + "'");
  char buf[16];
  std::snprintf(buf, sizeof buf, "n-%04" PRIu64, ++next_node_);
  std::string id = buf;
  SimNode n;
  n.id = id;
  n.provider = provider_id;
  n.vm_type = type;
  n.state = NodeState::running;
  n.provisioned_at = now_;
  n.running_since = now_;
  n.master_stack = master_stack;
  n.reachable_latency_ms = std::max<SimTime>(1, prov.base_latency_ms) +
                           static_cast<SimTime>(rand_below(3));
  nodes_[id] = n;
  log_.append(now_, "fabric", "node-preprovisioned",
              {{"node", id}, {"provider", provider_id}, {"vm", to_string(type)},
               {"master_stack", master_stack}});
  return id;
}

SimNode& Fabric::node(const std::string& id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw FabricError("unknown node '" + id + "'");
  return it->second;
}

const SimNode& Fabric::node_at(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw FabricError("unknown node '" + id + "'");
  return it->second;
}

void Fabric::terminate_node(const std::string& id) {
  SimNode& n = node(id);
  if (n.state == NodeState::terminated) return;
  if (n.state == NodeState::running) n.billed_ms += now_ - n.running_since;
  n.state = NodeState::terminated;
  log_.append(now_, "fabric", "node-terminated", {{"node", id}});
}

void Fabric::inject_failure(const std::string& target, SimTime at) {
  bool is_node = nodes_.count(target) > 0;
  bool is_provider = providers_.count(target) > 0;
  if (!is_node && !is_provider) throw FabricError("unknown failure target '" + target + "'");
  schedule(at, [this, target, is_provider] {
    if (is_provider) {
      std::vector<std::string> victims;
      for (const auto& [id, n] : nodes_) {
        if (n.provider == target &&
            (n.state == NodeState::running || n.state == NodeState::provisioning))
          victims.push_back(id);
      }
      log_.append(now_, "fabric", "provider-failed", {{"provider", target}, {"nodes", victims}});
      for (const auto& id : victims) fail_node_now(id);
    } else {
      fail_node_now(target);
    }
  });
}

void Fabric::fail_node_now(const std::string& id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) return;
  SimNode& n = it->second;
  if (n.state == NodeState::failed || n.state == NodeState::terminated) return;
  if (n.state == NodeState::running) n.billed_ms += now_ - n.running_since;
  n.state = NodeState::failed;
  log_.append(now_, "fabric", "node-failed", {{"node", id}, {"provider", n.provider}});
  if (on_node_failed_) on_node_failed_(id);
}

std::optional<SimTime> Fabric::ping(const std::string& from, const std::string& to) const {
  const SimNode& src = node_at(from);
  if (!src.running()) throw FabricError("ping source '" + from + "' is not running");
  return probe(to);
}

std::optional<SimTime> Fabric::probe(const std::string& node_id) const {
  auto it = nodes_.find(node_id);
  if (it == nodes_.end() || !it->second.running()) return std::nullopt;
  return it->second.reachable_latency_ms;
}

void Fabric::send(const std::string& from_node, const std::string& to_node,
                  std::function<void()> fn) {
  auto target = nodes_.find(to_node);
  SimTime latency = target != nodes_.end() ? std::max<SimTime>(1, target->second.reachable_latency_ms)
                                           : 1;
  schedule(now_ + latency, [this, from_node, to_node, fn = std::move(fn)] {
    auto src = nodes_.find(from_node);
    auto dst = nodes_.find(to_node);
    if (src == nodes_.end() || !src->second.running()) return;
    if (dst == nodes_.end() || !dst->second.running()) return;
    fn();
  });
}

double Fabric::billed_cost(const SimNode& n) const {
  auto prov = providers_.find(n.provider);
  if (prov == providers_.end()) return 0;
  auto offer = prov->second.vm_catalog.find(n.vm_type);
  if (offer == prov->second.vm_catalog.end()) return 0;
  return to_hours(n.billed_ms) * offer->second.price_per_hour;
}

void Fabric::finalize() {
  if (finalized_) return;
  finalized_ = true;
  for (auto& [id, n] : nodes_) {
    if (n.state == NodeState::running || n.state == NodeState::provisioning) {
      if (n.state == NodeState::running) n.billed_ms += now_ - n.running_since;
      n.state = NodeState::terminated;
    }
    log_.append(now_, "fabric", "node-accounting",
                {{"node", id},
                 {"provider", n.provider},
                 {"state", to_string(n.state)},
                 {"billed_ms", n.billed_ms},
                 {"billed_cost", billed_cost(n)}});
  }
}

}  // namespace stratus
