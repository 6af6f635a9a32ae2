#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stratus/events.hpp"
#include "stratus/simtime.hpp"
#include "stratus/types.hpp"

namespace stratus {

struct FabricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VmOffer {
  int vcpu = 1;
  double ram_gib = 1.0;
  double price_per_hour = 0.0;

  bool operator==(const VmOffer&) const = default;
};

/// Maps concrete VM characteristics onto the platform taxonomy.
/// Monotone: increasing both vcpu and ram never decreases the type.
VmType classify_vm(int vcpu, double ram_gib);

struct ProviderProfile {
  std::string id;
  std::string display_name;
  std::string location;
  std::map<VmType, VmOffer> vm_catalog;
  SimTime provision_delay_ms = 54 * kSecond;
  SimTime base_latency_ms = 3;
  bool monitorable = true;

  bool operator==(const ProviderProfile&) const = default;
};

nlohmann::json provider_to_json(const ProviderProfile& p);
ProviderProfile provider_from_json(const nlohmann::json& j);
/// Accepts either a JSON array of profiles or {"providers": [...]}.
std::vector<ProviderProfile> parse_registry(const nlohmann::json& j);

enum class NodeState { provisioning, running, failed, terminated };

std::string_view to_string(NodeState s);

struct SimNode {
  std::string id;
  std::string provider;
  VmType vm_type = VmType::small;
  NodeState state = NodeState::provisioning;
  std::vector<std::string> hosted_instances;
  SimTime reachable_latency_ms = 0;  // > 0 while running
  bool master_stack = false;         // platform stack installed (master-capable)

  SimTime provisioned_at = 0;
  SimTime running_since = -1;
  SimTime billed_ms = 0;

  bool running() const { return state == NodeState::running; }
};

/// Deterministic discrete-event fabric: the logical clock, the event queue,
/// the provider/node tables, failure injection, and the structured log.
/// All other modules run inside this loop as scheduled callbacks.
class Fabric {
 public:
  explicit Fabric(std::uint64_t seed);

  SimTime now() const { return now_; }
  std::uint64_t seed() const { return seed_; }

  /// Events at equal timestamps dispatch FIFO by insertion sequence.
  void schedule(SimTime at, std::function<void()> fn);
  void schedule_in(SimTime delay, std::function<void()> fn) { schedule(now_ + delay, std::move(fn)); }

  /// Dispatches every event with time <= t, then advances the clock to t.
  void run_until(SimTime t);
  /// Dispatches until the queue drains.
  void run_all(std::size_t max_events = 50'000'000);

  /// Uniform draw in [0, n). Uses a vendor-independent reduction so equal
  /// seeds give equal traces on any stdlib.
  std::uint64_t rand_below(std::uint64_t n);

  EventLog& log() { return log_; }
  const EventLog& log() const { return log_; }

  // providers
  void add_provider(ProviderProfile p);
  const ProviderProfile& provider(const std::string& id) const;
  bool has_provider(const std::string& id) const { return providers_.count(id) > 0; }
  const std::map<std::string, ProviderProfile>& providers() const { return providers_; }
  std::vector<ProviderProfile> registry() const;

  // nodes
  /// Creates a node in state provisioning; it becomes running after the
  /// provider's provision delay. Throws if the catalog lacks the type.
  /// Returns (node id, time the node will be running).
  std::pair<std::string, SimTime> provision_node(const std::string& provider_id, VmType type);
  /// A node that is already running at the current instant (preallocated
  /// resource). Billing starts now.
  std::string preprovision_node(const std::string& provider_id, VmType type,
                                bool master_stack = false);
  SimNode& node(const std::string& id);
  const SimNode& node_at(const std::string& id) const;
  bool has_node(const std::string& id) const { return nodes_.count(id) > 0; }
  const std::map<std::string, SimNode>& nodes() const { return nodes_; }
  void terminate_node(const std::string& id);

  /// Schedules failure of a node or of every node of a provider.
  /// Validates the target now; the failure lands at the given time.
  void inject_failure(const std::string& target, SimTime at);

  /// Reachable latency of `to` as seen from a running node. Unreachable is
  /// a value, not an error.
  std::optional<SimTime> ping(const std::string& from, const std::string& to) const;
  /// Probe from the fabric edge (load balancer vantage).
  std::optional<SimTime> probe(const std::string& node_id) const;

  /// One-way message: fn runs at now + latency(to) if both endpoints are
  /// still running at delivery; otherwise it is dropped silently.
  void send(const std::string& from_node, const std::string& to_node, std::function<void()> fn);

  /// Called after a node enters failed state.
  void set_failure_listener(std::function<void(const std::string& node_id)> fn) {
    on_node_failed_ = std::move(fn);
  }

  /// Terminates still-running nodes and closes billing; call once at the
  /// end of a run. Emits one accounting record per node.
  void finalize();

  double billed_cost(const SimNode& n) const;

 private:
  struct Scheduled {
    SimTime at;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Scheduled& a, const Scheduled& b) const {
      return a.at != b.at ? a.at > b.at : a.seq > b.seq;
    }
  };

  void fail_node_now(const std::string& id);

  std::uint64_t seed_;
  std::uint64_t rng_state_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_node_ = 0;
  std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue_;
  std::map<std::string, ProviderProfile> providers_;
  std::map<std::string, SimNode> nodes_;
  EventLog log_;
  std::function<void(const std::string&)> on_node_failed_;
  bool finalized_ = false;
};

}  // namespace stratus
