#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stratus/fabric.hpp"
#include "stratus/manifest.hpp"
#include "stratus/simtime.hpp"

namespace stratus {

struct DeployError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Placement {
  std::string component;
  int replica_index = 0;
  std::string provider_id;
  VmType vm_type = VmType::small;
  std::string rationale;

  bool operator==(const Placement& o) const {
    return component == o.component && replica_index == o.replica_index &&
           provider_id == o.provider_id && vm_type == o.vm_type;
  }
};

struct DeploymentPlan {
  std::string application;
  std::vector<Placement> placements;
};

enum class DeployStatus { validating, provisioning, deploying, active, failed };

std::string_view to_string(DeployStatus s);

struct DeploymentRecord {
  DeploymentPlan plan;
  DeployStatus status = DeployStatus::validating;
  std::map<int, std::string> node_ids;      // placement index -> node
  std::map<int, std::string> instance_ids;  // placement index -> live instance
  std::map<std::string, SimTime> phase_times;
};

/// component -> provider ids able to satisfy @location and @vm, sorted.
using CandidateSets = std::map<std::string, std::vector<std::string>>;

/// True when `value` names the provider's location, display name, or id.
/// Case-insensitive; underscores match spaces ("Amazon_Ireland" and
/// "Ireland" both match an Ireland-located Amazon provider).
bool location_matches(const ProviderProfile& provider, const std::string& value);

/// Throws DeployError naming the failing component and constraint when a
/// candidate set is empty or smaller than the replication count.
CandidateSets validate_constraints(const ApplicationManifest& manifest,
                                   const std::vector<ProviderProfile>& registry);

/// For each replica: restrict to lowest-price candidates for the
/// component's vm type, pick uniformly with the seeded draw, never reuse a
/// provider across replicas of one component.
DeploymentPlan choose_placement(const ApplicationManifest& manifest,
                                const CandidateSets& candidates,
                                const std::vector<ProviderProfile>& registry,
                                const std::function<std::uint64_t(std::uint64_t)>& rand_below);

/// Fabric-side effects the deployer needs; the runtime wires the real
/// instance registry and routing table behind these.
struct DeployHooks {
  std::function<std::optional<std::string>(const std::string& provider_id, VmType type)>
      find_reusable_node;
  std::function<std::string(const std::string& node_id, const std::string& application,
                            const std::string& component)>
      create_instance;
  std::function<void(const std::string& instance_id)> terminate_instance;
  std::function<void(const std::string& application, const std::string& instance_id,
                     const std::string& node_id, const std::string& provider_id)>
      register_route;
  std::function<void(const std::string& application, const std::string& instance_id)>
      deregister_route;
  std::function<void(const DeploymentRecord&)> on_settled;  // active or failed
};

/// Orchestrates plan execution inside the fabric loop: node provisioning,
/// platform stack, application deployment, routing registration. Failure
/// mid-deploy rolls the whole application back.
class Deployer {
 public:
  Deployer(Fabric& fabric, DeployHooks hooks, SimTime app_deploy_delay_ms = 5301)
      : fabric_(&fabric), hooks_(std::move(hooks)), app_deploy_delay_ms_(app_deploy_delay_ms) {}

  /// Starts executing; the record settles asynchronously on the fabric
  /// clock. Returned reference stays valid for the deployer's lifetime.
  DeploymentRecord& execute(const DeploymentPlan& plan);

  DeploymentRecord* record(const std::string& application);
  const std::map<std::string, DeploymentRecord>& records() const { return records_; }

  /// Node failure propagation from the fabric; aborts records with
  /// placements on the node unless already active.
  void handle_node_failure(const std::string& node_id);

 private:
  struct Pending {
    std::string application;
    int waiting_nodes = 0;
    bool aborted = false;
    std::uint64_t epoch = 0;
  };

  void start_deploy_phase(const std::string& application, std::uint64_t epoch);
  void abort(const std::string& application, const std::string& reason);
  void settle_active(const std::string& application, std::uint64_t epoch);

  Fabric* fabric_;
  DeployHooks hooks_;
  SimTime app_deploy_delay_ms_;
  std::map<std::string, DeploymentRecord> records_;
  std::map<std::string, Pending> pending_;
  std::uint64_t epoch_counter_ = 0;
};

}  // namespace stratus
