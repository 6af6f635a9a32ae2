#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stratus/simtime.hpp"
#include "stratus/types.hpp"
#include "stratus/zip.hpp"

namespace stratus {

struct ManifestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Condition-action elasticity rule attached to one component.
/// Grammar: ("Scaling out" | "Scaling in") "when" <metric> <cmp> <number><unit>
/// with metric in {ResponseTime, RequestRate, CpuLoad}. The aggregation
/// window is not part of the grammar; the default applies.
struct ElasticityRule {
  std::string metric;
  Comparator comparator = Comparator::greater;
  double threshold = 0;  // canonical: ms for ResponseTime, /s for RequestRate, fraction for CpuLoad
  SimTime window_ms = 10 * kSecond;
  ScaleAction action = ScaleAction::scale_out;
  std::string text;  // original rule text, kept for serialization

  bool operator==(const ElasticityRule& o) const {
    return metric == o.metric && comparator == o.comparator && threshold == o.threshold &&
           window_ms == o.window_ms && action == o.action;
  }
};

/// One placement / computing / replication constraint, the (name, value) pair.
struct Constraint {
  enum class Kind { location, vm, replication };
  Kind kind = Kind::location;
  std::string location;    // kind == location
  VmType vm = VmType::small;  // kind == vm
  int replication = 1;     // kind == replication

  bool operator==(const Constraint&) const = default;
};

struct Wire {
  std::string source_component;
  std::string reference;
  std::string target_component;
  std::string target_service;

  bool operator==(const Wire&) const = default;
};

struct ComponentSpec {
  std::string name;
  std::string contribution;  // archive the implementation lives in
  std::vector<std::string> services;
  std::vector<std::pair<std::string, std::optional<std::string>>> references;  // name, target
  std::vector<Constraint> constraints;
  std::optional<ElasticityRule> elasticity;

  bool operator==(const ComponentSpec&) const = default;

  const Constraint* constraint(Constraint::Kind kind) const;
  /// Defaults: no @replication means 1, no @vm means small, no @location means any.
  int replication() const;
  VmType vm_type() const;
  std::optional<std::string> location() const;
};

struct ApplicationManifest {
  std::string name;
  std::vector<ComponentSpec> components;
  std::vector<Wire> wires;

  bool operator==(const ApplicationManifest&) const = default;

  const ComponentSpec* component(std::string_view name) const;
  /// First component declaring a service; the balancer fronts this one.
  const ComponentSpec* serving_component() const;
};

/// Parses the descriptor document (composite element tree). Unknown property
/// names, duplicate components, and dangling wire targets are rejected.
ApplicationManifest parse_manifest(std::string_view text);

/// Inverse of parse_manifest up to formatting; reparses structurally equal.
std::string serialize_manifest(const ApplicationManifest& m);

ElasticityRule parse_elasticity_rule(std::string_view text,
                                     SimTime default_window_ms = 10 * kSecond);

struct PackageReport {
  bool valid = false;
  std::vector<std::string> archives;  // nested contribution archives found
  std::vector<std::string> problems;
  std::optional<ApplicationManifest> manifest;
};

/// Checks a contribution package: at least one nested archive, one
/// descriptor named application.composite, and every
/// implementation.contribution reference resolves to a contained archive.
PackageReport validate_package(const ZipReader& archive);
PackageReport validate_package_bytes(std::string bytes);

}  // namespace stratus
