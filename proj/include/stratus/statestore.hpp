#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace stratus {

/// External shared state medium for service discovery and checkpoints.
/// compare_and_set is the only synchronization primitive masters rely on.
class StateStore {
 public:
  virtual ~StateStore() = default;

  virtual void put(const std::string& key, const nlohmann::json& value) = 0;
  virtual std::optional<nlohmann::json> get(const std::string& key) const = 0;
  /// Atomically writes `value` iff the current content equals `expected`
  /// (nullopt = key absent). Returns false without writing otherwise.
  virtual bool compare_and_set(const std::string& key,
                               const std::optional<nlohmann::json>& expected,
                               const nlohmann::json& value) = 0;
  virtual std::vector<std::string> list(const std::string& prefix) const = 0;
  virtual void remove(const std::string& key) = 0;
};

class MemoryStateStore : public StateStore {
 public:
  void put(const std::string& key, const nlohmann::json& value) override;
  std::optional<nlohmann::json> get(const std::string& key) const override;
  bool compare_and_set(const std::string& key, const std::optional<nlohmann::json>& expected,
                       const nlohmann::json& value) override;
  std::vector<std::string> list(const std::string& prefix) const override;
  void remove(const std::string& key) override;

  /// Test hook: replaces the raw stored bytes so digest checks can see
  /// corruption.
  void corrupt(const std::string& key, std::string bytes);

 private:
  std::map<std::string, std::string> data_;  // key -> serialized json
};

/// One file per key: <dir>/<key>.json.
class FileStateStore : public StateStore {
 public:
  explicit FileStateStore(std::filesystem::path dir);

  void put(const std::string& key, const nlohmann::json& value) override;
  std::optional<nlohmann::json> get(const std::string& key) const override;
  bool compare_and_set(const std::string& key, const std::optional<nlohmann::json>& expected,
                       const nlohmann::json& value) override;
  std::vector<std::string> list(const std::string& prefix) const override;
  void remove(const std::string& key) override;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;
  std::filesystem::path dir_;
};

}  // namespace stratus
