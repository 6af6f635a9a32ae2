#include "stratus/statestore.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace stratus {

void MemoryStateStore::put(const std::string& key, const nlohmann::json& value) {
  data_[key] = value.dump();
}

std::optional<nlohmann::json> MemoryStateStore::get(const std::string& key) const {
  auto it = data_.find(key);
  if (it == data_.end()) return std::nullopt;
  return nlohmann::json::parse(it->second, nullptr, false);
}

bool MemoryStateStore::compare_and_set(const std::string& key,
                                       const std::optional<nlohmann::json>& expected,
                                       const nlohmann::json& value) {
  auto current = get(key);
  if (current != expected) return false;
  put(key, value);
  return true;
}

std::vector<std::string> MemoryStateStore::list(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : data_) {
    (void)v;
    if (k.compare(0, prefix.size(), prefix) == 0) out.push_back(k);
  }
  return out;
}

void MemoryStateStore::remove(const std::string& key) { data_.erase(key); }

void MemoryStateStore::corrupt(const std::string& key, std::string bytes) {
  data_[key] = std::move(bytes);
}

FileStateStore::FileStateStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path FileStateStore::path_for(const std::string& key) const {
  for (char c : key) {
    if (c == '/' || c == '\\' || c == '.') throw std::invalid_argument("bad store key: " + key);
  }
  return dir_ / (key + ".json");
}

void FileStateStore::put(const std::string& key, const nlohmann::json& value) {
  std::ofstream out(path_for(key), std::ios::trunc);
  if (!out) throw std::runtime_error("state store: cannot write " + key);
  out << value.dump(2) << '\n';
}

std::optional<nlohmann::json> FileStateStore::get(const std::string& key) const {
  std::ifstream in(path_for(key));
  if (!in) return std::nullopt;
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  return j;
}

bool FileStateStore::compare_and_set(const std::string& key,
                                     const std::optional<nlohmann::json>& expected,
                                     const nlohmann::json& value) {
  auto current = get(key);
  if (current != expected) return false;
  put(key, value);
  return true;
}

std::vector<std::string> FileStateStore::list(const std::string& prefix) const {
  std::vector<std::string> out;
  if (!std::filesystem::exists(dir_)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name.size() <= 5 || name.substr(name.size() - 5) != ".json") continue;
    std::string key = name.substr(0, name.size() - 5);
    if (key.compare(0, prefix.size(), prefix) == 0) out.push_back(key);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void FileStateStore::remove(const std::string& key) {
  std::error_code ec;
  std::filesystem::remove(path_for(key), ec);
}

}  // namespace stratus
