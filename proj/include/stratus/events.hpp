#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stratus/simtime.hpp"

namespace stratus {

/// One structured log record: {time, actor, event, detail}.
struct LogRecord {
  SimTime time = 0;
  std::string actor;
  std::string event;
  nlohmann::json detail;
};

/// Append-only event log; append order is the dispatch order of the event
/// loop, so two runs with equal seeds produce byte-identical ndjson.
class EventLog {
 public:
  void append(SimTime time, std::string actor, std::string event,
              nlohmann::json detail = nlohmann::json::object());

  const std::vector<LogRecord>& records() const { return records_; }

  /// Newline-delimited JSON, one record per line.
  void write_ndjson(std::ostream& out) const;
  std::string to_ndjson() const;

  /// First record matching (actor filter may be empty = any).
  const LogRecord* find_first(std::string_view event, std::string_view actor = {}) const;
  std::vector<const LogRecord*> find_all(std::string_view event, std::string_view actor = {}) const;

 private:
  std::vector<LogRecord> records_;
};

}  // namespace stratus
