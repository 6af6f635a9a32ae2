#include "stratus/events.hpp"

#include <ostream>
#include <sstream>

namespace stratus {

void EventLog::append(SimTime time, std::string actor, std::string event,
                      nlohmann::json detail) {
  records_.push_back(LogRecord{time, std::move(actor), std::move(event), std::move(detail)});
}

void EventLog::write_ndjson(std::ostream& out) const {
  for (const auto& r : records_) {
    nlohmann::json j{{"time", r.time}, {"actor", r.actor}, {"event", r.event}, {"detail", r.detail}};
    out << j.dump() << '\n';
  }
}

std::string EventLog::to_ndjson() const {
  std::ostringstream os;
  write_ndjson(os);
  return os.str();
}

const LogRecord* EventLog::find_first(std::string_view event, std::string_view actor) const {
  for (const auto& r : records_) {
    if (r.event == event && (actor.empty() || r.actor == actor)) return &r;
  }
  return nullptr;
}

std::vector<const LogRecord*> EventLog::find_all(std::string_view event,
                                                 std::string_view actor) const {
  std::vector<const LogRecord*> out;
  for (const auto& r : records_) {
    if (r.event == event && (actor.empty() || r.actor == actor)) out.push_back(&r);
  }
  return out;
}

}  // namespace stratus
