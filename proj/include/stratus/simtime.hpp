#pragma once

#include <cstdint>

namespace stratus {

/// Simulated time in milliseconds since the start of a run.
using SimTime = std::int64_t;

constexpr SimTime kMillisecond = 1;
constexpr SimTime kSecond = 1000;
constexpr SimTime kMinute = 60 * kSecond;
constexpr SimTime kHour = 60 * kMinute;

constexpr double to_seconds(SimTime t) { return static_cast<double>(t) / 1000.0; }
constexpr double to_hours(SimTime t) { return static_cast<double>(t) / 3'600'000.0; }

}  // namespace stratus
