#pragma once

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stratus {

/// Platform VM taxonomy, totally ordered micro < small < medium < large.
enum class VmType { micro = 0, small = 1, medium = 2, large = 3 };

std::string_view to_string(VmType t);
std::optional<VmType> parse_vm_type(std::string_view s);

enum class Comparator { greater, less, greater_equal, less_equal };

std::string_view to_string(Comparator c);
std::optional<Comparator> parse_comparator(std::string_view s);

constexpr bool compare(Comparator c, double lhs, double rhs) {
  switch (c) {
    case Comparator::greater: return lhs > rhs;
    case Comparator::less: return lhs < rhs;
    case Comparator::greater_equal: return lhs >= rhs;
    case Comparator::less_equal: return lhs <= rhs;
  }
  return false;
}

enum class ScaleAction { scale_out, scale_in };

std::string_view to_string(ScaleAction a);

}  // namespace stratus
