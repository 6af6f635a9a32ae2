#include "stratus/digest.hpp"
#include "stratus/types.hpp"

namespace stratus {

std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

std::string_view to_string(VmType t) {
  switch (t) {
    case VmType::micro: return "micro";
    case VmType::small: return "small";
    case VmType::medium: return "medium";
    case VmType::large: return "large";
  }
  return "?";
}

std::optional<VmType> parse_vm_type(std::string_view s) {
  if (s == "micro") return VmType::micro;
  if (s == "small") return VmType::small;
  if (s == "medium") return VmType::medium;
  if (s == "large") return VmType::large;
  return std::nullopt;
}

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::greater: return ">";
    case Comparator::less: return "<";
    case Comparator::greater_equal: return ">=";
    case Comparator::less_equal: return "<=";
  }
  return "?";
}

std::optional<Comparator> parse_comparator(std::string_view s) {
  if (s == ">") return Comparator::greater;
  if (s == "<") return Comparator::less;
  if (s == ">=") return Comparator::greater_equal;
  if (s == "<=") return Comparator::less_equal;
  return std::nullopt;
}

std::string_view to_string(ScaleAction a) {
  return a == ScaleAction::scale_out ? "scale-out" : "scale-in";
}

}  // namespace stratus
