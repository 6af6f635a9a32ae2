#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratus {

/// Parse error with 1-based position in the source document.
struct XmlError : std::runtime_error {
  XmlError(int line, int col, const std::string& what)
      : std::runtime_error("xml: line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ": " + what),
        line(line),
        col(col) {}
  int line;
  int col;
};

/// Element tree for the descriptor subset: elements, attributes, character
/// data. No namespaces, no CDATA, no DTD.
struct XmlElement {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<XmlElement> children;
  std::string text;  // concatenated character data, entities resolved
  int line = 0;
  int col = 0;

  std::optional<std::string> attr(std::string_view key) const;
  std::vector<const XmlElement*> children_named(std::string_view name) const;
};

/// Parses a single-rooted document. Throws XmlError on malformed input.
XmlElement parse_xml(std::string_view text);

/// Escapes &, <, >, " for attribute/text positions.
std::string xml_escape(std::string_view s);

}  // namespace stratus
