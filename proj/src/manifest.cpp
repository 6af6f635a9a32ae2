#include "stratus/manifest.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "stratus/xml.hpp"

namespace stratus {

const Constraint* ComponentSpec::constraint(Constraint::Kind kind) const {
  for (const auto& c : constraints) {
    if (c.kind == kind) return &c;
  }
  return nullptr;
}

int ComponentSpec::replication() const {
  const Constraint* c = constraint(Constraint::Kind::replication);
  return c ? c->replication : 1;
}

VmType ComponentSpec::vm_type() const {
  const Constraint* c = constraint(Constraint::Kind::vm);
  return c ? c->vm : VmType::small;
}

std::optional<std::string> ComponentSpec::location() const {
  const Constraint* c = constraint(Constraint::Kind::location);
  if (!c) return std::nullopt;
  return c->location;
}

const ComponentSpec* ApplicationManifest::component(std::string_view name) const {
  for (const auto& c : components) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const ComponentSpec* ApplicationManifest::serving_component() const {
  for (const auto& c : components) {
    if (!c.services.empty()) return &c;
  }
  return components.empty() ? nullptr : &components.front();
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail_at(const XmlElement& el, const std::string& what) {
  throw ManifestError("descriptor: line " + std::to_string(el.line) + ": " + what);
}

Constraint parse_property(const XmlElement& prop, const std::string& component) {
  auto name = prop.attr("name");
  if (!name) fail_at(prop, "property without name in component '" + component + "'");
  std::string value = trim(prop.text);
  Constraint c;
  if (*name == "location") {
    if (value.empty()) fail_at(prop, "empty location value");
    c.kind = Constraint::Kind::location;
    c.location = value;
  } else if (*name == "vm") {
    auto vm = parse_vm_type(value);
    if (!vm) fail_at(prop, "unknown vm type '" + value + "'");
    c.kind = Constraint::Kind::vm;
    c.vm = *vm;
  } else if (*name == "replication") {
    int n = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc() || p != value.data() + value.size() || n < 1)
      fail_at(prop, "replication must be an integer >= 1, got '" + value + "'");
    c.kind = Constraint::Kind::replication;
    c.replication = n;
  } else {
    fail_at(prop, "unknown property '" + *name + "' (allowed: location, vm, replication, elasticity)");
  }
  return c;
}

ComponentSpec parse_component(const XmlElement& el) {
  ComponentSpec spec;
  auto name = el.attr("name");
  if (!name) fail_at(el, "component without name");
  spec.name = *name;
  bool have_kind[3] = {false, false, false};
  for (const auto& child : el.children) {
    if (child.name == "implementation.contribution") {
      auto contribution = child.attr("contribution");
      if (!contribution) fail_at(child, "implementation.contribution without contribution attribute");
      if (!spec.contribution.empty()) fail_at(child, "duplicate implementation.contribution");
      spec.contribution = *contribution;
    } else if (child.name == "service") {
      auto sname = child.attr("name");
      if (!sname) fail_at(child, "service without name");
      spec.services.push_back(*sname);
    } else if (child.name == "reference") {
      auto rname = child.attr("name");
      if (!rname) fail_at(child, "reference without name");
      spec.references.emplace_back(*rname, child.attr("target"));
    } else if (child.name == "property") {
      auto pname = child.attr("name");
      if (pname && *pname == "elasticity") {
        if (spec.elasticity) fail_at(child, "duplicate elasticity rule");
        spec.elasticity = parse_elasticity_rule(trim(child.text));
      } else {
        Constraint c = parse_property(child, spec.name);
        int k = static_cast<int>(c.kind);
        if (have_kind[k]) fail_at(child, "duplicate constraint in component '" + spec.name + "'");
        have_kind[k] = true;
        spec.constraints.push_back(c);
      }
    } else {
      fail_at(child, "unknown element '" + child.name + "' in component '" + spec.name + "'");
    }
  }
  return spec;
}

}  // namespace

ApplicationManifest parse_manifest(std::string_view text) {
  XmlElement root;
  try {
    root = parse_xml(text);
  } catch (const XmlError& e) {
    throw ManifestError(std::string("descriptor: ") + e.what());
  }
  if (root.name != "composite") fail_at(root, "root element must be 'composite'");
  auto name = root.attr("name");
  if (!name || name->empty()) fail_at(root, "composite without name");

  ApplicationManifest m;
  m.name = *name;
  std::set<std::string> seen;
  for (const auto& child : root.children) {
    if (child.name != "composite" && child.name != "component")
      fail_at(child, "unknown element '" + child.name + "' under composite");
    if (child.name != "component") continue;
    ComponentSpec spec = parse_component(child);
    if (!seen.insert(spec.name).second)
      fail_at(child, "duplicate component name '" + spec.name + "'");
    m.components.push_back(std::move(spec));
  }
  if (m.components.empty()) throw ManifestError("descriptor: no components declared");

  // resolve wires
  for (const auto& comp : m.components) {
    for (const auto& [ref, target] : comp.references) {
      if (!target) continue;
      auto slash = target->find('/');
      if (slash == std::string::npos || slash == 0 || slash + 1 == target->size())
        throw ManifestError("descriptor: reference '" + comp.name + "." + ref +
                            "' target must be 'component/service', got '" + *target + "'");
      std::string tcomp = target->substr(0, slash);
      std::string tsvc = target->substr(slash + 1);
      const ComponentSpec* tc = m.component(tcomp);
      if (!tc)
        throw ManifestError("descriptor: reference '" + comp.name + "." + ref +
                            "' targets unknown component '" + tcomp + "'");
      bool has_service = false;
      for (const auto& s : tc->services) has_service |= (s == tsvc);
      if (!has_service)
        throw ManifestError("descriptor: reference '" + comp.name + "." + ref +
                            "' targets undeclared service '" + tcomp + "/" + tsvc + "'");
      m.wires.push_back(Wire{comp.name, ref, tcomp, tsvc});
    }
  }
  return m;
}

std::string serialize_manifest(const ApplicationManifest& m) {
  std::ostringstream out;
  out << "<composite name=\"" << xml_escape(m.name) << "\">\n";
  for (const auto& c : m.components) {
    out << "  <component name=\"" << xml_escape(c.name) << "\">\n";
    if (!c.contribution.empty())
      out << "    <implementation.contribution contribution=\"" << xml_escape(c.contribution)
          << "\"/>\n";
    for (const auto& s : c.services) out << "    <service name=\"" << xml_escape(s) << "\"/>\n";
    for (const auto& [ref, target] : c.references) {
      out << "    <reference name=\"" << xml_escape(ref) << "\"";
      if (target) out << " target=\"" << xml_escape(*target) << "\"";
      out << "/>\n";
    }
    for (const auto& constraint : c.constraints) {
      switch (constraint.kind) {
        case Constraint::Kind::location:
          out << "    <property name=\"location\">" << xml_escape(constraint.location)
              << "</property>\n";
          break;
        case Constraint::Kind::vm:
          out << "    <property name=\"vm\">" << to_string(constraint.vm) << "</property>\n";
          break;
        case Constraint::Kind::replication:
          out << "    <property name=\"replication\">" << constraint.replication
              << "</property>\n";
          break;
      }
    }
    if (c.elasticity)
      out << "    <property name=\"elasticity\">" << xml_escape(c.elasticity->text)
          << "</property>\n";
    out << "  </component>\n";
  }
  out << "</composite>\n";
  return out.str();
}

namespace {

struct RuleCursor {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool consume_word(std::string_view word) {
    skip_ws();
    if (text.substr(pos).starts_with(word)) {
      std::size_t end = pos + word.size();
      if (end == text.size() || std::isspace(static_cast<unsigned char>(text[end]))) {
        pos = end;
        return true;
      }
    }
    return false;
  }

  std::string next_token() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    return std::string(text.substr(start, pos - start));
  }

  bool done() {
    skip_ws();
    return pos >= text.size();
  }
};

}  // namespace

ElasticityRule parse_elasticity_rule(std::string_view text, SimTime default_window_ms) {
  ElasticityRule rule;
  rule.text = trim(text);
  rule.window_ms = default_window_ms;
  RuleCursor cur{rule.text};

  if (!cur.consume_word("Scaling"))
    throw ManifestError("elasticity rule must start with 'Scaling out' or 'Scaling in': '" +
                        rule.text + "'");
  if (cur.consume_word("out"))
    rule.action = ScaleAction::scale_out;
  else if (cur.consume_word("in"))
    rule.action = ScaleAction::scale_in;
  else
    throw ManifestError("expected 'out' or 'in' after 'Scaling': '" + rule.text + "'");
  if (!cur.consume_word("when"))
    throw ManifestError("expected 'when' in elasticity rule: '" + rule.text + "'");

  rule.metric = cur.next_token();
  if (rule.metric != "ResponseTime" && rule.metric != "RequestRate" && rule.metric != "CpuLoad")
    throw ManifestError("unknown metric '" + rule.metric +
                        "' (allowed: ResponseTime, RequestRate, CpuLoad)");

  std::string cmp_tok = cur.next_token();
  auto cmp = parse_comparator(cmp_tok);
  if (!cmp) throw ManifestError("unknown comparator '" + cmp_tok + "' in rule: '" + rule.text + "'");
  rule.comparator = *cmp;

  std::string value_tok = cur.next_token();
  if (value_tok.empty()) throw ManifestError("missing threshold in rule: '" + rule.text + "'");
  std::size_t unit_start = 0;
  while (unit_start < value_tok.size() &&
         (std::isdigit(static_cast<unsigned char>(value_tok[unit_start])) ||
          value_tok[unit_start] == '.' || value_tok[unit_start] == '-' ||
          value_tok[unit_start] == '+'))
    ++unit_start;
  std::string number = value_tok.substr(0, unit_start);
  std::string unit = value_tok.substr(unit_start);
  double raw = 0;
  try {
    std::size_t consumed = 0;
    raw = std::stod(number, &consumed);
    if (consumed != number.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ManifestError("bad threshold number '" + value_tok + "' in rule: '" + rule.text + "'");
  }
  if (raw <= 0) throw ManifestError("threshold must be positive in rule: '" + rule.text + "'");

  if (rule.metric == "ResponseTime") {
    if (unit == "s")
      rule.threshold = raw * 1000.0;
    else if (unit == "ms")
      rule.threshold = raw;
    else
      throw ManifestError("ResponseTime threshold needs unit s or ms, got '" + value_tok + "'");
  } else if (rule.metric == "RequestRate") {
    if (unit == "/s")
      rule.threshold = raw;
    else
      throw ManifestError("RequestRate threshold needs unit /s, got '" + value_tok + "'");
  } else {  // CpuLoad
    if (unit == "%")
      rule.threshold = raw / 100.0;
    else
      throw ManifestError("CpuLoad threshold needs unit %, got '" + value_tok + "'");
  }

  if (!cur.done())
    throw ManifestError("trailing content in elasticity rule: '" + rule.text + "'");
  return rule;
}

PackageReport validate_package(const ZipReader& archive) {
  PackageReport report;
  bool has_descriptor = false;
  for (const auto& e : archive.entries()) {
    if (e.is_dir()) continue;
    if (e.name == "application.composite") has_descriptor = true;
    if (e.name.size() > 4 && e.name.substr(e.name.size() - 4) == ".zip" &&
        e.name.find('/') == std::string::npos)
      report.archives.push_back(e.name);
  }
  if (report.archives.empty())
    report.problems.push_back("package contains no nested contribution archive (*.zip)");
  if (!has_descriptor) {
    report.problems.push_back("package contains no application.composite descriptor");
    report.valid = false;
    return report;
  }

  try {
    ApplicationManifest m = parse_manifest(archive.read("application.composite"));
    for (const auto& c : m.components) {
      if (c.contribution.empty()) continue;
      bool found = false;
      for (const auto& a : report.archives) found |= (a == c.contribution);
      if (!found)
        report.problems.push_back("component '" + c.name + "' references absent archive '" +
                                  c.contribution + "'");
    }
    report.manifest = std::move(m);
  } catch (const ManifestError& e) {
    report.problems.push_back(e.what());
  }
  report.valid = report.problems.empty();
  return report;
}

PackageReport validate_package_bytes(std::string bytes) {
  return validate_package(ZipReader::from_bytes(std::move(bytes)));
}

}  // namespace stratus
