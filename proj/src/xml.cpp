#include "stratus/xml.hpp"

#include <cctype>

namespace stratus {

std::optional<std::string> XmlElement::attr(std::string_view key) const {
  for (const auto& [k, v] : attrs) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::vector<const XmlElement*> XmlElement::children_named(std::string_view name) const {
  std::vector<const XmlElement*> out;
  for (const auto& c : children) {
    if (c.name == name) out.push_back(&c);
  }
  return out;
}

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  bool starts_with(std::string_view s) const { return text_.substr(pos_).starts_with(s); }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip(std::size_t n) {
    for (std::size_t i = 0; i < n && !eof(); ++i) advance();
  }

  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  [[noreturn]] void fail(const std::string& what) const { throw XmlError(line_, col_, what); }

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

std::string read_name(Cursor& cur) {
  if (cur.eof() || !is_name_start(cur.peek())) cur.fail("expected name");
  std::string name;
  while (!cur.eof() && is_name_char(cur.peek())) name.push_back(cur.advance());
  return name;
}

void append_entity(Cursor& cur, std::string& out) {
  // cur sits just past '&'
  std::string ent;
  while (!cur.eof() && cur.peek() != ';') {
    ent.push_back(cur.advance());
    if (ent.size() > 8) cur.fail("unterminated entity reference");
  }
  if (cur.eof()) cur.fail("unterminated entity reference");
  cur.advance();  // ';'
  if (ent == "lt")
    out.push_back('<');
  else if (ent == "gt")
    out.push_back('>');
  else if (ent == "amp")
    out.push_back('&');
  else if (ent == "quot")
    out.push_back('"');
  else if (ent == "apos")
    out.push_back('\'');
  else
    cur.fail("unknown entity '&" + ent + ";'");
}

std::string read_attr_value(Cursor& cur) {
  if (cur.eof() || (cur.peek() != '"' && cur.peek() != '\'')) cur.fail("expected quoted value");
  char quote = cur.advance();
  std::string value;
  while (true) {
    if (cur.eof()) cur.fail("unterminated attribute value");
    char c = cur.peek();
    if (c == quote) {
      cur.advance();
      return value;
    }
    if (c == '<') cur.fail("'<' in attribute value");
    if (c == '&') {
      cur.advance();
      append_entity(cur, value);
    } else {
      value.push_back(cur.advance());
    }
  }
}

void skip_comment(Cursor& cur) {
  // cur sits at "<!--"
  cur.skip(4);
  while (!cur.eof()) {
    if (cur.starts_with("-->")) {
      cur.skip(3);
      return;
    }
    cur.advance();
  }
  cur.fail("unterminated comment");
}

XmlElement parse_element(Cursor& cur) {
  if (cur.eof() || cur.peek() != '<') cur.fail("expected element");
  XmlElement el;
  el.line = cur.line();
  el.col = cur.col();
  cur.advance();  // '<'
  el.name = read_name(cur);

  // attributes
  while (true) {
    cur.skip_ws();
    if (cur.eof()) cur.fail("unterminated start tag");
    if (cur.peek() == '/') {
      cur.advance();
      if (cur.eof() || cur.peek() != '>') cur.fail("expected '>' after '/'");
      cur.advance();
      return el;  // self-closing
    }
    if (cur.peek() == '>') {
      cur.advance();
      break;
    }
    std::string key = read_name(cur);
    cur.skip_ws();
    if (cur.eof() || cur.peek() != '=') cur.fail("expected '=' after attribute name");
    cur.advance();
    cur.skip_ws();
    std::string value = read_attr_value(cur);
    for (const auto& [k, v] : el.attrs) {
      if (k == key) cur.fail("duplicate attribute '" + key + "'");
    }
    el.attrs.emplace_back(std::move(key), std::move(value));
  }

  // content
  while (true) {
    if (cur.eof()) cur.fail("unterminated element '" + el.name + "'");
    char c = cur.peek();
    if (c == '<') {
      if (cur.starts_with("<!--")) {
        skip_comment(cur);
        continue;
      }
      if (cur.starts_with("</")) {
        cur.skip(2);
        std::string closing = read_name(cur);
        if (closing != el.name)
          cur.fail("mismatched closing tag '" + closing + "', expected '" + el.name + "'");
        cur.skip_ws();
        if (cur.eof() || cur.peek() != '>') cur.fail("expected '>' in closing tag");
        cur.advance();
        return el;
      }
      el.children.push_back(parse_element(cur));
    } else if (c == '&') {
      cur.advance();
      append_entity(cur, el.text);
    } else {
      el.text.push_back(cur.advance());
    }
  }
}

}  // namespace

XmlElement parse_xml(std::string_view text) {
  Cursor cur(text);
  cur.skip_ws();
  if (cur.starts_with("<?")) {
    while (!cur.eof() && !cur.starts_with("?>")) cur.advance();
    if (cur.eof()) cur.fail("unterminated xml declaration");
    cur.skip(2);
  }
  cur.skip_ws();
  while (cur.starts_with("<!--")) {
    skip_comment(cur);
    cur.skip_ws();
  }
  if (cur.eof()) cur.fail("empty document");
  XmlElement root = parse_element(cur);
  cur.skip_ws();
  while (cur.starts_with("<!--")) {
    skip_comment(cur);
    cur.skip_ws();
  }
  if (!cur.eof()) cur.fail("trailing content after document root");
  return root;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace stratus
