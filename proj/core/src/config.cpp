#include "avatarforge/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "avatarforge/errors.hpp"

namespace avatarforge {

namespace {

struct Cursor {
  const std::string& line;
  std::size_t pos = 0;
  std::size_t lineno = 0;

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(Errc::ConfigError, "line " + std::to_string(lineno) + ": " + message);
  }
  bool eol() const { return pos >= line.size(); }
  char peek() const { return line[pos]; }
  void skip_ws() {
    while (!eol() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  }
};

std::string parse_quoted(Cursor& c) {
  ++c.pos;  // opening quote
  std::string out;
  while (!c.eol() && c.peek() != '"') {
    char ch = c.peek();
    if (ch == '\\') {
      ++c.pos;
      if (c.eol()) c.fail("dangling escape");
      switch (c.peek()) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: c.fail("unsupported escape");
      }
    } else {
      out += ch;
    }
    ++c.pos;
  }
  if (c.eol()) c.fail("unterminated string");
  ++c.pos;  // closing quote
  return out;
}

std::string parse_key_segment(Cursor& c) {
  c.skip_ws();
  if (c.eol()) c.fail("expected key");
  if (c.peek() == '"') return parse_quoted(c);
  std::string out;
  while (!c.eol() &&
         (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '_' || c.peek() == '-'))
    out += c.line[c.pos++];
  if (out.empty()) c.fail("expected key");
  return out;
}

nlohmann::json parse_scalar(Cursor& c) {
  c.skip_ws();
  if (c.eol()) c.fail("expected value");
  if (c.peek() == '"') return nlohmann::json(parse_quoted(c));

  std::string token;
  while (!c.eol() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' && c.peek() != ' ' &&
         c.peek() != '\t')
    token += c.line[c.pos++];
  if (token == "true") return nlohmann::json(true);
  if (token == "false") return nlohmann::json(false);

  try {
    std::size_t used = 0;
    if (token.find_first_of(".eE") == std::string::npos &&
        token.find_first_not_of("+-0123456789") == std::string::npos) {
      const long long v = std::stoll(token, &used);
      if (used == token.size()) return nlohmann::json(v);
    } else {
      const double v = std::stod(token, &used);
      if (used == token.size()) return nlohmann::json(v);
    }
  } catch (const std::exception&) {
  }
  c.fail("cannot parse value '" + token + "'");
}

nlohmann::json parse_value(Cursor& c) {
  c.skip_ws();
  if (c.eol()) c.fail("expected value");
  if (c.peek() != '[') return parse_scalar(c);

  ++c.pos;  // '['
  nlohmann::json arr = nlohmann::json::array();
  c.skip_ws();
  if (!c.eol() && c.peek() == ']') {
    ++c.pos;
    return arr;
  }
  while (true) {
    arr.push_back(parse_scalar(c));
    c.skip_ws();
    if (c.eol()) c.fail("unterminated array");
    if (c.peek() == ',') {
      ++c.pos;
      c.skip_ws();
      continue;
    }
    if (c.peek() == ']') {
      ++c.pos;
      return arr;
    }
    c.fail("expected ',' or ']' in array");
  }
}

void expect_rest_empty(Cursor& c) {
  c.skip_ws();
  if (!c.eol() && c.peek() == '#') return;
  if (!c.eol()) c.fail("trailing characters");
}

}  // namespace

nlohmann::json parse_config_text(const std::string& text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* section = &root;

  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    Cursor c{raw, 0, lineno};
    c.skip_ws();
    if (c.eol() || c.peek() == '#') continue;

    if (c.peek() == '[') {
      ++c.pos;
      std::vector<std::string> segments;
      while (true) {
        segments.push_back(parse_key_segment(c));
        c.skip_ws();
        if (!c.eol() && c.peek() == '.') {
          ++c.pos;
          continue;
        }
        break;
      }
      if (c.eol() || c.peek() != ']') c.fail("expected ']'");
      ++c.pos;
      expect_rest_empty(c);

      section = &root;
      for (const std::string& seg : segments) {
        if (!section->contains(seg)) (*section)[seg] = nlohmann::json::object();
        else if (!(*section)[seg].is_object()) c.fail("section '" + seg + "' collides with a value");
        section = &(*section)[seg];
      }
      continue;
    }

    const std::string key = parse_key_segment(c);
    c.skip_ws();
    if (c.eol() || c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
    ++c.pos;
    nlohmann::json value = parse_value(c);
    expect_rest_empty(c);
    if (section->contains(key)) c.fail("duplicate key '" + key + "'");
    (*section)[key] = std::move(value);
  }
  return root;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void require_known_keys(const nlohmann::json& object, const std::set<std::string>& allowed,
                        const std::string& where) {
  for (const auto& [key, value] : object.items())
    if (!allowed.contains(key))
      throw Error(Errc::ConfigError, "unknown key '" + key + "' in " + where);
}

}  // namespace avatarforge
