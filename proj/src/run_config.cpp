#include "lentp/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "lentp/types.hpp"

namespace lentp {
namespace {

[[noreturn]] void fail(int line, int column, const std::string& what) {
  throw Error(ErrorKind::Parse,
              std::to_string(line) + ":" + std::to_string(column) + ": " + what);
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         c == '+' || c == '/';
}

class LineScanner {
 public:
  LineScanner(const std::string& text, int line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  int column() const { return static_cast<int>(pos_) + 1; }
  void expect(char c) {
    if (peek() != c) fail(line_, column(), std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_word_char(text_[pos_])) ++pos_;
    if (pos_ == start) fail(line_, column(), "expected a name");
    return text_.substr(start, pos_ - start);
  }
  std::string item() {
    skip_space();
    if (peek() == '"') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
      if (pos_ >= text_.size()) fail(line_, column(), "unterminated string");
      std::string out = text_.substr(start, pos_ - start);
      ++pos_;
      return out;
    }
    return identifier();
  }

 private:
  const std::string& text_;
  int line_;
  std::size_t pos_ = 0;
};

const ConfigValue& lookup(const std::map<std::string, RunConfig::Section>& sections,
                          const std::string& section, const std::string& key) {
  const auto s = sections.find(section);
  if (s == sections.end()) fail(0, 0, "missing section [" + section + "]");
  const auto v = s->second.find(key);
  if (v == s->second.end()) fail(0, 0, "missing key '" + key + "' in [" + section + "]");
  return v->second;
}

double to_number(const std::string& s, const ConfigValue& v) {
  double out = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) fail(v.line, v.column, "not a number: '" + s + "'");
  return out;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    LineScanner scan(raw, line);
    if (scan.at_end()) continue;
    if (scan.peek() == '[') {
      scan.expect('[');
      current = scan.identifier();
      scan.expect(']');
      if (!scan.at_end()) fail(line, scan.column(), "trailing text after section header");
      if (cfg.sections_.count(current)) fail(line, 1, "duplicate section [" + current + "]");
      cfg.sections_[current];
      continue;
    }
    const int key_column = scan.column();
    const std::string key = scan.identifier();
    if (current.empty()) fail(line, key_column, "key outside of any section");
    scan.expect('=');
    ConfigValue value;
    value.line = line;
    value.key_column = key_column;
    value.column = scan.column();
    if (scan.at_end()) fail(line, scan.column(), "missing value");
    if (scan.peek() == '[') {
      scan.expect('[');
      value.is_array = true;
      if (scan.peek() != ']') {
        for (;;) {
          value.items.push_back(scan.item());
          if (scan.peek() == ',') {
            scan.expect(',');
            continue;
          }
          break;
        }
      }
      scan.expect(']');
    } else {
      value.items.push_back(scan.item());
    }
    if (!scan.at_end()) fail(line, scan.column(), "unexpected trailing text");
    auto& section = cfg.sections_[current];
    if (section.count(key)) fail(line, key_column, "duplicate key '" + key + "'");
    section[key] = std::move(value);
  }
  return cfg;
}

bool RunConfig::has_section(const std::string& name) const { return sections_.count(name) > 0; }

const RunConfig::Section& RunConfig::section(const std::string& name) const {
  const auto s = sections_.find(name);
  if (s == sections_.end()) fail(0, 0, "missing section [" + name + "]");
  return s->second;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

double RunConfig::number(const std::string& section, const std::string& key) const {
  const ConfigValue& v = lookup(sections_, section, key);
  if (v.is_array) fail(v.line, v.column, "expected a number, found an array");
  return to_number(v.items.front(), v);
}

double RunConfig::number(const std::string& section, const std::string& key,
                         double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

std::string RunConfig::word(const std::string& section, const std::string& key) const {
  const ConfigValue& v = lookup(sections_, section, key);
  if (v.is_array) fail(v.line, v.column, "expected a word, found an array");
  return v.items.front();
}

std::string RunConfig::word(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  return has(section, key) ? word(section, key) : fallback;
}

std::vector<double> RunConfig::numbers(const std::string& section, const std::string& key,
                                       const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  const ConfigValue& v = lookup(sections_, section, key);
  std::vector<double> out;
  for (const auto& item : v.items) out.push_back(to_number(item, v));
  return out;
}

std::vector<std::string> RunConfig::words(const std::string& section, const std::string& key,
                                          const std::vector<std::string>& fallback) const {
  if (!has(section, key)) return fallback;
  return lookup(sections_, section, key).items;
}

void RunConfig::require_keys(const std::string& section,
                             const std::vector<std::string>& allowed) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return;
  for (const auto& [key, value] : s->second) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(value.line, value.key_column,
           "unknown key '" + key + "' in [" + section + "]");
    }
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace lentp
