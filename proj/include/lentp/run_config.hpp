#ifndef LENTP_RUN_CONFIG_HPP
#define LENTP_RUN_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lentp {

// Grammar, one statement per line:
//   [section]
//   key = value        value: number | word | "string" | [item, item, ...]
//   # comment          (also trailing, outside quotes)
struct ConfigValue {
  std::vector<std::string> items;  // one item for scalars
  bool is_array = false;
  int line = 0;
  int column = 0;
  int key_column = 0;
};

class RunConfig {
 public:
  using Section = std::map<std::string, ConfigValue>;

  static RunConfig parse(const std::string& text);

  bool has_section(const std::string& name) const;
  const Section& section(const std::string& name) const;
  bool has(const std::string& section, const std::string& key) const;

  double number(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  std::string word(const std::string& section, const std::string& key) const;
  std::string word(const std::string& section, const std::string& key,
                   const std::string& fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key,
                              const std::vector<double>& fallback) const;
  std::vector<std::string> words(const std::string& section, const std::string& key,
                                 const std::vector<std::string>& fallback) const;

  /// Throws Error(Parse) naming the first key of `section` outside `allowed`.
  void require_keys(const std::string& section, const std::vector<std::string>& allowed) const;

  const std::map<std::string, Section>& sections() const { return sections_; }

 private:
  std::map<std::string, Section> sections_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

}  // namespace lentp

#endif  // LENTP_RUN_CONFIG_HPP
