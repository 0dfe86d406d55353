#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lightray::cli {

// Bad command line or configuration; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter groups; a subcommand exposes the flags of the groups it uses.
enum Group : unsigned {
  kModel = 1u << 0,
  kGrid = 1u << 1,
  kSinogram = 1u << 2,
  kFilter = 1u << 3,
  kSlice = 1u << 4,
  kRadon = 1u << 5,
  kPhase = 1u << 6,
  kSurface = 1u << 7,
  kFoliation = 1u << 8,
  kShrink = 1u << 9,
  kVisibility = 1u << 10,
  kIo = 1u << 11,
  kAllGroups = ~0u,
};

// A tunable: the long flag --flag mirrors the key `key` in [section].
struct ParamDef {
  std::string flag;
  std::string section;
  std::string key;
  std::string fallback;
  std::string help;
  unsigned groups = 0;

  [[nodiscard]] std::string qualified() const { return section + "." + key; }
};

const std::vector<ParamDef>& param_table();

// section -> key -> raw value. Multi-word values are joined by single spaces.
using IniData = std::map<std::string, std::map<std::string, std::string>>;

IniData parse_ini(std::istream& in);
// Throws UsageError when the file cannot be opened.
IniData read_ini(const std::filesystem::path& path);

enum class Source { Default, Config, Flag };

struct Entry {
  std::string value;
  Source source = Source::Default;
};

// Every parameter of the table with its effective value.
class Settings {
 public:
  // Defaults, overridden by config entries, overridden by flags (keyed by
  // flag name). Unknown config keys or flags are usage errors.
  static Settings resolve(const IniData& config, const std::map<std::string, std::string>& flags);

  [[nodiscard]] const std::string& str(const std::string& qualified) const;
  [[nodiscard]] bool has(const std::string& qualified) const { return !str(qualified).empty(); }
  [[nodiscard]] double real(const std::string& qualified) const;
  [[nodiscard]] long integer(const std::string& qualified) const;
  [[nodiscard]] std::size_t count(const std::string& qualified) const;
  // Whitespace or comma separated lists.
  [[nodiscard]] std::vector<double> reals(const std::string& qualified) const;
  [[nodiscard]] std::vector<std::string> words(const std::string& qualified) const;

  void set(const std::string& qualified, std::string value, Source source);
  [[nodiscard]] const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

}  // namespace lightray::cli
