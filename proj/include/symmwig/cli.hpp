#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace symmwig::cli {

/// One `key=value` setting with the line it came from (0 for manifest entries).
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// Reads a key=value file ('#' comments, blank lines allowed) or a run manifest (JSON).
/// Throws ValidationError naming the line for malformed lines; unknown keys and type
/// mismatches are reported by dispatch, which knows the subcommand.
std::vector<ConfigEntry> load_config(const std::filesystem::path& path);

enum class ValueType { Int, UInt, Double, String, IntList };

/// Type of a recognized key; ValidationError for an unknown key.
ValueType value_type_of(const std::string& key);
/// ValidationError("line L: ...") if `value` does not parse as `type`.
void check_value(const ConfigEntry& entry, ValueType type);

struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> params;  // resolved, as strings
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;  // ISO 8601, UTC

  std::string to_json() const;
};

/// 12 significant digits, '.', no locale.
std::string format_number(double value);

/// Runs one command line. Returns 0 on success, 1 on validation or usage errors, 2 when a
/// computation exceeds its budget. Tables go to `out` unless --out is given.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace symmwig::cli
