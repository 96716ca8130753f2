#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "symmwig/cli.hpp"
#include "symmwig/errors.hpp"

namespace symmwig::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string where(int line) { return line > 0 ? "line " + std::to_string(line) + ": " : "manifest: "; }

template <typename T>
bool parses_as(std::string_view text) {
  T v{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  return ec == std::errc() && ptr == end;
}

std::vector<ConfigEntry> load_manifest(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("params") || !doc["params"].is_object())
    throw ValidationError("manifest: missing \"params\" object");
  std::vector<ConfigEntry> entries;
  if (doc.contains("subcommand") && doc["subcommand"].is_string())
    entries.push_back({"@subcommand", doc["subcommand"].get<std::string>(), 0});
  for (const auto& [key, value] : doc["params"].items()) {
    if (!value.is_string()) throw ValidationError("manifest: parameter '" + key + "' is not a string");
    entries.push_back({key, value.get<std::string>(), 0});
  }
  return entries;
}

}  // namespace

std::vector<ConfigEntry> load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return load_manifest(text);

  std::vector<ConfigEntry> entries;
  std::istringstream lines(text);
  std::string raw;
  int line = 0;
  while (std::getline(lines, raw)) {
    ++line;
    const std::string content = trim(raw.substr(0, raw.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ValidationError(where(line) + "expected key=value");
    ConfigEntry entry{trim(content.substr(0, eq)), trim(content.substr(eq + 1)), line};
    if (entry.key.empty()) throw ValidationError(where(line) + "empty key");
    if (entry.value.empty()) throw ValidationError(where(line) + "empty value for '" + entry.key + "'");
    const bool repeated = std::any_of(entries.begin(), entries.end(),
                                      [&](const ConfigEntry& e) { return e.key == entry.key; });
    if (repeated) throw ValidationError(where(line) + "duplicate key '" + entry.key + "'");
    entries.push_back(std::move(entry));
  }
  return entries;
}

ValueType value_type_of(const std::string& key) {
  static const std::map<std::string, ValueType> schema = {
      {"class", ValueType::String},    {"n", ValueType::Int},         {"m", ValueType::IntList},
      {"M", ValueType::Int},           {"sigma", ValueType::Double},  {"sigma2", ValueType::Double},
      {"family", ValueType::String},   {"samples", ValueType::UInt},  {"seed", ValueType::UInt},
      {"threads", ValueType::Int},     {"mode", ValueType::String},   {"method", ValueType::String},
      {"condition", ValueType::String}, {"filter", ValueType::String}, {"delta", ValueType::String},
      {"reading", ValueType::String},  {"budget", ValueType::UInt},   {"format", ValueType::String},
  };
  const auto it = schema.find(key);
  if (it == schema.end()) throw ValidationError("unknown key '" + key + "'");
  return it->second;
}

void check_value(const ConfigEntry& entry, ValueType type) {
  const std::string& v = entry.value;
  bool ok = true;
  switch (type) {
    case ValueType::Int: ok = parses_as<int>(v); break;
    case ValueType::UInt: ok = parses_as<std::uint64_t>(v); break;
    case ValueType::Double: ok = parses_as<double>(v); break;
    case ValueType::String: ok = !v.empty(); break;
    case ValueType::IntList: {
      std::string item;
      std::istringstream items(v);
      ok = false;
      while (items >> item) {
        ok = parses_as<int>(item);
        if (!ok) break;
      }
      break;
    }
  }
  if (!ok) throw ValidationError(where(entry.line) + "'" + entry.key + "' expects " +
                                 (type == ValueType::Int       ? "an integer"
                                  : type == ValueType::UInt    ? "a non-negative integer"
                                  : type == ValueType::Double  ? "a number"
                                  : type == ValueType::IntList ? "integers separated by spaces"
                                                               : "a value") +
                                 ", got '" + v + "'");
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json doc;
  doc["schema"] = "symmwig/1";
  doc["kind"] = "manifest";
  doc["subcommand"] = subcommand;
  doc["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) doc["params"][k] = v;
  doc["seed"] = seed;
  doc["version"] = version;
  doc["timestamp"] = timestamp;
  return doc.dump(2) + "\n";
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  if (ec != std::errc()) throw std::logic_error("number formatting failed");
  return std::string(buf, ptr);
}

}  // namespace symmwig::cli
