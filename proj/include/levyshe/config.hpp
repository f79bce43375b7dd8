#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace levyshe {

enum class KeyType
{
  integer,
  real,
  text,
  boolean,
  real_list,
  point_list, // "t:x,t:x"
  choice
};

struct KeySpec
{
  std::string name;
  KeyType type;
  std::string default_value;
  std::string help;
  std::vector<std::string> choices = {};
};

inline constexpr const char* kSeedEnvVar = "LEVYSHE_SEED";
inline constexpr const char* kVersion = "0.1.0";

const std::vector<std::string>& subcommand_names();
const std::vector<KeySpec>& schema_for(const std::string& subcommand);

/// Effective key/value settings of one subcommand. Every key of the schema
/// is present; values are stored normalized so that equal settings give equal
/// text. Precedence, lowest first: default, config file, flag, environment.
class Settings
{
public:
  explicit Settings(const std::string& subcommand);

  const std::string& subcommand() const { return subcommand_; }
  const std::vector<KeySpec>& schema() const { return *schema_; }

  /// Validates and stores a value; throws ConfigError for unknown keys or
  /// values that do not parse as the key's type.
  void set(const std::string& key, const std::string& raw, const std::string& source);

  const std::string& raw(const std::string& key) const;
  const std::string& source(const std::string& key) const;

  double real(const std::string& key) const;
  std::uint64_t integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::pair<double, double>> points(const std::string& key) const;

private:
  const KeySpec& spec(const std::string& key) const;

  std::string subcommand_;
  const std::vector<KeySpec>* schema_;
  std::map<std::string, std::pair<std::string, std::string>> values_;
};

/// Reads "key = value" lines ('#' starts a comment). Unknown or repeated keys
/// throw ConfigError; an unreadable file throws IoError.
void load_config_file(Settings& settings, const std::string& path);

} // namespace levyshe
