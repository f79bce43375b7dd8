#include "levyshe/config.hpp"

#include "levyshe/emit.hpp"
#include "levyshe/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace levyshe {

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  if (trim(s).empty())
    return out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    out.push_back(trim(cur));
  return out;
}

double to_real(const std::string& key, const std::string& s)
{
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("key '" + key + "' expects a finite number, got '" + s + "'");
  return v;
}

std::uint64_t to_integer(const std::string& key, const std::string& s)
{
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("key '" + key + "' expects a nonnegative integer, got '" + s + "'");
  return v;
}

std::string join(const std::vector<std::string>& parts, char sep)
{
  std::string out;
  for (std::size_t j = 0; j < parts.size(); ++j) {
    if (j)
      out += sep;
    out += parts[j];
  }
  return out;
}

std::string normalize(const KeySpec& k, const std::string& raw)
{
  const std::string v = trim(raw);
  switch (k.type) {
    case KeyType::integer:
      return std::to_string(to_integer(k.name, v));
    case KeyType::real:
      return format_double(to_real(k.name, v));
    case KeyType::boolean:
      if (v == "true" || v == "1")
        return "true";
      if (v == "false" || v == "0")
        return "false";
      throw ConfigError("key '" + k.name + "' expects true or false, got '" + v + "'");
    case KeyType::real_list: {
      std::vector<std::string> parts;
      for (const auto& p : split(v, ','))
        parts.push_back(format_double(to_real(k.name, p)));
      return join(parts, ',');
    }
    case KeyType::point_list: {
      std::vector<std::string> parts;
      for (const auto& p : split(v, ',')) {
        const auto tx = split(p, ':');
        if (tx.size() != 2)
          throw ConfigError("key '" + k.name + "' expects t:x pairs, got '" + p + "'");
        parts.push_back(format_double(to_real(k.name, tx[0])) + ":" +
                        format_double(to_real(k.name, tx[1])));
      }
      return join(parts, ',');
    }
    case KeyType::choice:
      if (std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end())
        throw ConfigError("key '" + k.name + "' must be one of " + join(k.choices, '|') +
                          ", got '" + v + "'");
      return v;
    case KeyType::text:
      if (k.name == "run_id") {
        if (v.empty() || v.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
                                             "0123456789_.-") != std::string::npos)
          throw ConfigError("run_id may only use letters, digits, '_', '.' and '-'");
      }
      return v;
  }
  return v;
}

std::vector<KeySpec> exponent_keys()
{
  return {
    { "exponent", KeyType::choice, "power",
      "power: Phi(n) = c|n|^alpha + i drift n; mixed: c|n|^alpha + c2|n|^beta",
      { "power", "mixed" } },
    { "c", KeyType::real, "1", "coefficient of |n|^alpha" },
    { "alpha", KeyType::real, "2", "lower power, in (1, 2]" },
    { "drift", KeyType::real, "0", "drift of the power exponent" },
    { "c2", KeyType::real, "1", "coefficient of |n|^beta (mixed only)" },
    { "beta", KeyType::real, "2", "upper power of the mixed exponent, alpha < beta <= 2" },
  };
}

std::vector<KeySpec> output_keys(const std::string& run_id)
{
  return {
    { "seed", KeyType::integer, "20240611", "64-bit noise seed; LEVYSHE_SEED overrides" },
    { "workers", KeyType::integer, "1", "worker threads; never changes output bytes" },
    { "output", KeyType::text, "out", "output directory" },
    { "run_id", KeyType::text, run_id, "output file stem" },
    { "format", KeyType::choice, "csv", "table format", { "csv", "json" } },
  };
}

std::vector<KeySpec> model_keys(const std::string& m, const std::string& k,
                                const std::string& horizon, const std::string& sigma,
                                const std::string& a, const std::string& b)
{
  return {
    { "m_space", KeyType::integer, m, "spatial grid points M" },
    { "k_time", KeyType::integer, k, "time steps K" },
    { "horizon", KeyType::real, horizon, "final time T" },
    { "sigma", KeyType::choice, sigma, "const: sigma = sigma_a; sine: sigma_a + sigma_b sin(u)",
      { "const", "sine" } },
    { "sigma_a", KeyType::real, a, "constant part of sigma" },
    { "sigma_b", KeyType::real, b, "sine amplitude of sigma" },
    { "u0", KeyType::choice, "const", "const: u0 = u0_value; cos: u0_value cos(u0_mode x)",
      { "const", "cos" } },
    { "u0_value", KeyType::real, "0", "initial amplitude" },
    { "u0_mode", KeyType::integer, "1", "initial wavenumber for u0 = cos" },
  };
}

std::vector<KeySpec> concat(std::vector<std::vector<KeySpec>> parts)
{
  std::vector<KeySpec> out;
  for (auto& p : parts)
    out.insert(out.end(), p.begin(), p.end());
  return out;
}

const std::map<std::string, std::vector<KeySpec>>& schemas()
{
  static const std::map<std::string, std::vector<KeySpec>> table = [] {
    std::map<std::string, std::vector<KeySpec>> t;
    t["kernel"] = concat({
      exponent_keys(),
      { { "t_grid", KeyType::real_list, "1e-5,2e-5,5e-5,1e-4,2e-4,5e-4,1e-3",
          "kernel times" },
        { "rate", KeyType::real, "1", "rate of the Upsilon series and the weighted integral" },
        { "tol", KeyType::real, "1e-10", "absolute series tolerance" } },
      output_keys("kernel"),
    });
    t["simulate"] = concat({
      exponent_keys(),
      model_keys("64", "64", "0.1", "const", "1", "0"),
      { { "replicas", KeyType::integer, "1000", "Monte Carlo replicas" },
        { "probes", KeyType::point_list, "0.1:0", "probe points t:x on the grid" } },
      output_keys("simulate"),
    });
    t["picard"] = concat({
      exponent_keys(),
      model_keys("32", "32", "0.1", "sine", "2", "1"),
      { { "replicas", KeyType::integer, "200", "Monte Carlo replicas" },
        { "n_max", KeyType::integer, "6", "number of successive differences" },
        { "rate", KeyType::real, "20", "weight exp(-rate t) of the norm" },
        { "p", KeyType::real, "2", "moment order, >= 2" } },
      output_keys("picard"),
    });
    t["malliavin"] = concat({
      exponent_keys(),
      model_keys("16", "16", "0.1", "sine", "2", "1"),
      { { "replicas", KeyType::integer, "20", "replicas of the H-norm" },
        { "probes", KeyType::point_list, "0.1:0", "probe points t:x" },
        { "deltas", KeyType::real_list, "0.025,0.05", "tail widths of the H-norm" },
        { "stride", KeyType::integer, "0", "forward source stride for replica 0 (0: skip)" },
        { "gradient_check", KeyType::boolean, "false",
          "compare with finite differences on replica 0" },
        { "sources", KeyType::point_list, "0:0,0.05:1.1780972450961724",
          "source cells s:y for the gradient check" },
        { "oracle_h", KeyType::real, "1e-3", "noise shift of the finite differences" },
        { "moment_p", KeyType::real, "2", "negative moment order" },
        { "floor", KeyType::real, "1e-12", "floor of the negative moment estimator" } },
      output_keys("malliavin"),
    });
    t["smallball"] = concat({
      exponent_keys(),
      model_keys("32", "32", "0.1", "sine", "2", "1"),
      { { "replicas", KeyType::integer, "2000", "replicas" },
        { "probes", KeyType::point_list, "0.1:0", "probe point t:x (first entry used)" },
        { "eps", KeyType::real_list, "",
          "small-ball levels; empty: 16 log-spaced levels up to the sample median" },
        { "min_hits", KeyType::integer, "10", "hits needed for a level to enter the fit" } },
      output_keys("smallball"),
    });
    t["density"] = concat({
      exponent_keys(),
      model_keys("64", "64", "0.1", "sine", "2", "1"),
      { { "replicas", KeyType::integer, "2000", "replicas" },
        { "probes", KeyType::point_list, "0.1:0", "probe points t:x" },
        { "bandwidth_scale", KeyType::real_list, "1",
          "multiples of the default bandwidth to sweep" },
        { "eval_points", KeyType::integer, "256", "evaluation points of the estimate" } },
      output_keys("density"),
    });
    t["check-exponent"] = {
      { "alpha", KeyType::real, "2", "lower power" },
      { "beta", KeyType::real, "2", "upper power" },
    };
    return t;
  }();
  return table;
}

} // namespace

const std::vector<std::string>& subcommand_names()
{
  static const std::vector<std::string> names{ "kernel",   "simulate", "picard",
                                               "malliavin", "smallball", "density",
                                               "check-exponent" };
  return names;
}

const std::vector<KeySpec>& schema_for(const std::string& subcommand)
{
  const auto& t = schemas();
  const auto it = t.find(subcommand);
  if (it == t.end())
    throw ConfigError("unknown subcommand '" + subcommand + "'");
  return it->second;
}

Settings::Settings(const std::string& subcommand)
  : subcommand_(subcommand)
  , schema_(&schema_for(subcommand))
{
  for (const auto& k : *schema_)
    values_[k.name] = { normalize(k, k.default_value), "default" };
}

const KeySpec& Settings::spec(const std::string& key) const
{
  for (const auto& k : *schema_)
    if (k.name == key)
      return k;
  throw ConfigError("unknown key '" + key + "' for subcommand " + subcommand_);
}

void Settings::set(const std::string& key, const std::string& raw,
                   const std::string& source)
{
  values_[key] = { normalize(spec(key), raw), source };
}

const std::string& Settings::raw(const std::string& key) const
{
  spec(key);
  return values_.at(key).first;
}

const std::string& Settings::source(const std::string& key) const
{
  spec(key);
  return values_.at(key).second;
}

double Settings::real(const std::string& key) const
{
  return to_real(key, raw(key));
}

std::uint64_t Settings::integer(const std::string& key) const
{
  return to_integer(key, raw(key));
}

bool Settings::flag(const std::string& key) const
{
  return raw(key) == "true";
}

std::vector<double> Settings::reals(const std::string& key) const
{
  std::vector<double> out;
  for (const auto& p : split(raw(key), ','))
    out.push_back(to_real(key, p));
  return out;
}

std::vector<std::pair<double, double>> Settings::points(const std::string& key) const
{
  std::vector<std::pair<double, double>> out;
  for (const auto& p : split(raw(key), ',')) {
    const auto tx = split(p, ':');
    out.emplace_back(to_real(key, tx.at(0)), to_real(key, tx.at(1)));
  }
  return out;
}

void load_config_file(Settings& settings, const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError(path, "cannot open config file");
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!seen.insert(key).second)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": repeated key '" + key + "'");
    try {
      settings.set(key, line.substr(eq + 1), "file");
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

} // namespace levyshe
