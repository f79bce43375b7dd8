#include "levyshe/emit.hpp"

#include "levyshe/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

namespace levyshe {

namespace {

auto sort_key(const Row& r)
{
  return std::make_tuple(std::cref(r.quantity), std::isnan(r.t), r.t, std::isnan(r.x), r.x);
}

double parse_double(const std::string& s)
{
  if (s == "nan")
    return std::nan("");
  if (s == "inf")
    return HUGE_VAL;
  if (s == "-inf")
    return -HUGE_VAL;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("not a number: '" + s + "'");
  return v;
}

template <class T>
T parse_unsigned(const std::string& s)
{
  T v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("not an unsigned integer: '" + s + "'");
  return v;
}

std::string csv_field(const std::string& s)
{
  if (s.find_first_of(",\"\n\r") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line)
{
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t j = 0; j < line.size(); ++j) {
    const char c = line[j];
    if (quoted) {
      if (c == '"' && j + 1 < line.size() && line[j + 1] == '"') {
        cur += '"';
        ++j;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

nlohmann::json json_number(double v)
{
  if (std::isfinite(v))
    return v;
  return format_double(v);
}

double from_json_number(const nlohmann::json& j)
{
  if (j.is_string())
    return parse_double(j.get<std::string>());
  return j.get<double>();
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

Format parse_format(const std::string& name)
{
  if (name == "csv")
    return Format::csv;
  if (name == "json")
    return Format::json;
  throw ConfigError("format must be csv or json, got '" + name + "'");
}

std::string format_double(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void sort_rows(std::vector<Row>& rows)
{
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return sort_key(a) < sort_key(b); });
}

std::string to_csv(std::vector<Row> rows)
{
  sort_rows(rows);
  std::string out = std::string(kCsvVersionLine) + "\n" + kCsvHeader + "\n";
  for (const auto& r : rows) {
    out += csv_field(r.run_id) + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.replica_count) + ',' + format_double(r.alpha) + ',' +
           format_double(r.beta) + ',' + format_double(r.t) + ',' + format_double(r.x) +
           ',' + csv_field(r.quantity) + ',' + format_double(r.value) + ',' +
           format_double(r.std_error) + ',' + format_double(r.tail_bound) + '\n';
  }
  return out;
}

std::string to_json(std::vector<Row> rows)
{
  sort_rows(rows);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["run_id"] = r.run_id;
    j["seed"] = r.seed;
    j["replica_count"] = r.replica_count;
    j["alpha"] = json_number(r.alpha);
    j["beta"] = json_number(r.beta);
    j["t"] = json_number(r.t);
    j["x"] = json_number(r.x);
    j["quantity"] = r.quantity;
    j["value"] = json_number(r.value);
    j["stderr"] = json_number(r.std_error);
    j["tail_bound"] = json_number(r.tail_bound);
    arr.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["schema"] = "levyshe-rows v1";
  doc["rows"] = std::move(arr);
  return doc.dump(1) + "\n";
}

void write_text(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError(path, "cannot open for writing");
  out << text;
  out.flush();
  if (!out)
    throw IoError(path, "write failed");
}

void emit(const std::vector<Row>& rows, Format format, const std::string& path)
{
  write_text(path, format == Format::csv ? to_csv(rows) : to_json(rows));
}

std::vector<Row> read_csv(const std::string& path)
{
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kCsvVersionLine)
    throw IoError(path, "missing csv version line");
  if (!std::getline(in, line) || line != kCsvHeader)
    throw IoError(path, "unexpected csv header");
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    const auto f = split_csv_line(line);
    if (f.size() != 11)
      throw IoError(path, "malformed csv row");
    Row r;
    r.run_id = f[0];
    r.seed = parse_unsigned<std::uint64_t>(f[1]);
    r.replica_count = parse_unsigned<std::size_t>(f[2]);
    r.alpha = parse_double(f[3]);
    r.beta = parse_double(f[4]);
    r.t = parse_double(f[5]);
    r.x = parse_double(f[6]);
    r.quantity = f[7];
    r.value = parse_double(f[8]);
    r.std_error = parse_double(f[9]);
    r.tail_bound = parse_double(f[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<Row> read_json(const std::string& path)
{
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path, std::string("invalid json (") + e.what() + ")");
  }
  std::vector<Row> rows;
  for (const auto& j : doc.at("rows")) {
    Row r;
    r.run_id = j.at("run_id").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.replica_count = j.at("replica_count").get<std::size_t>();
    r.alpha = from_json_number(j.at("alpha"));
    r.beta = from_json_number(j.at("beta"));
    r.t = from_json_number(j.at("t"));
    r.x = from_json_number(j.at("x"));
    r.quantity = j.at("quantity").get<std::string>();
    r.value = from_json_number(j.at("value"));
    r.std_error = from_json_number(j.at("stderr"));
    r.tail_bound = from_json_number(j.at("tail_bound"));
    rows.push_back(std::move(r));
  }
  return rows;
}

} // namespace levyshe
