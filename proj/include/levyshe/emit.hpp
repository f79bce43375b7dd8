#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace levyshe {

inline constexpr const char* kCsvVersionLine = "# levyshe-csv v1";
inline constexpr const char* kCsvHeader =
  "run_id,seed,replica_count,alpha,beta,t,x,quantity,value,stderr,tail_bound";

struct Row
{
  std::string run_id;
  std::uint64_t seed = 0;
  std::size_t replica_count = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double t = 0.0;
  double x = 0.0;
  std::string quantity;
  double value = 0.0;
  double std_error = 0.0;
  double tail_bound = 0.0;
};

enum class Format
{
  csv,
  json
};

Format parse_format(const std::string& name);

/// Shortest round-trip decimal; non-finite values as nan, inf, -inf.
std::string format_double(double v);

/// Stable sort by (quantity, t, x); NaN coordinates sort last.
void sort_rows(std::vector<Row>& rows);

std::string to_csv(std::vector<Row> rows);
std::string to_json(std::vector<Row> rows);

/// Writes rows (sorted) to path; throws IoError.
void emit(const std::vector<Row>& rows, Format format, const std::string& path);

/// Writes text to path; throws IoError.
void write_text(const std::string& path, const std::string& text);

std::vector<Row> read_csv(const std::string& path);
std::vector<Row> read_json(const std::string& path);

} // namespace levyshe
