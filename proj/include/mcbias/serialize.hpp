#pragma once

// JSON and CSV representations of distributions, transforms and results,
// plus the compact text syntaxes accepted on the command line.
//
// Distribution JSON:
//   {"type": "normal",    "mean": [..], "cov": [[..], ..]}
//   {"type": "uniform",   "lo": [..],   "hi": [..]}
//   {"type": "two_point", "a": [..],    "b": [..], "p": 0.5}
// Scalars may replace length-1 arrays, and "variance" a 1x1 "cov".
// A string such as "normal:0:1" is read with parse_dist_flag.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mcbias/error_models.hpp"
#include "mcbias/mc_lab.hpp"
#include "mcbias/pipeline.hpp"

namespace mcbias {

using Json = nlohmann::json;

/// "%.17g".
std::string format_double(double x);

Json to_json(const Mat& m);
Mat mat_from_json(const Json& j);
Vec vec_from_json(const Json& j);

Json to_json(const DistSpec& d);
DistSpec dist_from_json(const Json& j);

/// Compact forms: normal:MEAN:VAR, uniform:LO:HI, two_point:A:B:P (scalar).
DistSpec parse_dist_flag(std::string_view text);

/// {"kernel": "additive", "t_y": [[..]], "t_s": [[..]]}; matrices optional.
Json to_json(const TransformSpec& t);
TransformSpec transform_from_json(const Json& j);

Json to_json(const CombineOutput& c);
Json to_json(const EstimateResult& r);

/// Range syntax:
///   lo:hi:N      N evenly spaced values including both ends
///   lo:hi:logN   N log-spaced values (needs lo > 0)
///   a,b,c        explicit list
///   x            single value
std::vector<double> parse_real_range(std::string_view text);

/// Like parse_real_range, rounding to integers and dropping repeats, so
/// "3:300:log25" yields increasing distinct counts.
std::vector<std::size_t> parse_count_range(std::string_view text);

/// Reads a data CSV: header y_1,...,y_K, then one vector per line.
Mat read_data_csv(std::istream& in);
Mat read_data_csv_file(const std::string& path);

/// Builds CSV text with quoting of fields containing commas or quotes.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);

  CsvWriter& field(const std::string& s);
  CsvWriter& field(double x);
  CsvWriter& field(std::size_t n);
  /// Empty field for an absent value.
  CsvWriter& empty();
  void end_row();

  const std::string& str() const noexcept { return out_; }

 private:
  void separator();

  std::string out_;
  bool row_start_ = true;
};

}  // namespace mcbias
