#include "mcbias/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "mcbias/error.hpp"

namespace mcbias {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string s(trim(text));
  if (s.empty()) throw ConfigError(std::string(what) + ": empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v))
    throw ConfigError(std::string(what) + ": '" + s + "' is not a finite number");
  return v;
}

std::size_t parse_count(std::string_view text, std::string_view what) {
  const std::string_view s = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(std::string(what) + ": '" + std::string(s) + "' is not a count");
  return v;
}

double json_number(const Json& j, const char* what) {
  if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
  return v;
}

const Json& member(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Json to_json(const Mat& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const Json& j) {
  if (j.is_number()) return Mat{{json_number(j, "matrix entry")}};
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
  std::vector<Vec> rows;
  for (const Json& row : j) rows.push_back(vec_from_json(row));
  for (const Vec& r : rows)
    if (r.size() != rows.front().size()) throw ConfigError("matrix rows differ in length");
  return Mat::from_rows(rows);
}

Vec vec_from_json(const Json& j) {
  if (j.is_number()) return {json_number(j, "vector entry")};
  if (!j.is_array() || j.empty()) throw ConfigError("vector must be a number or non-empty array");
  Vec v;
  for (const Json& x : j) v.push_back(json_number(x, "vector entry"));
  return v;
}

Json to_json(const DistSpec& d) {
  Json j;
  if (const auto* n = d.get_if<NormalDist>()) {
    j["type"] = "normal";
    j["mean"] = n->mean;
    j["cov"] = to_json(n->cov);
  } else if (const auto* u = d.get_if<UniformDist>()) {
    j["type"] = "uniform";
    j["lo"] = u->lo;
    j["hi"] = u->hi;
  } else if (const auto* t = d.get_if<TwoPointDist>()) {
    j["type"] = "two_point";
    j["a"] = t->a;
    j["b"] = t->b;
    j["p"] = t->p;
  }
  return j;
}

DistSpec dist_from_json(const Json& j) {
  if (j.is_string()) return parse_dist_flag(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("distribution must be an object or a compact string");
  const std::string type = member(j, "type").get<std::string>();
  try {
    if (type == "normal") {
      Vec mean = vec_from_json(member(j, "mean"));
      Mat cov = j.contains("variance") ? mat_from_json(j.at("variance")) : mat_from_json(member(j, "cov"));
      return DistSpec::normal(std::move(mean), std::move(cov));
    }
    if (type == "uniform") return DistSpec::uniform(vec_from_json(member(j, "lo")), vec_from_json(member(j, "hi")));
    if (type == "two_point")
      return DistSpec::two_point(vec_from_json(member(j, "a")), vec_from_json(member(j, "b")),
                                 json_number(j.value("p", Json(0.5)), "p"));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown distribution type '" + type + "'");
}

DistSpec parse_dist_flag(std::string_view text) {
  const auto parts = split(text, ':');
  const std::string_view type = trim(parts[0]);
  auto arg = [&](std::size_t i) { return parse_double(parts[i], "distribution parameter"); };
  try {
    if (type == "normal" && parts.size() == 3) return DistSpec::normal1(arg(1), arg(2));
    if (type == "uniform" && parts.size() == 3) return DistSpec::uniform1(arg(1), arg(2));
    if (type == "two_point" && parts.size() == 4) return DistSpec::two_point1(arg(1), arg(2), arg(3));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("bad distribution '" + std::string(text) +
                    "' (expected normal:MEAN:VAR, uniform:LO:HI or two_point:A:B:P)");
}

Json to_json(const TransformSpec& t) {
  Json j;
  j["kernel"] = t.kernel.name();
  if (t.t_y) j["t_y"] = to_json(*t.t_y);
  if (t.t_s) j["t_s"] = to_json(*t.t_s);
  return j;
}

TransformSpec transform_from_json(const Json& j) {
  TransformSpec t;
  t.kernel = ScalarKernel::of(kernel_kind_from_string(member(j, "kernel").get<std::string>()));
  if (j.contains("t_y") && !j.at("t_y").is_null()) t.t_y = mat_from_json(j.at("t_y"));
  if (j.contains("t_s") && !j.at("t_s").is_null()) t.t_s = mat_from_json(j.at("t_s"));
  return t;
}

Json to_json(const CombineOutput& c) {
  Json j;
  j["construction"] = std::string(to_string(c.construction));
  j["nominal"] = c.nominal;
  j["replicates"] = to_json(c.replicates);
  j["input_cov"] = to_json(c.input_cov);
  return j;
}

Json to_json(const EstimateResult& r) {
  Json j;
  j["label"] = r.label;
  j["point"] = r.point;
  j["std_error"] = r.std_error;
  j["trials"] = r.trials;
  j["analytic_reference"] = r.analytic_reference ? Json(*r.analytic_reference) : Json(nullptr);
  j["z_score"] = r.z_score && std::isfinite(*r.z_score) ? Json(*r.z_score) : Json(nullptr);
  Json extras = Json::object();
  for (const auto& [k, v] : r.extras) extras[k] = v;
  j["extras"] = std::move(extras);
  return j;
}

std::vector<double> parse_real_range(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ConfigError("empty range");
  if (text.find(',') != std::string_view::npos) {
    std::vector<double> out;
    for (auto p : split(text, ',')) out.push_back(parse_double(p, "list entry"));
    return out;
  }
  const auto parts = split(text, ':');
  if (parts.size() == 1) return {parse_double(parts[0], "value")};
  if (parts.size() != 3) throw ConfigError("bad range '" + std::string(text) + "' (expected lo:hi:N or lo:hi:logN)");
  const double lo = parse_double(parts[0], "range start"), hi = parse_double(parts[1], "range end");
  std::string_view count = trim(parts[2]);
  const bool log = count.starts_with("log");
  if (log) count.remove_prefix(3);
  const std::size_t n = parse_count(count, "range count");
  if (n == 0) throw ConfigError("range count must be positive");
  if (hi < lo) throw ConfigError("range end is below its start");
  if (log && !(lo > 0.0)) throw ConfigError("log range needs a positive start");
  if (n == 1) {
    if (lo != hi) throw ConfigError("a one-point range needs lo == hi");
    return {lo};
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<std::size_t> parse_count_range(std::string_view text) {
  std::vector<std::size_t> out;
  for (double v : parse_real_range(text)) {
    if (!(v >= 0.0)) throw ConfigError("counts must be non-negative");
    const auto n = static_cast<std::size_t>(std::llround(v));
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  return out;
}

Mat read_data_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("data CSV is empty");
  const auto header = split(trim(line), ',');
  for (std::size_t k = 0; k < header.size(); ++k)
    if (trim(header[k]) != "y_" + std::to_string(k + 1))
      throw ConfigError("data CSV header must be y_1,...,y_K");
  std::vector<Vec> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != header.size())
      throw ConfigError("data CSV line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                        " fields, expected " + std::to_string(header.size()));
    Vec row;
    for (auto c : cells) row.push_back(parse_double(c, "data CSV value"));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("data CSV has no rows");
  return Mat::from_rows(rows);
}

Mat read_data_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file '" + path + "'");
  return read_data_csv(in);
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) {
  for (const auto& h : header) field(h);
  end_row();
}

void CsvWriter::separator() {
  if (!row_start_) out_ += ',';
  row_start_ = false;
}

CsvWriter& CsvWriter::field(const std::string& s) {
  separator();
  if (s.find_first_of(",\"\n") == std::string::npos) {
    out_ += s;
  } else {
    out_ += '"';
    for (char c : s) {
      if (c == '"') out_ += '"';
      out_ += c;
    }
    out_ += '"';
  }
  return *this;
}

CsvWriter& CsvWriter::field(double x) {
  separator();
  out_ += format_double(x);
  return *this;
}

CsvWriter& CsvWriter::field(std::size_t n) {
  separator();
  out_ += std::to_string(n);
  return *this;
}

CsvWriter& CsvWriter::empty() {
  separator();
  return *this;
}

void CsvWriter::end_row() {
  out_ += '\n';
  row_start_ = true;
}

}  // namespace mcbias
