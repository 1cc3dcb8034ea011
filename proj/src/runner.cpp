#include "mcbias/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "mcbias/error.hpp"
#include "mcbias/mc_lab.hpp"

namespace mcbias {

namespace {

const std::vector<std::string> kCommon{"command", "seed", "workers", "format"};

const std::map<std::string, std::vector<std::string>>& command_keys() {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"pipeline",
       {"model", "data", "data_rows", "y_dist", "j", "s_dist", "nu", "q", "construction", "shared", "t_y",
        "t_s"}},
      {"bias-sweep", {"model", "y_dist", "s_dist", "j", "q", "trials", "construction", "oracle"}},
      {"mean-var", {"model", "y_dist", "s_dist", "j", "q", "trials"}},
      {"vardiff", {"model", "y_dist", "s_dist", "j", "q", "trials", "blocks"}},
      {"psi-map", {"alpha", "grid"}},
      {"relbias-map", {"alpha", "grid", "j"}},
      {"lemmas", {"lemma", "trials"}},
  };
  return keys;
}

std::uint64_t get_u64(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
}

std::size_t get_count(const Json& j, const char* key, std::size_t min) {
  const std::uint64_t v = get_u64(j, key);
  if (v < min) throw ConfigError(std::string("'") + key + "' must be at least " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

std::string get_string(const Json& j, const char* key) {
  if (!j.at(key).is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

bool get_bool(const Json& j, const char* key) {
  if (!j.at(key).is_boolean()) throw ConfigError(std::string("'") + key + "' must be true or false");
  return j.at(key).get<bool>();
}

std::vector<std::size_t> count_list(const Json& v, const char* key) {
  std::vector<std::size_t> out;
  if (v.is_string()) return parse_count_range(v.get<std::string>());
  if (v.is_number()) {
    Json wrap{{key, v}};
    return {get_count(wrap, key, 0)};
  }
  if (v.is_array() && !v.empty()) {
    for (const Json& x : v) {
      Json wrap{{key, x}};
      out.push_back(get_count(wrap, key, 0));
    }
    return out;
  }
  throw ConfigError(std::string("'") + key + "' must be a count, a list of counts or a range string");
}

std::vector<double> real_list(const Json& v, const char* key) {
  if (v.is_string()) return parse_real_range(v.get<std::string>());
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array() && !v.empty()) {
    std::vector<double> out;
    for (const Json& x : v) {
      if (!x.is_number()) throw ConfigError(std::string("'") + key + "' entries must be numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  throw ConfigError(std::string("'") + key + "' must be a number, a list or a range string");
}

struct Grid {
  double lo, hi;
  std::size_t points;
};

Grid grid_from(const Json& v) {
  Grid g{};
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto first = s.find(':'), last = s.rfind(':');
    if (first == std::string::npos || first == last || s.find("log") != std::string::npos)
      throw ConfigError("grid must have the form lo:hi:N");
    const auto values = parse_real_range(s.substr(0, last) + ":" + s.substr(last + 1));
    g = {values.front(), values.back(), values.size()};
  } else if (v.is_object()) {
    g.lo = v.at("lo").get<double>();
    g.hi = v.at("hi").get<double>();
    g.points = get_count(v, "points", 2);
  } else {
    throw ConfigError("grid must be 'lo:hi:N' or {\"lo\", \"hi\", \"points\"}");
  }
  if (g.points < 2 || !(g.hi > g.lo) || !(g.lo >= 0.0))
    throw ConfigError("grid needs 0 <= lo < hi and at least 2 points");
  return g;
}

Construction parse_construction(const std::string& s) {
  try {
    return construction_from_string(s);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

// Config as recorded in artifacts; the worker count never affects results.
Json echoed(const Json& c) {
  Json e = c;
  e.erase("workers");
  return e;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : command_keys()) n.push_back(k);
    return n;
  }();
  return names;
}

Json normalize_config(const Json& config, std::size_t default_workers) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (!config.contains("command")) throw ConfigError("config needs a 'command'");
  const std::string command = get_string(config, "command");
  const auto it = command_keys().find(command);
  if (it == command_keys().end()) throw ConfigError("unknown command '" + command + "'");
  const auto& allowed = it->second;
  for (const auto& [key, value] : config.items()) {
    if (std::find(kCommon.begin(), kCommon.end(), key) == kCommon.end() &&
        std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("'" + key + "' does not apply to " + command);
  }
  auto has = [&](const char* k) { return config.contains(k) && !config.at(k).is_null(); };

  Json out;
  out["command"] = command;
  out["seed"] = has("seed") ? get_u64(config, "seed") : 0;
  out["workers"] = has("workers") ? get_count(config, "workers", 0) : default_workers;
  const std::string format = has("format") ? get_string(config, "format") : (command == "pipeline" ? "json" : "csv");
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
  out["format"] = format;

  const bool scenario_command =
      command == "pipeline" || command == "bias-sweep" || command == "mean-var" || command == "vardiff";
  if (scenario_command) {
    if (!has("model")) throw ConfigError(command + " needs a 'model'");
    const std::string model = get_string(config, "model");
    kernel_kind_from_string(model);
    out["model"] = model;
  }

  auto trials = [&](std::size_t def) { out["trials"] = has("trials") ? get_count(config, "trials", 2) : def; };

  if (command == "pipeline") {
    const int sources = int(has("data")) + int(has("data_rows"));
    if (sources > 1) throw ConfigError("give either 'data' or 'data_rows', not both");
    std::size_t k = 1;
    if (has("data")) {
      out["data"] = get_string(config, "data");
      k = read_data_csv_file(out["data"].get<std::string>()).cols();
      if (has("y_dist") || has("j")) throw ConfigError("'y_dist' and 'j' conflict with supplied data");
    } else if (has("data_rows")) {
      const Mat rows = mat_from_json(config.at("data_rows"));
      out["data_rows"] = to_json(rows);
      k = rows.cols();
      if (has("y_dist") || has("j")) throw ConfigError("'y_dist' and 'j' conflict with supplied data");
    } else {
      const DistSpec y = has("y_dist") ? dist_from_json(config.at("y_dist")) : DistSpec::normal1(0.0, 1.0);
      out["y_dist"] = to_json(y);
      out["j"] = has("j") ? get_count(config, "j", 2) : 2;
      k = y.dim();
    }
    const DistSpec s = has("s_dist") ? dist_from_json(config.at("s_dist"))
                                     : DistSpec::normal(Vec(k, 0.0), Mat::identity(k));
    out["s_dist"] = to_json(s);
    if (has("nu")) out["nu"] = vec_from_json(config.at("nu"));
    const auto q = has("q") ? count_list(config.at("q"), "q") : std::vector<std::size_t>{1000};
    if (q.size() != 1 || q[0] < 1) throw ConfigError("pipeline needs a single Q >= 1");
    out["q"] = q[0];
    out["construction"] =
        std::string(to_string(parse_construction(has("construction") ? get_string(config, "construction") : "current")));
    out["shared"] = has("shared") ? get_bool(config, "shared") : true;
    if (has("t_y")) out["t_y"] = to_json(mat_from_json(config.at("t_y")));
    if (has("t_s")) out["t_s"] = to_json(mat_from_json(config.at("t_s")));
  } else if (scenario_command) {
    const DistSpec y = has("y_dist") ? dist_from_json(config.at("y_dist")) : DistSpec::normal1(0.0, 1.0);
    const DistSpec s = has("s_dist") ? dist_from_json(config.at("s_dist")) : DistSpec::normal1(0.0, 1.0);
    if (y.dim() != 1 || s.dim() != 1) throw ConfigError(command + " needs scalar distributions");
    out["y_dist"] = to_json(y);
    out["s_dist"] = to_json(s);
    out["j"] = has("j") ? get_count(config, "j", 2) : 4;
    const auto q = has("q") ? count_list(config.at("q"), "q") : std::vector<std::size_t>{10};
    for (std::size_t v : q)
      if (v < 2) throw ConfigError("every Q must be at least 2");
    out["q"] = q;
    trials(command == "vardiff" ? 100000 : 10000);
    if (command == "bias-sweep") {
      const std::string c = has("construction") ? get_string(config, "construction") : "both";
      out["construction"] = c == "both" ? c : std::string(to_string(parse_construction(c)));
      out["oracle"] = has("oracle") ? get_bool(config, "oracle") : false;
    }
    if (command == "vardiff") {
      out["blocks"] = has("blocks") ? get_count(config, "blocks", 2) : 20;
      if (out["blocks"].get<std::size_t>() > out["trials"].get<std::size_t>())
        throw ConfigError("'blocks' exceeds 'trials'");
    }
  } else if (command == "psi-map" || command == "relbias-map") {
    const auto alphas = has("alpha") ? real_list(config.at("alpha"), "alpha") : std::vector<double>{0.95};
    for (double a : alphas)
      if (!(a > 0.0 && a <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
    out["alpha"] = alphas;
    const Grid g = has("grid") ? grid_from(config.at("grid")) : Grid{0.0, 8.0, 161};
    out["grid"] = {{"lo", g.lo}, {"hi", g.hi}, {"points", g.points}};
    if (command == "relbias-map") out["j"] = has("j") ? get_count(config, "j", 2) : 2;
  } else if (command == "lemmas") {
    std::vector<std::size_t> ids = has("lemma") ? count_list(config.at("lemma"), "lemma")
                                                : std::vector<std::size_t>{1, 2, 3, 4, 5};
    for (std::size_t id : ids)
      if (id < 1 || id > 5) throw ConfigError("lemma ids run from 1 to 5");
    out["lemma"] = ids;
    trials(100000);
  }
  return out;
}

namespace {

ScalarScenario scenario_from(const Json& c) {
  ScalarScenario s;
  s.kernel = ScalarKernel::of(kernel_kind_from_string(c.at("model").get<std::string>()));
  s.y_dist = dist_from_json(c.at("y_dist"));
  s.s_dist = dist_from_json(c.at("s_dist"));
  s.j = c.at("j").get<std::size_t>();
  return s;
}

ExperimentConfig experiment_from(const Json& c) {
  ExperimentConfig e;
  e.scenario = scenario_from(c);
  e.trials = c.at("trials").get<std::size_t>();
  e.master_seed = c.at("seed").get<std::uint64_t>();
  e.workers = c.at("workers").get<std::size_t>();
  if (c.contains("blocks")) e.blocks = c.at("blocks").get<std::size_t>();
  return e;
}

void result_fields(CsvWriter& w, const EstimateResult& r) {
  w.field(r.point).field(r.std_error);
  if (r.analytic_reference) w.field(*r.analytic_reference); else w.empty();
  if (r.z_score && std::isfinite(*r.z_score)) w.field(*r.z_score); else w.empty();
}

std::string pm(double v, double se) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6g +/- %.2g", v, se);
  return buf;
}

std::string reference_note(const EstimateResult& r) {
  if (!r.analytic_reference) return "";
  char buf[96];
  std::snprintf(buf, sizeof buf, " (reference %.6g, z = %.2f)", *r.analytic_reference, r.z_score.value_or(0.0));
  return buf;
}

RunOutput run_pipeline(const Json& c) {
  const RngStream root = RngStream(c.at("seed").get<std::uint64_t>()).substream(0);
  const std::size_t q = c.at("q").get<std::size_t>();
  Mat data;
  if (c.contains("data")) {
    data = read_data_csv_file(c.at("data").get<std::string>());
  } else if (c.contains("data_rows")) {
    data = mat_from_json(c.at("data_rows"));
  } else {
    RngStream ys = root.substream(kRoleData);
    data = sample(dist_from_json(c.at("y_dist")), c.at("j").get<std::size_t>(), ys);
  }
  const std::size_t j = data.rows(), k = data.cols();
  if (j < 2) throw ConfigError("pipeline needs at least two data vectors");
  const DistSpec s = dist_from_json(c.at("s_dist"));
  if (s.dim() != k)
    throw ConfigError("error distribution has dimension " + std::to_string(s.dim()) + ", data has " +
                      std::to_string(k));
  const bool shared = c.at("shared").get<bool>();
  RngStream ss = root.substream(kRoleErrors);
  ErrorBatch errors{sample(s, shared ? q : j * q, ss), shared};
  TransformSpec spec;
  spec.kernel = ScalarKernel::of(kernel_kind_from_string(c.at("model").get<std::string>()));
  if (c.contains("t_y")) spec.t_y = mat_from_json(c.at("t_y"));
  if (c.contains("t_s")) spec.t_s = mat_from_json(c.at("t_s"));
  const Vec nu = c.contains("nu") ? vec_from_json(c.at("nu")) : s.mean();
  const Construction construction = construction_from_string(c.at("construction").get<std::string>());
  const TransformOutput t = transform_stage(DataBatch{data}, errors, spec, nu);
  RngStream zs = root.substream(kRoleSynthesis);
  const CombineOutput out = combine(t, construction, zs);

  RunOutput r;
  r.format = c.at("format").get<std::string>();
  if (r.format == "json") {
    r.artifact = to_json(out).dump(2) + "\n";
  } else {
    std::vector<std::string> header;
    for (std::size_t i = 0; i < k; ++i) header.push_back("m_" + std::to_string(i + 1));
    CsvWriter w(header);
    for (std::size_t row = 0; row < out.replicates.rows(); ++row) {
      for (std::size_t col = 0; col < k; ++col) w.field(out.replicates(row, col));
      w.end_row();
    }
    r.artifact = w.str();
  }
  std::string nominal;
  for (std::size_t i = 0; i < std::min<std::size_t>(k, 4); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", out.nominal[i]);
    nominal += buf;
  }
  if (k > 4) nominal += ", ...";
  r.summary = "pipeline " + std::string(to_string(construction)) + ": J=" + std::to_string(j) +
              " K=" + std::to_string(k) + " Q=" + std::to_string(q) + " nominal=[" + nominal + "]";
  return r;
}

struct SweepRow {
  std::size_t q;
  std::string construction;
  EstimateResult result;
  std::optional<EstimateResult> oracle;
};

RunOutput sweep_output(const Json& c, const std::vector<SweepRow>& rows) {
  const std::string command = c.at("command").get<std::string>();
  RunOutput r;
  r.format = c.at("format").get<std::string>();
  if (r.format == "json") {
    Json results = Json::array();
    for (const auto& row : rows) {
      Json item{{"q", row.q}, {"result", to_json(row.result)}};
      if (!row.construction.empty()) item["construction"] = row.construction;
      if (row.oracle) item["target_oracle"] = to_json(*row.oracle);
      results.push_back(std::move(item));
    }
    r.artifact = Json{{"config", echoed(c)}, {"results", results}}.dump(2) + "\n";
  } else {
    std::vector<std::string> header{"model"};
    if (command == "bias-sweep") header.push_back("construction");
    for (const char* h : {"j", "q", "trials", "estimate", "std_error", "analytic_reference", "z_score"})
      header.push_back(h);
    if (command == "bias-sweep") {
      header.push_back("target_variance");
      if (c.at("oracle").get<bool>()) {
        header.push_back("target_oracle");
        header.push_back("target_oracle_se");
      }
    }
    if (command == "mean-var") {
      header.push_back("var_mean_current");
      header.push_back("var_mean_alternative");
    }
    if (command == "vardiff") {
      header.push_back("var_s2_current");
      header.push_back("var_s2_alternative");
    }
    CsvWriter w(header);
    for (const auto& row : rows) {
      w.field(c.at("model").get<std::string>());
      if (command == "bias-sweep") w.field(row.construction);
      w.field(c.at("j").get<std::size_t>()).field(row.q).field(row.result.trials);
      result_fields(w, row.result);
      auto extra = [&](const char* name) {
        if (auto v = row.result.extra(name)) w.field(*v); else w.empty();
      };
      if (command == "bias-sweep") {
        extra("target_variance");
        if (row.oracle) w.field(row.oracle->point).field(row.oracle->std_error);
      }
      if (command == "mean-var") {
        extra("var_mean_current");
        extra("var_mean_alternative");
      }
      if (command == "vardiff") {
        extra("var_s2_current");
        extra("var_s2_alternative");
      }
      w.end_row();
    }
    r.artifact = w.str();
  }
  const SweepRow& last = rows.back();
  r.summary = command + ": " + std::to_string(rows.size()) + " point(s); last Q=" + std::to_string(last.q) +
              (last.construction.empty() ? "" : " " + last.construction) + " estimate " +
              pm(last.result.point, last.result.std_error) + reference_note(last.result);
  return r;
}

RunOutput run_scenario_sweep(const Json& c) {
  const std::string command = c.at("command").get<std::string>();
  ExperimentConfig base = experiment_from(c);
  const auto qs = c.at("q").get<std::vector<std::size_t>>();
  std::vector<Construction> constructions{Construction::current};
  if (command == "bias-sweep") {
    const std::string cs = c.at("construction").get<std::string>();
    if (cs == "both")
      constructions = {Construction::current, Construction::alternative};
    else
      constructions = {construction_from_string(cs)};
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    ExperimentConfig e = base;
    e.scenario.q = qs[i];
    e.stream_id = i;
    if (command == "bias-sweep") {
      for (Construction con : constructions) {
        SweepRow row{qs[i], std::string(to_string(con)), estimate_combine_bias(e, con), std::nullopt};
        if (c.at("oracle").get<bool>()) row.oracle = estimate_target_variance_oracle(e);
        rows.push_back(std::move(row));
      }
    } else if (command == "mean-var") {
      rows.push_back({qs[i], "", estimate_mean_variance(e), std::nullopt});
    } else {
      rows.push_back({qs[i], "", estimate_vardiff(e), std::nullopt});
    }
  }
  return sweep_output(c, rows);
}

RunOutput run_map_command(const Json& c) {
  const std::string command = c.at("command").get<std::string>();
  MapConfig m;
  m.quantity = command == "psi-map" ? MapQuantity::psi : MapQuantity::relbias_current;
  m.alphas = c.at("alpha").get<std::vector<double>>();
  const Json& g = c.at("grid");
  m.lo = g.at("lo").get<double>();
  m.hi = g.at("hi").get<double>();
  m.points = g.at("points").get<std::size_t>();
  if (c.contains("j")) m.j = c.at("j").get<std::size_t>();
  m.workers = c.at("workers").get<std::size_t>();
  const auto cells = run_map(m);
  const std::string quantity = command == "psi-map" ? "psi" : "relbias";

  RunOutput r;
  r.format = c.at("format").get<std::string>();
  if (r.format == "json") {
    Json arr = Json::array();
    for (const auto& cell : cells) {
      Json item{{"alpha", cell.alpha}, {"a", cell.a}, {"b", cell.b}, {quantity, cell.value}};
      arr.push_back(std::move(item));
    }
    r.artifact = Json{{"config", echoed(c)}, {"cells", arr}}.dump(2) + "\n";
  } else {
    std::vector<std::string> header{"alpha", "a", "b"};
    if (command == "relbias-map") header.push_back("j");
    header.push_back(quantity);
    CsvWriter w(header);
    for (const auto& cell : cells) {
      w.field(cell.alpha).field(cell.a).field(cell.b);
      if (command == "relbias-map") w.field(m.j);
      w.field(cell.value);
      w.end_row();
    }
    r.artifact = w.str();
  }
  std::size_t negative = 0;
  double lo = 0.0, hi = 0.0;
  for (const auto& cell : cells) {
    negative += cell.value < 0.0;
    lo = std::min(lo, cell.value);
    hi = std::max(hi, cell.value);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, ": %zu cells, %zu alpha value(s), %zux%zu grid, %zu negative, range [%.4g, %.4g]",
                cells.size(), m.alphas.size(), m.points, m.points, negative, lo, hi);
  r.summary = command + buf;
  return r;
}

RunOutput run_lemmas(const Json& c) {
  ExperimentConfig e;
  e.trials = c.at("trials").get<std::size_t>();
  e.master_seed = c.at("seed").get<std::uint64_t>();
  e.workers = c.at("workers").get<std::size_t>();
  std::vector<std::pair<std::size_t, EstimateResult>> rows;
  for (std::size_t id : c.at("lemma").get<std::vector<std::size_t>>()) {
    e.stream_id = id;
    for (auto& res : verify_lemma(static_cast<int>(id), e)) rows.emplace_back(id, std::move(res));
  }
  RunOutput r;
  r.format = c.at("format").get<std::string>();
  if (r.format == "json") {
    Json arr = Json::array();
    for (const auto& [id, res] : rows) arr.push_back(Json{{"lemma", id}, {"result", to_json(res)}});
    r.artifact = Json{{"config", echoed(c)}, {"results", arr}}.dump(2) + "\n";
  } else {
    CsvWriter w({"lemma", "label", "trials", "estimate", "std_error", "analytic_reference", "z_score"});
    for (const auto& [id, res] : rows) {
      w.field(id).field(res.label).field(res.trials);
      result_fields(w, res);
      w.end_row();
    }
    r.artifact = w.str();
  }
  double max_z = 0.0;
  for (const auto& [id, res] : rows) max_z = std::max(max_z, std::abs(res.z_score.value_or(0.0)));
  char buf[96];
  std::snprintf(buf, sizeof buf, "lemmas: %zu checks, max |z| = %.2f", rows.size(), max_z);
  r.summary = buf;
  return r;
}

}  // namespace

RunOutput run(const Json& config, std::size_t default_workers) {
  const Json c = normalize_config(config, default_workers);
  const std::string command = c.at("command").get<std::string>();
  try {
    if (command == "pipeline") return run_pipeline(c);
    if (command == "psi-map" || command == "relbias-map") return run_map_command(c);
    if (command == "lemmas") return run_lemmas(c);
    return run_scenario_sweep(c);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace mcbias
