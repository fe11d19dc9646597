/*
 * Copyright 2026 The minmpc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "minmpc/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "minmpc/errors.hpp"
#include "minmpc/linalg.hpp"

namespace minmpc {

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double to_double(const std::string& s, long line, const std::string& key) {
  const std::string t = trim(s);
  if (t.empty()) throw ParseError("empty number for key '" + key + "'", line, key);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw ParseError("malformed number '" + t + "' for key '" + key + "'", line, key);
  return v;
}

long long to_int(const std::string& s, long line, const std::string& key) {
  const std::string t = trim(s);
  if (t.empty()) throw ParseError("empty integer for key '" + key + "'", line, key);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw ParseError("malformed integer '" + t + "' for key '" + key + "'", line, key);
  return v;
}

std::uint64_t to_u64(const std::string& s, long line, const std::string& key) {
  const std::string t = trim(s);
  if (t.empty()) throw ParseError("empty integer for key '" + key + "'", line, key);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw ParseError("malformed integer '" + t + "' for key '" + key + "'", line, key);
  return v;
}

Vec to_vec(const std::string& s, long line, const std::string& key) {
  const std::vector<std::string> parts = split(s, ',');
  Vec v(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i)
    v(static_cast<int>(i)) = to_double(parts[i], line, key);
  return v;
}

std::string vec_text(const Vec& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i > 0) out += ",";
    out += format_double(v(i));
  }
  return out;
}

std::string mat_text(const Mat& m) {
  std::string out;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      if (r + c > 0) out += ",";
      out += format_double(m(r, c));
    }
  return out;
}

Mat to_mat2(const std::string& s, long line, const std::string& key) {
  const Vec v = to_vec(s, line, key);
  if (v.size() != 4)
    throw ParseError("key '" + key + "' needs 4 comma-separated entries", line, key);
  Mat m(2, 2);
  m << v(0), v(1), v(2), v(3);
  return m;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << content;
  if (!f.good()) throw Error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

PipelineConfig default_config() {
  PipelineConfig c;
  c.value_center = c.params.x_ref;
  c.x0 = (Vec(2) << 0.5, 0.7).finished();
  c.demo_x0 = {(Vec(2) << 0.5, 0.7).finished(), (Vec(2) << 1.2, 0.9).finished(),
               (Vec(2) << 0.8, 1.3).finished()};
  return c;
}

PipelineConfig parse_config(const std::string& text) {
  static const std::set<std::string> known = {
      "c1",          "c2",           "ts",           "x_ref",        "Q",
      "r_u",         "Q_N",          "expert_N",     "state_lb",     "penalty_weight",
      "bb_node_budget", "value_center", "steps",     "x0",           "mismatch_factor",
      "mismatch_c1", "mismatch_c2",  "noise_std",    "seed",         "demo_x0",
      "demo_steps",  "admm_rho",     "admm_tol",     "admm_max_iter"};

  std::map<std::string, std::pair<std::string, long>> kv;
  long line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key=value", line_no, "");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (known.find(key) == known.end())
      throw ParseError("unknown key '" + key + "'", line_no, key);
    kv[key] = {value, line_no};
  }

  PipelineConfig c = default_config();
  auto has = [&kv](const char* k) { return kv.find(k) != kv.end(); };
  auto val = [&kv](const char* k) -> const std::string& { return kv.at(k).first; };
  auto ln = [&kv](const char* k) { return kv.at(k).second; };

  if (has("c1")) c.params.c1 = to_double(val("c1"), ln("c1"), "c1");
  if (has("c2")) c.params.c2 = to_double(val("c2"), ln("c2"), "c2");
  if (has("ts")) c.params.ts = to_double(val("ts"), ln("ts"), "ts");
  if (has("x_ref")) c.params.x_ref = to_vec(val("x_ref"), ln("x_ref"), "x_ref");
  if (has("Q")) c.params.Q = to_mat2(val("Q"), ln("Q"), "Q");
  if (has("r_u")) c.params.r_u = to_double(val("r_u"), ln("r_u"), "r_u");
  c.params.Q_N = c.params.Q;
  if (has("Q_N")) c.params.Q_N = to_mat2(val("Q_N"), ln("Q_N"), "Q_N");
  if (has("expert_N")) c.expert_N = static_cast<int>(to_int(val("expert_N"), ln("expert_N"), "expert_N"));
  if (has("state_lb")) c.state_lb = to_double(val("state_lb"), ln("state_lb"), "state_lb");
  if (has("penalty_weight"))
    c.penalty_weight = to_double(val("penalty_weight"), ln("penalty_weight"), "penalty_weight");
  if (has("bb_node_budget"))
    c.bb_node_budget =
        static_cast<int>(to_int(val("bb_node_budget"), ln("bb_node_budget"), "bb_node_budget"));
  c.value_center = c.params.x_ref;
  if (has("value_center"))
    c.value_center = to_vec(val("value_center"), ln("value_center"), "value_center");
  if (has("steps")) c.steps = static_cast<int>(to_int(val("steps"), ln("steps"), "steps"));
  if (has("x0")) c.x0 = to_vec(val("x0"), ln("x0"), "x0");
  if (has("mismatch_factor")) {
    const double f = to_double(val("mismatch_factor"), ln("mismatch_factor"), "mismatch_factor");
    c.mismatch_c1 = f;
    c.mismatch_c2 = f;
  }
  if (has("mismatch_c1"))
    c.mismatch_c1 = to_double(val("mismatch_c1"), ln("mismatch_c1"), "mismatch_c1");
  if (has("mismatch_c2"))
    c.mismatch_c2 = to_double(val("mismatch_c2"), ln("mismatch_c2"), "mismatch_c2");
  if (has("noise_std")) c.noise_std = to_double(val("noise_std"), ln("noise_std"), "noise_std");
  if (has("seed")) c.seed = to_u64(val("seed"), ln("seed"), "seed");
  if (has("demo_x0")) {
    c.demo_x0.clear();
    for (const std::string& part : split(val("demo_x0"), ';'))
      c.demo_x0.push_back(to_vec(part, ln("demo_x0"), "demo_x0"));
  }
  if (has("demo_steps"))
    c.demo_steps = static_cast<int>(to_int(val("demo_steps"), ln("demo_steps"), "demo_steps"));
  if (has("admm_rho")) c.admm_rho = to_double(val("admm_rho"), ln("admm_rho"), "admm_rho");
  if (has("admm_tol")) c.admm_tol = to_double(val("admm_tol"), ln("admm_tol"), "admm_tol");
  if (has("admm_max_iter"))
    c.admm_max_iter =
        static_cast<int>(to_int(val("admm_max_iter"), ln("admm_max_iter"), "admm_max_iter"));

  auto line_of = [&](const char* k) { return kv.count(k) ? kv.at(k).second : 0L; };
  auto require = [&](bool ok, const char* k, const char* rule) {
    if (!ok) throw ParseError(std::string("key '") + k + "': " + rule, line_of(k), k);
  };
  require(c.params.ts > 0.0, "ts", "must be > 0");
  require(c.params.c1 > 0.0, "c1", "must be > 0");
  require(c.params.c2 > 0.0, "c2", "must be > 0");
  require(c.params.r_u >= 0.0, "r_u", "must be >= 0");
  require(c.params.x_ref.size() == 2, "x_ref", "needs 2 entries");
  require(c.x0.size() == 2, "x0", "needs 2 entries");
  require(c.value_center.size() == 2, "value_center", "needs 2 entries");
  require((c.params.Q - c.params.Q.transpose()).cwiseAbs().maxCoeff() == 0.0, "Q",
          "must be symmetric");
  require((c.params.Q_N - c.params.Q_N.transpose()).cwiseAbs().maxCoeff() == 0.0, "Q_N",
          "must be symmetric");
  require(min_eigenvalue(c.params.Q) >= -1e-12, "Q", "must be positive semidefinite");
  require(min_eigenvalue(c.params.Q_N) >= -1e-12, "Q_N", "must be positive semidefinite");
  require(c.expert_N >= 1, "expert_N", "must be >= 1");
  require(c.penalty_weight >= 0.0, "penalty_weight", "must be >= 0");
  require(c.bb_node_budget >= 1, "bb_node_budget", "must be >= 1");
  require(c.steps >= 0, "steps", "must be >= 0");
  require(c.mismatch_c1 > 0.0, "mismatch_c1", "must be > 0");
  require(c.mismatch_c2 > 0.0, "mismatch_c2", "must be > 0");
  require(c.noise_std >= 0.0, "noise_std", "must be >= 0");
  require(!c.demo_x0.empty(), "demo_x0", "needs at least one state");
  for (const StateVec& s : c.demo_x0)
    require(s.size() == 2, "demo_x0", "each state needs 2 entries");
  require(c.demo_steps >= 1, "demo_steps", "must be >= 1");
  require(c.admm_rho > 0.0, "admm_rho", "must be > 0");
  require(c.admm_tol > 0.0, "admm_tol", "must be > 0");
  require(c.admm_max_iter >= 1, "admm_max_iter", "must be >= 1");
  return c;
}

std::string serialize_config(const PipelineConfig& c) {
  std::string out;
  auto kvline = [&out](const std::string& k, const std::string& v) {
    out += k;
    out += "=";
    out += v;
    out += "\n";
  };
  kvline("c1", format_double(c.params.c1));
  kvline("c2", format_double(c.params.c2));
  kvline("ts", format_double(c.params.ts));
  kvline("x_ref", vec_text(c.params.x_ref));
  kvline("Q", mat_text(c.params.Q));
  kvline("r_u", format_double(c.params.r_u));
  kvline("Q_N", mat_text(c.params.Q_N));
  kvline("expert_N", std::to_string(c.expert_N));
  kvline("state_lb", format_double(c.state_lb));
  kvline("penalty_weight", format_double(c.penalty_weight));
  kvline("bb_node_budget", std::to_string(c.bb_node_budget));
  kvline("value_center", vec_text(c.value_center));
  kvline("steps", std::to_string(c.steps));
  kvline("x0", vec_text(c.x0));
  kvline("mismatch_c1", format_double(c.mismatch_c1));
  kvline("mismatch_c2", format_double(c.mismatch_c2));
  kvline("noise_std", format_double(c.noise_std));
  kvline("seed", std::to_string(c.seed));
  std::string demos;
  for (std::size_t i = 0; i < c.demo_x0.size(); ++i) {
    if (i > 0) demos += ";";
    demos += vec_text(c.demo_x0[i]);
  }
  kvline("demo_x0", demos);
  kvline("demo_steps", std::to_string(c.demo_steps));
  kvline("admm_rho", format_double(c.admm_rho));
  kvline("admm_tol", format_double(c.admm_tol));
  kvline("admm_max_iter", std::to_string(c.admm_max_iter));
  return out;
}

PipelineConfig load_config_file(const std::string& path) {
  if (path.empty()) return default_config();
  return parse_config(read_text_file(path));
}

void write_demo_csv(const std::string& path, const DemoDataset& dataset) {
  std::string out = "traj_id,k,x1,x2,u\n";
  for (const DemoRecord& r : dataset.records) {
    if (r.x.size() != 2 || r.w.discrete.size() != 1 || r.w.continuous.size() != 0)
      throw DataError("write_demo_csv: record shape not traj_id,k,x1,x2,u", r.step_index);
    out += std::to_string(r.traj_id);
    out += ",";
    out += std::to_string(r.step_index);
    out += ",";
    out += format_double(r.x(0));
    out += ",";
    out += format_double(r.x(1));
    out += ",";
    out += format_double(r.w.discrete(0));
    out += "\n";
  }
  write_text_file(path, out);
}

DemoDataset read_demo_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != "traj_id,k,x1,x2,u")
    throw DataError("demo CSV: bad or missing header", 1);

  DemoDataset dataset;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const long row = static_cast<long>(i + 1);
    const std::vector<std::string> f = split(lines[i], ',');
    if (f.size() != 5) throw DataError("demo CSV: expected 5 fields", row);
    DemoRecord rec;
    try {
      rec.traj_id = static_cast<int>(to_int(f[0], row, "traj_id"));
      rec.step_index = static_cast<int>(to_int(f[1], row, "k"));
      rec.x = (Vec(2) << to_double(f[2], row, "x1"), to_double(f[3], row, "x2")).finished();
      rec.w.continuous = Vec(0);
      rec.w.discrete = (Vec(1) << to_double(f[4], row, "u")).finished();
    } catch (const ParseError& e) {
      throw DataError(std::string("demo CSV: ") + e.what(), row);
    }
    if (rec.w.discrete(0) != 0.0 && rec.w.discrete(0) != 1.0)
      throw DataError("demo CSV: u must be 0 or 1", row);
    dataset.records.push_back(std::move(rec));
  }
  dataset.validate();
  return dataset;
}

void write_trajectory_csv(const std::string& path, const TrajectoryLog& log) {
  std::string out = "k,x1_true,x2_true,x1_meas,x2_meas,u,stage_cost,wall_time_s\n";
  for (const TrajectoryRow& r : log.rows) {
    out += std::to_string(r.k);
    out += ",";
    out += format_double(r.x_true(0));
    out += ",";
    out += format_double(r.x_true(1));
    out += ",";
    out += format_double(r.x_meas(0));
    out += ",";
    out += format_double(r.x_meas(1));
    out += ",";
    out += format_double(r.decision.discrete.size() == 1 ? r.decision.discrete(0) : 0.0);
    out += ",";
    out += format_double(r.stage_cost);
    out += ",";
    out += format_double(r.wall_time);
    out += "\n";
  }
  write_text_file(path, out);
}

TrajectoryLog read_trajectory_csv(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines[0] != "k,x1_true,x2_true,x1_meas,x2_meas,u,stage_cost,wall_time_s")
    throw DataError("trajectory CSV: bad or missing header", 1);

  TrajectoryLog log;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const long row = static_cast<long>(i + 1);
    const std::vector<std::string> f = split(lines[i], ',');
    if (f.size() != 8) throw DataError("trajectory CSV: expected 8 fields", row);
    TrajectoryRow r;
    try {
      r.k = static_cast<int>(to_int(f[0], row, "k"));
      r.x_true = (Vec(2) << to_double(f[1], row, "x1_true"), to_double(f[2], row, "x2_true"))
                     .finished();
      r.x_meas = (Vec(2) << to_double(f[3], row, "x1_meas"), to_double(f[4], row, "x2_meas"))
                     .finished();
      r.decision.continuous = Vec(0);
      r.decision.discrete = (Vec(1) << to_double(f[5], row, "u")).finished();
      r.stage_cost = to_double(f[6], row, "stage_cost");
      r.wall_time = to_double(f[7], row, "wall_time_s");
    } catch (const ParseError& e) {
      throw DataError(std::string("trajectory CSV: ") + e.what(), row);
    }
    if (r.decision.discrete(0) != 0.0 && r.decision.discrete(0) != 1.0)
      throw DataError("trajectory CSV: u must be 0 or 1", row);
    log.total_cost += r.stage_cost;
    log.max_wall_time = std::max(log.max_wall_time, r.wall_time);
    log.rows.push_back(std::move(r));
  }
  if (!log.rows.empty()) {
    double s = 0.0;
    for (const TrajectoryRow& r : log.rows) s += r.wall_time;
    log.mean_wall_time = s / static_cast<double>(log.rows.size());
  }
  return log;
}

void write_impute_report(const std::string& path, const ImputedValue& value,
                         const std::string& config_echo) {
  std::string out = "{\n  \"P\": [";
  for (int r = 0; r < value.P.rows(); ++r)
    for (int c = 0; c < value.P.cols(); ++c) {
      if (r + c > 0) out += ", ";
      out += format_double(value.P(r, c));
    }
  out += "],\n";
  out += "  \"r_stat_inf\": " + format_double(value.r_stat_inf) + ",\n";
  out += "  \"r_comp_inf\": " + format_double(value.r_comp_inf) + ",\n";
  out += "  \"min_eigenvalue\": " + format_double(value.min_eig) + ",\n";
  out += "  \"admm_iterations\": " + std::to_string(value.admm_iterations) + ",\n";
  out += std::string("  \"converged\": ") + (value.converged ? "true" : "false") + ",\n";
  out += "  \"config_echo\": \"" + json_escape(config_echo) + "\"\n";
  out += "}\n";
  write_text_file(path, out);
}

ImputedValue read_impute_report(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("impute report: ") + e.what(), 0);
  }
  for (const char* field : {"P", "r_stat_inf", "r_comp_inf", "min_eigenvalue",
                            "admm_iterations", "converged", "config_echo"}) {
    if (!j.contains(field))
      throw ParseError(std::string("impute report: missing field '") + field + "'", 0, field);
  }
  const auto& parr = j["P"];
  if (!parr.is_array()) throw ParseError("impute report: 'P' must be an array", 0, "P");
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(parr.size()))));
  if (n <= 0 || static_cast<std::size_t>(n) * n != parr.size())
    throw ParseError("impute report: 'P' length is not a square", 0, "P");

  ImputedValue v;
  v.P = Mat(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) v.P(r, c) = parr[r * n + c].get<double>();
  v.r_stat_inf = j["r_stat_inf"].get<double>();
  v.r_comp_inf = j["r_comp_inf"].get<double>();
  v.min_eig = j["min_eigenvalue"].get<double>();
  v.admm_iterations = j["admm_iterations"].get<int>();
  v.converged = j["converged"].get<bool>();
  return v;
}

CompareReport make_compare_report(const TrajectoryLog& a, const TrajectoryLog& b) {
  auto ratio = [](double x, double y) {
    if (x == y) return 1.0;
    return y / x;
  };
  CompareReport r;
  r.cost_a = a.total_cost;
  r.cost_b = b.total_cost;
  r.cost_difference = b.total_cost - a.total_cost;
  r.cost_ratio = ratio(a.total_cost, b.total_cost);
  r.max_wall_a = a.max_wall_time;
  r.max_wall_b = b.max_wall_time;
  r.max_wall_ratio = ratio(a.max_wall_time, b.max_wall_time);
  r.mean_wall_a = a.mean_wall_time;
  r.mean_wall_b = b.mean_wall_time;
  r.mean_wall_ratio = ratio(a.mean_wall_time, b.mean_wall_time);
  return r;
}

void write_compare_report(const std::string& path, const CompareReport& report,
                          const std::string& a_path, const std::string& b_path,
                          const std::string& config_echo) {
  std::string out = "{\n";
  out += "  \"a\": \"" + json_escape(a_path) + "\",\n";
  out += "  \"b\": \"" + json_escape(b_path) + "\",\n";
  out += "  \"cost_a\": " + format_double(report.cost_a) + ",\n";
  out += "  \"cost_b\": " + format_double(report.cost_b) + ",\n";
  out += "  \"cost_difference\": " + format_double(report.cost_difference) + ",\n";
  out += "  \"cost_ratio\": " + format_double(report.cost_ratio) + ",\n";
  out += "  \"max_wall_a\": " + format_double(report.max_wall_a) + ",\n";
  out += "  \"max_wall_b\": " + format_double(report.max_wall_b) + ",\n";
  out += "  \"max_wall_ratio\": " + format_double(report.max_wall_ratio) + ",\n";
  out += "  \"mean_wall_a\": " + format_double(report.mean_wall_a) + ",\n";
  out += "  \"mean_wall_b\": " + format_double(report.mean_wall_b) + ",\n";
  out += "  \"mean_wall_ratio\": " + format_double(report.mean_wall_ratio) + ",\n";
  out += "  \"config_echo\": \"" + json_escape(config_echo) + "\"\n";
  out += "}\n";
  write_text_file(path, out);
}

}  // namespace minmpc
