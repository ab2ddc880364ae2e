/*
 Copyright 2026 The slipwalk Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "slipwalk/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "slipwalk/errors.hpp"

namespace slipwalk::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Basics

void check_schema(const Json& j, const std::string& kind, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected a JSON object");
  const auto it = j.find("schema_version");
  if (it == j.end() || !it->is_string())
    throw SchemaError(where + ": missing schema_version");
  const std::string v = it->get<std::string>();
  int major = -1;
  const auto dot = v.find('.');
  const std::string head = v.substr(0, dot);
  const auto [p, ec] = std::from_chars(head.data(), head.data() + head.size(), major);
  if (ec != std::errc() || p != head.data() + head.size())
    throw SchemaError(where + ": malformed schema_version '" + v + "'");
  if (major != kSchemaMajor)
    throw SchemaError(where + ": unsupported schema major version " + std::to_string(major) +
                      " (reader supports " + std::to_string(kSchemaMajor) + ")");
  if (!kind.empty()) {
    const auto k = j.find("kind");
    if (k == j.end() || !k->is_string() || k->get<std::string>() != kind)
      throw SchemaError(where + ": expected kind '" + kind + "'");
  }
}

std::string read_text_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    throw InvalidParameter("file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": malformed JSON (" + e.what() + ")");
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void write_text_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw RuntimeFailure("cannot create directory " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out << text;
  if (!out) throw RuntimeFailure("write failed: " + path.string());
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

double parse_number(const std::string& s, const std::string& where) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (*b == '+') ++b;
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw SchemaError(where + ": not a number: '" + s + "'");
  return v;
}

Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json mat_json(const Eigen::MatrixXd& M) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) a.push_back(vec_json(M.row(r).transpose()));
  return a;
}

/// Strict view of a JSON object: typed getters, and finish() rejects keys
/// that no getter asked for.
class Obj {
 public:
  Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw SchemaError(where() + ": expected an object");
  }

  std::string at(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  std::string where() const { return path_.empty() ? "config" : path_; }

  const Json* raw(const std::string& k) {
    used_.insert(k);
    const auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }
  bool has(const std::string& k) const { return j_.contains(k); }

  void num(const std::string& k, double& out) {
    if (const Json* v = raw(k)) out = as_num(*v, at(k));
  }
  void integer(const std::string& k, int& out) {
    if (const Json* v = raw(k)) {
      if (!v->is_number_integer()) throw SchemaError(at(k) + ": expected an integer");
      const auto x = v->get<long long>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw SchemaError(at(k) + ": integer out of range");
      out = static_cast<int>(x);
    }
  }
  void u64(const std::string& k, std::uint64_t& out) {
    if (const Json* v = raw(k)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        throw SchemaError(at(k) + ": expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void boolean(const std::string& k, bool& out) {
    if (const Json* v = raw(k)) {
      if (!v->is_boolean()) throw SchemaError(at(k) + ": expected true or false");
      out = v->get<bool>();
    }
  }
  void str(const std::string& k, std::string& out) {
    if (const Json* v = raw(k)) {
      if (!v->is_string()) throw SchemaError(at(k) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  void numbers(const std::string& k, std::vector<double>& out) {
    if (const Json* v = raw(k)) out = as_numbers(*v, at(k));
  }
  void vec3(const std::string& k, Eigen::Vector3d& out) {
    if (const Json* v = raw(k)) {
      const auto xs = as_numbers(*v, at(k));
      if (xs.size() != 3) throw SchemaError(at(k) + ": expected 3 numbers");
      out = Eigen::Vector3d(xs[0], xs[1], xs[2]);
    }
  }
  std::optional<Obj> child(const std::string& k) {
    if (const Json* v = raw(k)) return Obj(*v, at(k));
    return std::nullopt;
  }
  void finish() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key()))
        throw SchemaError(where() + ": unknown field '" + item.key() + "'");
  }

  static double as_num(const Json& v, const std::string& where) {
    if (!v.is_number()) throw SchemaError(where + ": expected a number");
    return v.get<double>();
  }
  static std::vector<double> as_numbers(const Json& v, const std::string& where) {
    if (!v.is_array()) throw SchemaError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(as_num(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
  }
  static Eigen::MatrixXd as_matrix(const Json& v, const std::string& where, int rows, int cols) {
    if (!v.is_array() || static_cast<int>(v.size()) != rows)
      throw SchemaError(where + ": expected " + std::to_string(rows) + " rows");
    Eigen::MatrixXd M(rows, cols);
    for (int r = 0; r < rows; ++r) {
      const auto xs = as_numbers(v[r], where + "[" + std::to_string(r) + "]");
      if (static_cast<int>(xs.size()) != cols)
        throw SchemaError(where + "[" + std::to_string(r) + "]: expected " +
                          std::to_string(cols) + " columns");
      for (int c = 0; c < cols; ++c) M(r, c) = xs[c];
    }
    return M;
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void read_schema_header(Obj& o, const std::string& kind, const Json& j) {
  check_schema(j, kind, o.where());
  o.raw("schema_version");
  if (!kind.empty()) o.raw("kind");
}

Json header(const char* kind) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  return j;
}

}  // namespace

Json vectors_json(const std::vector<Eigen::VectorXd>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(vec_json(x));
  return a;
}

Json polytope_json(const Polytope& p) {
  Json j;
  j["dim"] = p.dim;
  j["vertex_count"] = p.vertices.size();
  j["vertices"] = vectors_json(p.vertices);
  return j;
}

// ---------------------------------------------------------------------------
// CSV

bool CsvTable::has_column(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

int CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw SchemaError(source + ": missing column '" + name + "'");
  return static_cast<int>(it - header.begin());
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const int c = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.push_back(parse_number(rows[r][c], source + " row " + std::to_string(r + 2) + " column '" +
                                               name + "'"));
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    for (auto& c : cells) {
      const auto b = c.find_first_not_of(" \t");
      const auto e = c.find_last_not_of(" \t");
      c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
    }
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      std::set<std::string> seen;
      for (const auto& h : t.header)
        if (!seen.insert(h).second) throw SchemaError(source + ": duplicate column '" + h + "'");
      continue;
    }
    if (cells.size() != t.header.size())
      throw SchemaError(source + " line " + std::to_string(line_no) + ": expected " +
                        std::to_string(t.header.size()) + " fields, found " +
                        std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw SchemaError(source + ": empty CSV (no header row)");
  return t;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_text_file(path), path.string()); }

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

CsvWriter& CsvWriter::text(const std::string& v) {
  if (cells_++) out_ += ',';
  out_ += v;
  return *this;
}

CsvWriter& CsvWriter::num(double v) { return text(format_number(v)); }
CsvWriter& CsvWriter::integer(long long v) { return text(std::to_string(v)); }
CsvWriter& CsvWriter::empty() { return text(""); }

void CsvWriter::end_row() {
  if (cells_ != width_)
    throw ContractViolation("CSV row has " + std::to_string(cells_) + " cells, header has " +
                            std::to_string(width_));
  out_ += '\n';
  cells_ = 0;
}

std::string trace_csv(const std::vector<StepTrace>& traces) {
  CsvWriter w({"t", "step_index", "domain", "P_x", "P_y", "P_z", "Pdot_x", "Pdot_y", "Pdot_z",
               "L_left", "s_left", "Fz_left", "contact_left", "L_right", "s_right", "Fz_right",
               "contact_right"});
  for (const auto& tr : traces) {
    for (const auto& s : tr.samples) {
      w.num(s.t).integer(s.step_index).text(to_string(s.domain));
      for (int i = 0; i < 3; ++i) w.num(s.P(i));
      for (int i = 0; i < 3; ++i) w.num(s.Pdot(i));
      for (int l = 0; l < 2; ++l) w.num(s.L[l]).num(s.s[l]).num(s.F_z[l]).integer(s.contact[l]);
      w.end_row();
    }
  }
  return w.str();
}

Json trace_json(const std::vector<StepTrace>& traces, const std::string& name,
                const std::string& scenario_kind, std::uint64_t seed) {
  Json j = header("trace");
  j["name"] = name;
  j["scenario"] = scenario_kind;
  j["seed"] = seed;
  Json steps = Json::array();
  for (const auto& tr : traces) {
    Json s;
    s["step_index"] = tr.step_index;
    s["stance"] = tr.stance_start == Side::Left ? "L" : "R";
    s["x_start"] = vec_json(tr.x_start);
    s["x_end"] = vec_json(tr.x_end);
    s["u"] = vec_json(tr.u);
    s["u_next"] = vec_json(tr.u_next);
    s["P_start"] = vec_json(tr.P_start);
    s["P_end"] = vec_json(tr.P_end);
    s["T_dsp"] = tr.T_dsp;
    s["T_ssp"] = tr.T_ssp;
    steps.push_back(s);
  }
  j["steps"] = steps;
  // Column-wise copy of the CSV, so both forms carry the same numbers.
  const CsvTable t = parse_csv(trace_csv(traces), "trace");
  Json cols;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    Json col = Json::array();
    for (const auto& row : t.rows) {
      if (t.header[c] == "domain")
        col.push_back(row[c]);
      else
        col.push_back(parse_number(row[c], "trace"));
    }
    cols[t.header[c]] = col;
  }
  j["samples"] = cols;
  return j;
}

ForceSeries read_force_series(const CsvTable& trace) {
  ForceSeries f;
  f.t = trace.column("t");
  f.Fz_left = trace.column("Fz_left");
  f.Fz_right = trace.column("Fz_right");
  return f;
}

std::vector<std::string> plane_components(int dim) {
  if (dim == 2) return {"p", "v"};
  if (dim == 3) return {"pos", "p", "v"};
  throw InvalidParameter("plane dimension must be 2 or 3");
}

namespace {

const char* const kPlaneNames[2] = {"x", "y"};
const char* const kQuantities[5] = {"aslip", "hlip", "e", "w", "wcl"};

std::string quantity_column(const char* q, int plane, const std::string& comp) {
  return std::string(q) + "_" + kPlaneNames[plane] + "_" + comp;
}

}  // namespace

std::string steps_csv(const std::vector<StepRecord>& records, const PlaneModel planes[2]) {
  std::vector<std::string> header = {"k",   "stance", "foot_x", "foot_y", "p_x",  "v_x",
                                     "p_y", "v_y",    "u_x",    "u_y",    "uh_x", "uh_y"};
  for (int i = 0; i < 2; ++i)
    for (const char* q : kQuantities)
      for (const auto& c : plane_components(planes[i].dim))
        header.push_back(quantity_column(q, i, c));
  CsvWriter w(header);
  for (const auto& r : records) {
    w.integer(r.k).text(r.stance == Side::Left ? "L" : "R");
    w.num(r.stance_foot(0)).num(r.stance_foot(1));
    for (int i = 0; i < 4; ++i) w.num(r.x_rel(i));
    w.num(r.u(0)).num(r.u(1)).num(r.u_hlip(0)).num(r.u_hlip(1));
    for (int i = 0; i < 2; ++i) {
      const int d = planes[i].dim;
      const Eigen::VectorXd* vs[5] = {&r.x_aslip[i], &r.x_hlip[i], &r.e[i], &r.w[i], &r.w_cl[i]};
      for (const Eigen::VectorXd* v : vs) {
        for (int c = 0; c < d; ++c) {
          if (v->size() == d)
            w.num((*v)(c));
          else
            w.empty();
        }
      }
    }
    w.end_row();
  }
  return w.str();
}

std::vector<StepRecord> read_steps(const CsvTable& table, const PlaneModel planes[2]) {
  // Resolve every column first so a missing one is reported before any parsing.
  const auto num = [&](const std::string& name) { return table.column(name); };
  const int stance_col = table.column_index("stance");
  const auto k = num("k");
  const std::vector<double> base[] = {num("foot_x"), num("foot_y"), num("p_x"),  num("v_x"),
                                      num("p_y"),    num("v_y"),    num("u_x"),  num("u_y"),
                                      num("uh_x"),   num("uh_y")};
  std::vector<std::vector<double>> cols[2][5];
  for (int i = 0; i < 2; ++i)
    for (int q = 0; q < 5; ++q)
      for (const auto& c : plane_components(planes[i].dim))
        cols[i][q].push_back(num(quantity_column(kQuantities[q], i, c)));

  std::vector<StepRecord> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    StepRecord s;
    if (!std::isfinite(k[r]) || k[r] != std::floor(k[r]))
      throw SchemaError(table.source + " row " + std::to_string(r + 2) + ": bad step index");
    s.k = static_cast<int>(k[r]);
    const std::string& st = table.rows[r][stance_col];
    if (st != "L" && st != "R")
      throw SchemaError(table.source + " row " + std::to_string(r + 2) + ": stance must be L or R");
    s.stance = st == "L" ? Side::Left : Side::Right;
    s.stance_foot = Eigen::Vector2d(base[0][r], base[1][r]);
    s.x_rel = Eigen::Vector4d(base[2][r], base[3][r], base[4][r], base[5][r]);
    s.u = Eigen::Vector2d(base[6][r], base[7][r]);
    s.u_hlip = Eigen::Vector2d(base[8][r], base[9][r]);
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd* dst[5] = {&s.x_aslip[i], &s.x_hlip[i], &s.e[i], &s.w[i], &s.w_cl[i]};
      for (int q = 0; q < 5; ++q) {
        const int d = planes[i].dim;
        Eigen::VectorXd v(d);
        bool any_missing = false;
        for (int c = 0; c < d; ++c) {
          v(c) = cols[i][q][c][r];
          any_missing = any_missing || std::isnan(v(c));
        }
        // Disturbances are absent on the last row; everything else is required.
        if (any_missing && q < 3)
          throw SchemaError(table.source + " row " + std::to_string(r + 2) + ": empty " +
                            kQuantities[q] + " value in plane " + kPlaneNames[i]);
        if (!any_missing) *dst[q] = v;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

TrajectorySamples read_trajectory_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  TrajectorySamples s;
  s.t = t.column("t");
  s.x_d = t.column("x_d");
  s.y_d = t.column("y_d");
  const bool vx = t.has_column("vx_d"), vy = t.has_column("vy_d");
  if (vx != vy)
    throw SchemaError(path.string() + ": missing column '" + std::string(vx ? "vy_d" : "vx_d") +
                      "' (velocities come in pairs)");
  if (vx) {
    s.vx_d = t.column("vx_d");
    s.vy_d = t.column("vy_d");
  }
  if (s.t.size() < 2) throw SchemaError(path.string() + ": trajectory needs at least two rows");
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Parameter blocks

namespace {

Json aslip_json(const ASlipParams& p) {
  Json j;
  j["m"] = p.m;
  j["K_s"] = p.K_s;
  j["D_s"] = p.D_s;
  j["g"] = p.g;
  j["Kp_leg"] = p.Kp_leg;
  j["Kd_leg"] = p.Kd_leg;
  j["L_min"] = p.L_min;
  j["L_max"] = p.L_max;
  j["swing_clearance"] = p.swing_clearance;
  return j;
}

void read_aslip(Obj o, ASlipParams& p) {
  o.num("m", p.m);
  o.num("K_s", p.K_s);
  o.num("D_s", p.D_s);
  o.num("g", p.g);
  o.num("Kp_leg", p.Kp_leg);
  o.num("Kd_leg", p.Kd_leg);
  o.num("L_min", p.L_min);
  o.num("L_max", p.L_max);
  o.num("swing_clearance", p.swing_clearance);
  o.finish();
}

Json spec_json(const GaitSpec& s) {
  Json j;
  j["z0_target"] = s.z0_target;
  j["osc_amp"] = s.osc_amp;
  j["T_step"] = s.T_step;
  j["n_coef"] = s.n_coef;
  j["dsp_fraction"] = s.dsp_fraction;
  j["seed"] = s.seed;
  return j;
}

void read_spec(Obj o, GaitSpec& s) {
  o.num("z0_target", s.z0_target);
  o.num("osc_amp", s.osc_amp);
  o.num("T_step", s.T_step);
  o.integer("n_coef", s.n_coef);
  o.num("dsp_fraction", s.dsp_fraction);
  o.u64("seed", s.seed);
  o.finish();
}

Json hlip_json(const HlipParams& h) {
  Json j;
  j["z0"] = h.z0;
  j["g"] = h.g;
  j["T_ssp"] = h.T_ssp;
  j["T_dsp"] = h.T_dsp;
  return j;
}

void read_hlip(Obj o, HlipParams& h) {
  o.num("z0", h.z0);
  o.num("g", h.g);
  o.num("T_ssp", h.T_ssp);
  o.num("T_dsp", h.T_dsp);
  o.finish();
}

Json sim_json(const SimOptions& s) {
  Json j;
  j["dt"] = s.dt;
  j["sample_stride"] = s.sample_stride;
  j["event_tol"] = s.event_tol;
  j["freeze_fraction"] = s.freeze_fraction;
  j["fall_fraction"] = s.fall_fraction;
  return j;
}

void read_sim(Obj o, SimOptions& s) {
  o.num("dt", s.dt);
  o.integer("sample_stride", s.sample_stride);
  o.num("event_tol", s.event_tol);
  o.num("freeze_fraction", s.freeze_fraction);
  o.num("fall_fraction", s.fall_fraction);
  o.finish();
  if (!(s.dt > 0.0) || s.sample_stride < 1 || !(s.event_tol > 0.0) ||
      !(s.freeze_fraction >= 0.0 && s.freeze_fraction < 1.0) ||
      !(s.fall_fraction > 0.0 && s.fall_fraction < 1.0))
    throw InvalidParameter("sim options out of range");
}

Json synthesis_json(const GaitSynthesisOptions& s) {
  Json j;
  j["max_iterations"] = s.max_iterations;
  j["settle_steps"] = s.settle_steps;
  j["height_tol"] = s.height_tol;
  j["oscillation_tol"] = s.oscillation_tol;
  j["periodicity_tol"] = s.periodicity_tol;
  j["regularization"] = s.regularization;
  return j;
}

void read_synthesis(Obj o, GaitSynthesisOptions& s) {
  o.integer("max_iterations", s.max_iterations);
  o.integer("settle_steps", s.settle_steps);
  o.num("height_tol", s.height_tol);
  o.num("oscillation_tol", s.oscillation_tol);
  o.num("periodicity_tol", s.periodicity_tol);
  o.num("regularization", s.regularization);
  o.finish();
}

ReferenceMode mode_from_string(const std::string& s, const std::string& where) {
  if (s == "P1") return ReferenceMode::P1;
  if (s == "P2") return ReferenceMode::P2;
  throw SchemaError(where + ": orbit mode must be P1 or P2");
}

Json orbit_config_json(const OrbitConfig& o) {
  Json j;
  j["mode"] = to_string(o.mode);
  j["v_d"] = o.v_d;
  if (o.mode == ReferenceMode::P2) j["u_L"] = o.u_L;
  return j;
}

void read_orbit_config(Obj o, OrbitConfig& c) {
  std::string mode = to_string(c.mode);
  o.str("mode", mode);
  c.mode = mode_from_string(mode, o.at("mode"));
  o.num("v_d", c.v_d);
  o.num("u_L", c.u_L);
  o.finish();
}

GainConfig::Kind gain_kind_from_string(const std::string& s, const std::string& where) {
  if (s == "deadbeat") return GainConfig::Kind::Deadbeat;
  if (s == "lqr") return GainConfig::Kind::Lqr;
  if (s == "user") return GainConfig::Kind::User;
  throw SchemaError(where + ": gain kind must be deadbeat, lqr or user");
}

Json gain_json(const GainConfig& g) {
  Json j;
  j["kind"] = to_string(g.kind);
  j["dim"] = g.dim;
  if (g.kind == GainConfig::Kind::User) j["K"] = g.K;
  if (g.kind == GainConfig::Kind::Lqr) {
    if (!g.Q_diag.empty()) j["Q_diag"] = g.Q_diag;
    j["R"] = g.R;
  }
  return j;
}

void read_gain(Obj o, GainConfig& g) {
  std::string kind = to_string(g.kind);
  o.str("kind", kind);
  g.kind = gain_kind_from_string(kind, o.at("kind"));
  o.integer("dim", g.dim);
  o.numbers("K", g.K);
  o.numbers("Q_diag", g.Q_diag);
  o.num("R", g.R);
  o.finish();
}

const char* terminal_string(TerminalMode m) {
  return m == TerminalMode::Equality ? "equality" : "cost";
}

TerminalMode terminal_from_string(const std::string& s, const std::string& where) {
  if (s == "cost") return TerminalMode::CostOnly;
  if (s == "equality") return TerminalMode::Equality;
  throw SchemaError(where + ": terminal must be cost or equality");
}

void read_Q(Obj& o, Eigen::Matrix3d& Q) {
  if (o.has("Q") && o.has("Q_diag")) throw SchemaError(o.where() + ": give Q or Q_diag, not both");
  if (const Json* v = o.raw("Q")) Q = Obj::as_matrix(*v, o.at("Q"), 3, 3);
  if (const Json* v = o.raw("Q_diag")) {
    const auto d = Obj::as_numbers(*v, o.at("Q_diag"));
    if (d.size() != 3) throw SchemaError(o.at("Q_diag") + ": expected 3 numbers");
    Q = Eigen::Vector3d(d[0], d[1], d[2]).asDiagonal();
  }
}

Json sinusoid_json(const SinusoidConfig& s) {
  Json j;
  j["forward_speed"] = s.forward_speed;
  j["amplitude"] = s.amplitude;
  j["period"] = s.period;
  j["ramp_time"] = s.ramp_time;
  return j;
}

void read_sinusoid(Obj o, SinusoidConfig& s) {
  o.num("forward_speed", s.forward_speed);
  o.num("amplitude", s.amplitude);
  o.num("period", s.period);
  o.num("ramp_time", s.ramp_time);
  o.finish();
}

}  // namespace

// ---------------------------------------------------------------------------
// Gait files

Json gait_to_json(const GaitFile& g) {
  Json j = header("gait");
  j["basis"] = "fourier";
  j["T_step"] = g.gait.T_step;
  j["coefficients"] = g.gait.coef;
  Json periods;
  periods["T_ssp"] = g.gait.T_ssp;
  periods["T_dsp"] = g.gait.T_dsp;
  j["periods"] = periods;
  j["z0_avg"] = g.gait.z0_avg;
  Json pre;
  pre["z"] = g.gait.z_pre;
  pre["zdot"] = g.gait.zdot_pre;
  pre["L_stance"] = g.gait.L_stance_pre;
  pre["Ldot_stance"] = g.gait.Ldot_stance_pre;
  pre["L_swing"] = g.gait.L_swing_pre;
  pre["Ldot_swing"] = g.gait.Ldot_swing_pre;
  j["pre_impact"] = pre;
  j["hlip"] = hlip_json(g.hlip);
  j["spec"] = spec_json(g.spec);
  j["aslip"] = aslip_json(g.aslip);
  return j;
}

GaitFile gait_from_json(const Json& j) {
  Obj o(j, "gait");
  read_schema_header(o, "gait", j);
  GaitFile g;
  std::string basis = "fourier";
  o.str("basis", basis);
  if (basis != "fourier") throw SchemaError("gait.basis: unsupported basis '" + basis + "'");
  o.num("T_step", g.gait.T_step);
  if (!o.has("coefficients")) throw SchemaError("gait: missing field 'coefficients'");
  o.numbers("coefficients", g.gait.coef);
  if (auto p = o.child("periods")) {
    p->num("T_ssp", g.gait.T_ssp);
    p->num("T_dsp", g.gait.T_dsp);
    p->finish();
  }
  o.num("z0_avg", g.gait.z0_avg);
  if (auto p = o.child("pre_impact")) {
    p->num("z", g.gait.z_pre);
    p->num("zdot", g.gait.zdot_pre);
    p->num("L_stance", g.gait.L_stance_pre);
    p->num("Ldot_stance", g.gait.Ldot_stance_pre);
    p->num("L_swing", g.gait.L_swing_pre);
    p->num("Ldot_swing", g.gait.Ldot_swing_pre);
    p->finish();
  }
  if (auto p = o.child("hlip")) read_hlip(*p, g.hlip);
  if (auto p = o.child("spec")) read_spec(*p, g.spec);
  if (auto p = o.child("aslip")) read_aslip(*p, g.aslip);
  o.finish();
  g.gait.validate();
  g.hlip.validate();
  return g;
}

Json gait_report_json(const GaitSpec& spec, const GaitSearchResult& best, const HlipParams& hlip,
                      bool converged, const std::string& message) {
  Json j = header("gait-report");
  j["status"] = converged ? "converged" : "failed";
  j["message"] = message;
  j["iterations"] = best.iterations;
  j["scaled_residual_norm"] = best.residual;
  const GaitMetrics& m = best.metrics;
  Json metrics;
  metrics["mean_height"] = m.mean_height;
  metrics["oscillation"] = m.oscillation;
  metrics["min_vertical_force"] = m.min_vertical_force;
  metrics["T_ssp"] = m.T_ssp;
  metrics["T_dsp"] = m.T_dsp;
  metrics["periodicity"] = m.periodicity;
  metrics["L_min"] = m.L_min;
  metrics["L_max"] = m.L_max;
  j["metrics"] = metrics;
  Json residuals;
  residuals["height"] = m.mean_height - spec.z0_target;
  residuals["oscillation"] = m.oscillation - spec.osc_amp;
  residuals["periodicity"] = m.periodicity;
  j["residuals"] = residuals;
  j["hlip"] = hlip_json(hlip);
  j["spec"] = spec_json(spec);
  return j;
}

// ---------------------------------------------------------------------------
// Scenario configuration

fs::path ScenarioFile::resolve(const std::string& p) const {
  const fs::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path;
  return base_dir / path;
}

Json scenario_to_json(const ScenarioFile& s) {
  const ScenarioConfig& c = s.config;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = to_string(c.kind);
  j["name"] = c.name;
  j["n_steps"] = c.n_steps;
  j["seed"] = c.seed;
  j["u_max"] = c.u_max;
  j["min_foot_separation"] = c.min_foot_separation;
  j["enforce_lateral_separation"] = c.enforce_lateral_separation;
  if (!s.output_dir.empty()) j["output_dir"] = s.output_dir;
  if (!s.gait_file.empty()) j["gait_file"] = s.gait_file;
  j["aslip"] = aslip_json(c.aslip);
  j["gait"] = spec_json(c.gait_spec);
  j["synthesis"] = synthesis_json(c.synthesis);
  j["sim"] = sim_json(c.sim);
  Json orbit;
  orbit["x"] = orbit_config_json(c.x_orbit);
  orbit["y"] = orbit_config_json(c.y_orbit);
  j["orbit"] = orbit;
  Json gains;
  gains["x"] = gain_json(c.x_gain);
  gains["y"] = gain_json(c.y_gain);
  gains["orbit"] = gain_json(c.orbit_gain);
  j["gains"] = gains;
  Json plan;
  plan["horizon"] = c.horizon;
  plan["Q"] = mat_json(c.Q);
  plan["R"] = c.R;
  plan["terminal"] = terminal_string(c.terminal);
  plan["x_target"] = vec_json(c.x_target);
  plan["y_target"] = vec_json(c.y_target);
  j["plan"] = plan;
  j["sinusoid"] = sinusoid_json(c.sinusoid);
  if (!s.trajectory_file.empty()) j["trajectory_file"] = s.trajectory_file;
  j["controller_enabled"] = c.controller_enabled;
  return j;
}

ScenarioFile scenario_from_json(const Json& j, const fs::path& base_dir) {
  Obj o(j, "");
  read_schema_header(o, "", j);
  ScenarioFile s;
  s.base_dir = base_dir;
  ScenarioConfig& c = s.config;
  o.str("name", c.name);
  std::string kind = to_string(c.kind);
  o.str("kind", kind);
  c.kind = scenario_kind_from_string(kind);
  o.integer("n_steps", c.n_steps);
  o.u64("seed", c.seed);
  o.num("u_max", c.u_max);
  o.num("min_foot_separation", c.min_foot_separation);
  o.boolean("enforce_lateral_separation", c.enforce_lateral_separation);
  o.str("output_dir", s.output_dir);
  o.str("gait_file", s.gait_file);
  if (auto p = o.child("aslip")) read_aslip(*p, c.aslip);
  if (auto p = o.child("gait")) read_spec(*p, c.gait_spec);
  if (auto p = o.child("synthesis")) read_synthesis(*p, c.synthesis);
  if (auto p = o.child("sim")) read_sim(*p, c.sim);
  if (auto p = o.child("orbit")) {
    if (auto x = p->child("x")) read_orbit_config(*x, c.x_orbit);
    if (auto y = p->child("y")) read_orbit_config(*y, c.y_orbit);
    p->finish();
  }
  if (auto p = o.child("gains")) {
    if (auto x = p->child("x")) read_gain(*x, c.x_gain);
    if (auto y = p->child("y")) read_gain(*y, c.y_gain);
    if (auto g = p->child("orbit")) read_gain(*g, c.orbit_gain);
    p->finish();
  }
  if (auto p = o.child("plan")) {
    p->integer("horizon", c.horizon);
    read_Q(*p, c.Q);
    p->num("R", c.R);
    std::string terminal = terminal_string(c.terminal);
    p->str("terminal", terminal);
    c.terminal = terminal_from_string(terminal, p->at("terminal"));
    p->vec3("x_target", c.x_target);
    p->vec3("y_target", c.y_target);
    p->finish();
  }
  if (auto p = o.child("sinusoid")) read_sinusoid(*p, c.sinusoid);
  o.str("trajectory_file", s.trajectory_file);
  o.boolean("controller_enabled", c.controller_enabled);
  o.finish();
  // The synthesis simulates with the scenario's integration settings.
  c.synthesis.sim = c.sim;
  return s;
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw InvalidParameter("override must look like key.path=value: '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::exception&) {
    value = text;
  }
  Json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw InvalidParameter("override has an empty key: '" + assignment + "'");
    if (!node->is_object()) throw InvalidParameter("override path is not an object: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key)) (*node)[key] = Json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

ScenarioFile load_scenario(const fs::path& path, const std::vector<std::string>& overrides) {
  Json j = read_json_file(path);
  for (const auto& o : overrides) apply_override(j, o);
  ScenarioFile s = scenario_from_json(j, path.parent_path());
  if (!s.trajectory_file.empty())
    s.config.trajectory = read_trajectory_csv(s.resolve(s.trajectory_file));
  s.config.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Simulation outputs

Json plane_model_json(const PlaneModel& m) {
  Json j;
  j["dim"] = m.dim;
  j["gain"] = m.gain_kind;
  j["A"] = mat_json(m.A);
  j["B"] = vec_json(m.B);
  j["K"] = vec_json(m.K.transpose());
  j["spectral_radius"] = spectral_radius(m.A_cl());
  return j;
}

Json summary_json(const ScenarioResult& r, const ScenarioFile& scenario,
                  const std::vector<std::string>& files) {
  Json j = header("scenario-summary");
  j["name"] = r.config.name;
  j["scenario"] = to_string(r.config.kind);
  j["seed"] = r.config.seed;
  Json csv;
  csv["schema_version"] = kSchemaVersion;
  csv["separator"] = ",";
  csv["decimal"] = ".";
  j["csv"] = csv;
  j["files"] = files;
  ScenarioFile echo = scenario;
  echo.config = r.config;
  j["config"] = scenario_to_json(echo);
  j["hlip"] = hlip_json(r.hlip);
  Json planes;
  planes["x"] = plane_model_json(r.planes[0]);
  planes["y"] = plane_model_json(r.planes[1]);
  j["planes"] = planes;
  const ScenarioSummary& s = r.summary;
  Json res;
  res["completed_steps"] = s.completed_steps;
  res["failed"] = s.failed;
  res["failure"] = s.failure;
  res["mean_velocity"] = vec_json(s.mean_velocity);
  Json h;
  h["mean"] = s.height_mean;
  h["min"] = s.height_min;
  h["max"] = s.height_max;
  res["height"] = h;
  res["final_position"] = vec_json(s.final_position);
  res["final_velocity"] = vec_json(s.final_velocity);
  res["net_displacement"] = vec_json(s.net_displacement);
  Json conv;
  conv["x_one_step"] = s.convergence_x;
  conv["y_two_step"] = s.convergence_y;
  conv["from_step"] = 10;
  res["convergence"] = conv;
  res["min_vertical_force"] = s.min_vertical_force;
  res["mpc_fallbacks"] = s.mpc_fallbacks;
  res["separation_violations"] = s.separation_violations;
  j["summary"] = res;
  return j;
}

void planes_from_summary(const Json& summary, PlaneModel planes[2]) {
  check_schema(summary, "scenario-summary", "summary");
  const auto it = summary.find("planes");
  if (it == summary.end() || !it->is_object()) throw SchemaError("summary: missing field 'planes'");
  for (int i = 0; i < 2; ++i) {
    const std::string where = std::string("summary.planes.") + kPlaneNames[i];
    const auto p = it->find(kPlaneNames[i]);
    if (p == it->end())
      throw SchemaError("summary.planes: missing field '" + std::string(kPlaneNames[i]) + "'");
    for (const char* f : {"dim", "A", "B", "K"})
      if (!p->contains(f)) throw SchemaError(where + ": missing field '" + f + "'");
    if (!(*p)["dim"].is_number_integer()) throw SchemaError(where + ".dim: expected an integer");
    const int d = (*p)["dim"].get<int>();
    if (d != 2 && d != 3) throw SchemaError(where + ".dim: must be 2 or 3");
    PlaneModel& m = planes[i];
    m.dim = d;
    m.A = Obj::as_matrix((*p)["A"], where + ".A", d, d);
    const auto B = Obj::as_numbers((*p)["B"], where + ".B");
    const auto K = Obj::as_numbers((*p)["K"], where + ".K");
    if (static_cast<int>(B.size()) != d || static_cast<int>(K.size()) != d)
      throw SchemaError(where + ": B and K need " + std::to_string(d) + " entries");
    m.B = Eigen::Map<const Eigen::VectorXd>(B.data(), d);
    m.K = Eigen::Map<const Eigen::RowVectorXd>(K.data(), d);
    m.gain_kind = p->value("gain", std::string("user"));
  }
}

// ---------------------------------------------------------------------------
// Plans

PlanProblem plan_problem_from_json(const Json& j, const fs::path& base_dir) {
  Obj o(j, "plan");
  read_schema_header(o, "plan-problem", j);
  PlanProblem p;
  o.integer("N", p.N);
  o.num("u_max", p.u_max);
  read_Q(o, p.Q);
  o.num("R", p.R);
  std::string terminal = terminal_string(p.terminal);
  o.str("terminal", terminal);
  p.terminal = terminal_from_string(terminal, o.at("terminal"));
  o.integer("first_step", p.first_step);
  if (p.N < 1) throw InvalidParameter("plan horizon N must be at least 1");

  std::optional<HlipParams> hlip;
  if (auto h = o.child("hlip")) {
    HlipParams hp;
    read_hlip(*h, hp);
    hp.validate();
    hlip = hp;
  }
  const Json* planes = o.raw("planes");
  if (!planes || !planes->is_array() || planes->empty() || planes->size() > 2)
    throw SchemaError("plan.planes: expected one or two plane objects");

  std::optional<TrajectorySource> source;
  double t0 = 0.0;
  if (auto t = o.child("trajectory")) {
    if (!hlip) throw SchemaError("plan.trajectory: needs the hlip block for step timing");
    ScenarioConfig sc;
    sc.kind = ScenarioKind::TrajectoryTracking;
    std::string file;
    t->str("file", file);
    if (auto s = t->child("sinusoid")) read_sinusoid(*s, sc.sinusoid);
    t->num("t0", t0);
    t->finish();
    if (!file.empty()) {
      const fs::path fp(file);
      sc.trajectory =
          read_trajectory_csv(fp.is_absolute() || base_dir.empty() ? fp : base_dir / fp);
    }
    source = target_source(sc, *hlip);
  }

  for (std::size_t i = 0; i < planes->size(); ++i) {
    Obj po((*planes)[i], "plan.planes[" + std::to_string(i) + "]");
    PlanePlan pl;
    if (const Json* s2s = po.raw("s2s")) {
      Obj so(*s2s, po.at("s2s"));
      const Json* A = so.raw("A");
      const Json* B = so.raw("B");
      if (!A || !B) throw SchemaError(po.at("s2s") + ": needs A and B");
      pl.s2s.A = Obj::as_matrix(*A, so.at("A"), 3, 3);
      const auto b = Obj::as_numbers(*B, so.at("B"));
      if (b.size() != 3) throw SchemaError(so.at("B") + ": expected 3 numbers");
      pl.s2s.B = Eigen::Vector3d(b[0], b[1], b[2]);
      so.finish();
    } else if (hlip) {
      pl.s2s = extend_s2s(s2s_matrices(*hlip));
    } else {
      throw SchemaError(po.where() + ": needs s2s matrices or a top-level hlip block");
    }
    po.vec3("x0", pl.x0);
    po.num("min_step", pl.min_step);
    const bool has_target = po.has("target"), has_const = po.has("target_constant");
    if (has_target + has_const + (source ? 1 : 0) != 1)
      throw SchemaError(po.where() +
                        ": give exactly one of target, target_constant or a top-level trajectory");
    if (const Json* t = po.raw("target")) {
      if (!t->is_array()) throw SchemaError(po.at("target") + ": expected an array");
      for (std::size_t k = 0; k < t->size(); ++k) {
        const auto xs = Obj::as_numbers((*t)[k], po.at("target") + "[" + std::to_string(k) + "]");
        if (xs.size() != 3) throw SchemaError(po.at("target") + ": entries need 3 numbers");
        pl.target.emplace_back(xs[0], xs[1], xs[2]);
      }
    }
    if (has_const) {
      Eigen::Vector3d c;
      po.vec3("target_constant", c);
      pl.target.assign(p.N, c);
    }
    if (source) {
      for (int k = 0; k < p.N; ++k)
        pl.target.push_back((*source)(static_cast<int>(i), t0 + (k + 1) * hlip->period()));
    }
    po.finish();
    p.planes.push_back(std::move(pl));
  }
  o.finish();
  p.validate();
  return p;
}

Json plan_problem_to_json(const PlanProblem& p) {
  Json j = header("plan-problem");
  j["N"] = p.N;
  j["u_max"] = p.u_max;
  j["Q"] = mat_json(p.Q);
  j["R"] = p.R;
  j["terminal"] = terminal_string(p.terminal);
  j["first_step"] = p.first_step;
  Json planes = Json::array();
  for (const auto& pl : p.planes) {
    Json q;
    Json s2s;
    s2s["A"] = mat_json(pl.s2s.A);
    s2s["B"] = vec_json(pl.s2s.B);
    q["s2s"] = s2s;
    q["x0"] = vec_json(pl.x0);
    q["min_step"] = pl.min_step;
    Json t = Json::array();
    for (const auto& x : pl.target) t.push_back(vec_json(x));
    q["target"] = t;
    planes.push_back(q);
  }
  j["planes"] = planes;
  return j;
}

Json plan_solution_to_json(const PlanSolution& s) {
  Json j = header("plan-solution");
  j["status"] = s.status;
  j["objective"] = s.objective;
  j["kkt_residual"] = s.kkt_residual;
  j["iterations"] = s.iterations;
  Json planes = Json::array();
  for (std::size_t i = 0; i < s.u_seq.size(); ++i) {
    Json q;
    q["u"] = s.u_seq[i];
    Json xs = Json::array();
    for (const auto& x : s.x_seq[i]) xs.push_back(vec_json(x));
    q["x"] = xs;
    planes.push_back(q);
  }
  j["planes"] = planes;
  return j;
}

// ---------------------------------------------------------------------------
// Orbits

Json orbit_json(const HlipParams& hp, double v_d_x, double v_d_y, double u_L) {
  hp.validate();
  const LinearS2S s2s = s2s_matrices(hp);
  const P1Orbit p1 = p1_orbit(hp, v_d_x);
  const P2Orbit p2 = p2_orbit(hp, v_d_y, u_L);
  Json j = header("orbit");
  j["hlip"] = hlip_json(hp);
  j["lambda"] = hp.lambda();
  Json s;
  s["A"] = mat_json(s2s.A);
  s["B"] = vec_json(s2s.B);
  j["s2s"] = s;
  Json a;
  a["v_d"] = p1.v_d;
  a["p_star"] = p1.p_star;
  a["v_star"] = p1.v_star;
  a["u_star"] = p1.u_star;
  a["sigma1"] = p1.sigma1;
  j["P1"] = a;
  Json b;
  b["v_d"] = p2.v_d;
  b["u_star_L"] = p2.u_star_L;
  b["u_star_R"] = p2.u_star_R;
  b["x_star_L"] = vec_json(p2.state_left());
  b["x_star_R"] = vec_json(p2.state_right());
  b["sigma2"] = p2.sigma2;
  b["d2"] = p2.d2;
  j["P2"] = b;
  return j;
}

// ---------------------------------------------------------------------------
// Analysis

ForceBandReport force_band(const ForceSeries& trace, const ForceSeries& reference, double c) {
  ForceBandReport r;
  r.requested = true;
  r.c = c;
  if (trace.t.size() != reference.t.size())
    throw InvalidParameter("force band: trace has " + std::to_string(trace.t.size()) +
                           " samples, reference has " + std::to_string(reference.t.size()));
  const ForceBandResult left = force_band_check(trace.Fz_left, reference.Fz_left, c);
  const ForceBandResult right = force_band_check(trace.Fz_right, reference.Fz_right, c);
  const ForceBandResult* first = nullptr;
  if (!left.pass) first = &left;
  if (!right.pass && (!first || right.first_violation < first->first_violation)) first = &right;
  if (first) {
    r.pass = false;
    r.leg = first == &left ? "left" : "right";
    r.first_violation = first->first_violation;
    r.t = trace.t[first->first_violation];
    r.value = first->value;
    r.lower = first->lower;
    r.upper = first->upper;
  }
  return r;
}

Json analysis_json(const std::string& scenario_name, const std::string& scenario_kind,
                   const AnalysisOptions& options, const std::vector<StepRecord>& records,
                   const PlaneAnalysis planes[2], const PlaneModel models[2],
                   const ForceBandReport& force) {
  Json j = header("analysis");
  j["name"] = scenario_name;
  j["scenario"] = scenario_kind;
  j["note"] =
      "W is estimated from this scenario's steps only; E and the verdicts are relative to that W";
  Json opt;
  opt["n"] = options.n;
  opt["eps"] = options.eps;
  opt["membership_tol"] = options.membership_tol;
  opt["certificate_tol"] = options.certificate_tol;
  opt["disturbance"] = "closed-loop (e_next - A_cl e)";
  j["options"] = opt;
  bool all_in = true, cert = true;
  Json ps = Json::array();
  for (int i = 0; i < 2; ++i) {
    const PlaneAnalysis& a = planes[i];
    Json p;
    p["plane"] = kPlaneNames[i];
    p["dim"] = a.dim;
    p["gain"] = models[i].gain_kind;
    p["A_cl"] = mat_json(models[i].A_cl());
    p["spectral_radius"] = spectral_radius(models[i].A_cl());
    p["exact"] = a.exact;
    p["set_terms"] = a.set_terms;
    p["w"] = vectors_json(a.w);
    p["w_cl"] = vectors_json(a.w_cl);
    p["e"] = vectors_json(a.e);
    p["W"] = polytope_json(a.W);
    p["E"] = polytope_json(a.E);
    Json mem = Json::array();
    for (std::size_t k = 0; k < a.e_in_E.size(); ++k) {
      Json m;
      m["k"] = records[k].k;
      m["in_E"] = static_cast<bool>(a.e_in_E[k]);
      mem.push_back(m);
    }
    p["membership"] = mem;
    p["all_in_E"] = a.all_in_E;
    Json c;
    c["holds"] = a.certificate.holds;
    c["checked"] = a.certificate.checked;
    c["failures"] = a.certificate.failures;
    c["meaningful"] = a.exact;
    p["certificate"] = c;
    ps.push_back(p);
    all_in = all_in && a.all_in_E;
    cert = cert && a.certificate.holds;
  }
  j["planes"] = ps;
  Json f;
  f["requested"] = force.requested;
  if (force.requested) {
    f["c"] = force.c;
    f["pass"] = force.pass;
    if (!force.pass) {
      Json v;
      v["leg"] = force.leg;
      v["sample"] = force.first_violation;
      v["t"] = force.t;
      v["value"] = force.value;
      v["lower"] = force.lower;
      v["upper"] = force.upper;
      f["first_violation"] = v;
    }
  }
  j["force_band"] = f;
  Json verdict;
  verdict["all_in_E"] = all_in;
  verdict["certificate"] = cert;
  if (force.requested)
    verdict["force_band"] = force.pass;
  else
    verdict["force_band"] = nullptr;
  j["verdict"] = verdict;
  return j;
}

}  // namespace slipwalk::io
