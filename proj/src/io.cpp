// Copyright 2026 The cmlearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmlearn/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "cmlearn/error.hpp"
#include "cmlearn/rng.hpp"

namespace cmlearn {

namespace fs = std::filesystem;

fs::path ResolveOutputDir(const fs::path& dir) {
  if (dir.is_absolute()) return dir;
  const char* root = std::getenv(kOutputRootEnv);
  if (root == nullptr || *root == '\0') return dir;
  return fs::path(root) / dir;
}

void WriteFileAtomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move output into place: " + path.string());
  }
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> lines = Split(text, '\n');
  if (!lines.empty() && Trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

[[noreturn]] void ParseFail(const std::string& where, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse, where + ":" + std::to_string(line) + ": " + what);
}

bool ParseDouble(std::string_view s, double& out) {
  s = Trim(s);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

template <typename Int>
bool ParseInt(std::string_view s, Int& out) {
  s = Trim(s);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::vector<double> ParseDoubles(std::string_view s) {
  std::vector<double> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) {
    double x = 0.0;
    if (!ParseDouble(tok, x)) throw Error(ErrorCode::kParse, "not a number: " + tok);
    out.push_back(x);
  }
  return out;
}

std::string JoinDoubles(std::span<const double> xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ' ';
    s += FormatDouble(xs[i]);
  }
  return s;
}

std::string JoinIntervals(const std::vector<Interval>& r) {
  std::vector<double> flat;
  for (const auto& i : r) {
    flat.push_back(i.lo);
    flat.push_back(i.hi);
  }
  return JoinDoubles(flat);
}

std::vector<Interval> ParseIntervals(std::string_view s) {
  const std::vector<double> flat = ParseDoubles(s);
  if (flat.size() % 2 != 0) throw Error(ErrorCode::kParse, "interval list has odd length");
  std::vector<Interval> out;
  for (std::size_t i = 0; i < flat.size(); i += 2) out.push_back({flat[i], flat[i + 1]});
  return out;
}

// key = value lines; blank lines and '#' comments ignored.
std::map<std::string, std::string> ParseKeyValues(std::string_view text, const std::string& where) {
  std::map<std::string, std::string> kv;
  const auto lines = Lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = Trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) ParseFail(where, i + 1, "expected key = value");
    kv[std::string(Trim(line.substr(0, eq)))] = std::string(Trim(line.substr(eq + 1)));
  }
  return kv;
}

const std::string& Require(const std::map<std::string, std::string>& kv, const std::string& key,
                           const std::string& where) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorCode::kParse, where + ": missing field '" + key + "'");
  return it->second;
}

std::string DatasetHeader(int dof) {
  std::string h = "traj_id,step";
  for (int i = 1; i <= dof; ++i) h += ",q_" + std::to_string(i);
  for (int i = 1; i <= dof; ++i) h += ",u_" + std::to_string(i);
  h += ",dt";
  return h;
}

}  // namespace

std::string DatasetCsv(const DemonstrationSet& data) {
  if (data.trajectories.empty() || data.trajectories.front().states.empty()) {
    throw Error(ErrorCode::kDegenerateData, "cannot write an empty dataset");
  }
  const int dof = static_cast<int>(data.trajectories.front().states.front().size());
  std::string out = DatasetHeader(dof) + "\n";
  for (std::size_t t = 0; t < data.trajectories.size(); ++t) {
    const Trajectory& tr = data.trajectories[t];
    const std::size_t n = std::min(tr.states.size(), tr.actions.size());
    for (std::size_t i = 0; i < n; ++i) {
      out += std::to_string(t) + "," + std::to_string(i);
      for (int j = 0; j < dof; ++j) out += "," + FormatDouble(tr.states[i][j]);
      for (int j = 0; j < dof; ++j) out += "," + FormatDouble(tr.actions[i][j]);
      out += "," + FormatDouble(tr.dt) + "\n";
    }
  }
  return out;
}

std::string DatasetMeta(const DemonstrationSet& data) {
  const DemoConfig& c = data.config;
  std::ostringstream m;
  m << "format = cmlearn-dataset 1\n";
  m << "chain = " << c.chain << "\n";
  m << "constraint = " << c.constraint << "\n";
  m << "seed = " << c.seed << "\n";
  m << "n_trajectories = " << c.n_trajectories << "\n";
  m << "points_per_traj = " << c.points_per_traj << "\n";
  m << "sim_steps = " << c.sim_steps << "\n";
  m << "dt = " << FormatDouble(c.dt) << "\n";
  m << "alpha = " << FormatDouble(c.alpha) << "\n";
  m << "psi_star = " << JoinDoubles({c.psi_star.data(), static_cast<std::size_t>(c.psi_star.size())}) << "\n";
  m << "start_deg = " << JoinIntervals(c.start_deg) << "\n";
  m << "target = " << JoinIntervals(c.target) << "\n";
  m << "ik = " << c.ik.max_iterations << ' ' << FormatDouble(c.ik.damping) << ' '
    << FormatDouble(c.ik.tolerance) << ' ' << c.ik.max_rejections << "\n";
  return m.str();
}

DemonstrationSet ParseDataset(std::string_view csv, std::string_view meta) {
  const auto kv = ParseKeyValues(meta, "dataset meta");
  if (Require(kv, "format", "dataset meta") != "cmlearn-dataset 1") {
    throw Error(ErrorCode::kParse, "dataset meta: unsupported format '" + kv.at("format") + "'");
  }
  DemonstrationSet set;
  DemoConfig& c = set.config;
  const auto need = [&](const char* key) -> const std::string& { return Require(kv, key, "dataset meta"); };
  const auto need_int = [&](const char* key, auto& out) {
    if (!ParseInt(need(key), out)) throw Error(ErrorCode::kParse, std::string("dataset meta: bad ") + key);
  };
  const auto need_double = [&](const char* key, double& out) {
    if (!ParseDouble(need(key), out)) throw Error(ErrorCode::kParse, std::string("dataset meta: bad ") + key);
  };
  c.chain = need("chain");
  c.constraint = need("constraint");
  need_int("seed", c.seed);
  need_int("n_trajectories", c.n_trajectories);
  need_int("points_per_traj", c.points_per_traj);
  need_int("sim_steps", c.sim_steps);
  need_double("dt", c.dt);
  need_double("alpha", c.alpha);
  const std::vector<double> psi = ParseDoubles(need("psi_star"));
  c.psi_star = Eigen::Map<const Eigen::VectorXd>(psi.data(), static_cast<Eigen::Index>(psi.size()));
  c.start_deg = ParseIntervals(need("start_deg"));
  c.target = ParseIntervals(need("target"));
  {
    const std::vector<double> ik = ParseDoubles(need("ik"));
    if (ik.size() != 4) throw Error(ErrorCode::kParse, "dataset meta: ik needs 4 values");
    c.ik = {static_cast<int>(ik[0]), ik[1], ik[2], static_cast<int>(ik[3])};
  }
  const int dof = static_cast<int>(psi.size());
  if (dof < 1) throw Error(ErrorCode::kParse, "dataset meta: empty psi_star");

  const auto lines = Lines(csv);
  if (lines.empty()) throw Error(ErrorCode::kParse, "dataset: empty file");
  const std::string header = DatasetHeader(dof);
  if (Trim(lines[0]) != header) {
    throw Error(ErrorCode::kParse, "dataset:1: header mismatch, expected '" + header + "'");
  }
  if (lines.size() < 2) throw Error(ErrorCode::kParse, "dataset: no data rows");
  const std::size_t cols = 2 + 2 * static_cast<std::size_t>(dof) + 1;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = Split(Trim(lines[li]), ',');
    if (f.size() != cols) {
      ParseFail("dataset", li + 1, "expected " + std::to_string(cols) + " fields, got " + std::to_string(f.size()));
    }
    std::size_t id = 0, step = 0;
    if (!ParseInt(f[0], id) || !ParseInt(f[1], step)) ParseFail("dataset", li + 1, "bad traj_id or step");
    Eigen::VectorXd q(dof), u(dof);
    double dt = 0.0;
    for (int j = 0; j < dof; ++j) {
      if (!ParseDouble(f[2 + j], q[j]) || !ParseDouble(f[2 + dof + j], u[j])) {
        ParseFail("dataset", li + 1, "bad number");
      }
    }
    if (!ParseDouble(f[cols - 1], dt)) ParseFail("dataset", li + 1, "bad dt");
    if (id == set.trajectories.size()) {
      Trajectory t;
      t.dt = dt;
      t.meta = {c.chain, c.constraint, "point_attractor", DeriveSeed(c.seed, id)};
      set.trajectories.push_back(std::move(t));
    } else if (id + 1 != set.trajectories.size()) {
      ParseFail("dataset", li + 1, "trajectory ids must be consecutive from 0");
    }
    Trajectory& t = set.trajectories.back();
    if (step != t.states.size()) ParseFail("dataset", li + 1, "steps must be consecutive from 0");
    if (dt != t.dt) ParseFail("dataset", li + 1, "dt changes within a trajectory");
    t.states.push_back(std::move(q));
    t.actions.push_back(std::move(u));
  }
  return set;
}

void WriteDataset(const fs::path& path, const DemonstrationSet& data) {
  WriteFileAtomic(path, DatasetCsv(data));
  fs::path meta = path;
  meta += ".meta";
  WriteFileAtomic(meta, DatasetMeta(data));
}

DemonstrationSet ReadDataset(const fs::path& path) {
  fs::path meta = path;
  meta += ".meta";
  return ParseDataset(ReadFile(path), ReadFile(meta));
}

std::uint64_t LearnerConfigHash(const SeparationOptions& s, const LearnOptions& l) {
  std::ostringstream text;
  text << s.max_centers << ' ' << s.kmeans_iterations << ' ' << FormatDouble(s.width_scale) << ' '
       << FormatDouble(s.ridge) << ' ' << s.refine_iterations << ' '
       << FormatDouble(s.refine_tolerance) << ' ' << s.lm_iterations << ' '
       << FormatDouble(s.lm_tolerance) << ' ' << FormatDouble(s.restart_threshold) << ' '
       << FormatDouble(s.restart_ridge) << ' ' << l.grid_points << ' ' << l.refine_starts << ' '
       << FormatDouble(l.refine_tolerance) << ' ' << l.refine_iterations << ' '
       << FormatDouble(l.rank_epsilon);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ModelText(const ModelFile& model) {
  const LambdaEstimate& e = model.estimate;
  if (e.rows.rows() != e.k) throw Error(ErrorCode::kInvalidArgument, "estimate rows do not match k");
  std::ostringstream out;
  out << "version = " << kModelFormatVersion << "\n";
  out << "chain = " << model.chain << "\n";
  out << "k = " << e.k << "\n";
  out << "feature_dim = " << e.rows.cols() << "\n";
  for (int j = 0; j < e.k; ++j) {
    std::vector<double> r(static_cast<std::size_t>(e.rows.cols()));
    for (Eigen::Index c = 0; c < e.rows.cols(); ++c) r[static_cast<std::size_t>(c)] = e.rows(j, c);
    out << "row_" << j << " = " << JoinDoubles(r) << "\n";
  }
  for (std::size_t j = 0; j < e.angles.size(); ++j) {
    out << "angles_" << j << " = "
        << JoinDoubles({e.angles[j].data(), static_cast<std::size_t>(e.angles[j].size())}) << "\n";
  }
  out << "objective_value = " << FormatDouble(e.objective_value) << "\n";
  out << "reference = " << FormatDouble(e.reference) << "\n";
  out << "objective_trace = " << JoinDoubles(e.objective_trace) << "\n";
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(model.config_hash));
  out << "config_hash = " << hash << "\n";
  out << "end = model\n";
  return out.str();
}

ModelFile ParseModel(std::string_view text) {
  const auto kv = ParseKeyValues(text, "model");
  const auto need = [&](const std::string& key) -> const std::string& { return Require(kv, key, "model"); };
  int version = 0;
  if (!ParseInt(need("version"), version) || version != kModelFormatVersion) {
    throw Error(ErrorCode::kParse, "model: version mismatch (expected " +
                                       std::to_string(kModelFormatVersion) + ", got '" + kv.at("version") + "')");
  }
  if (kv.find("end") == kv.end()) throw Error(ErrorCode::kParse, "model: truncated file (no end marker)");
  ModelFile m;
  m.chain = need("chain");
  LambdaEstimate& e = m.estimate;
  int dim = 0;
  if (!ParseInt(need("k"), e.k) || e.k < 1) throw Error(ErrorCode::kParse, "model: bad field 'k'");
  if (!ParseInt(need("feature_dim"), dim) || dim < e.k) throw Error(ErrorCode::kParse, "model: bad field 'feature_dim'");
  e.rows.resize(e.k, dim);
  for (int j = 0; j < e.k; ++j) {
    const std::vector<double> r = ParseDoubles(need("row_" + std::to_string(j)));
    if (static_cast<int>(r.size()) != dim) throw Error(ErrorCode::kParse, "model: row_" + std::to_string(j) + " has wrong length");
    for (int c = 0; c < dim; ++c) e.rows(j, c) = r[static_cast<std::size_t>(c)];
  }
  for (int j = 0;; ++j) {
    const auto it = kv.find("angles_" + std::to_string(j));
    if (it == kv.end()) break;
    const std::vector<double> a = ParseDoubles(it->second);
    e.angles.push_back(Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())));
  }
  if (!ParseDouble(need("objective_value"), e.objective_value)) throw Error(ErrorCode::kParse, "model: bad field 'objective_value'");
  if (!ParseDouble(need("reference"), e.reference)) throw Error(ErrorCode::kParse, "model: bad field 'reference'");
  e.objective_trace = ParseDoubles(need("objective_trace"));
  const std::string& h = need("config_hash");
  const auto res = std::from_chars(h.data(), h.data() + h.size(), m.config_hash, 16);
  if (res.ec != std::errc() || res.ptr != h.data() + h.size()) throw Error(ErrorCode::kParse, "model: bad field 'config_hash'");
  return m;
}

void WriteModel(const fs::path& path, const ModelFile& model) { WriteFileAtomic(path, ModelText(model)); }

ModelFile ReadModel(const fs::path& path) { return ParseModel(ReadFile(path)); }

namespace {

struct Range {
  double lo = 0.0, hi = 0.0;
  void Pad() {
    double span = hi - lo;
    if (span <= 0.0) span = std::max(1.0, std::abs(lo));
    lo -= 0.05 * span;
    hi += 0.05 * span;
  }
};

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string Polyline(const std::vector<Eigen::Vector2d>& pts, Range xr, Range yr, double x0, double y0,
                     double w, double h, const char* color) {
  std::string s = "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"";
  s += color;
  s += "\" points=\"";
  char buf[64];
  for (const auto& p : pts) {
    if (!p.allFinite()) continue;
    const double px = x0 + (p.x() - xr.lo) / (xr.hi - xr.lo) * w;
    const double py = y0 + h - (p.y() - yr.lo) / (yr.hi - yr.lo) * h;
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
    s += buf;
  }
  s += "\"/>\n";
  return s;
}

std::string Escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string RenderSvg(std::span<const PlotTrace> traces, std::string_view title) {
  if (traces.empty()) throw Error(ErrorCode::kInvalidArgument, "plot needs at least one trace");
  Range px{1e300, -1e300}, py{1e300, -1e300}, vx{0.0, 0.0}, vy{1e300, -1e300};
  for (const auto& t : traces) {
    if (t.path.size() < 2 || t.manip.size() < 2) {
      throw Error(ErrorCode::kInvalidArgument, "trace '" + t.label + "' has fewer than two points");
    }
    for (const auto& p : t.path) {
      if (!p.allFinite()) continue;
      px.lo = std::min(px.lo, p.x()); px.hi = std::max(px.hi, p.x());
      py.lo = std::min(py.lo, p.y()); py.hi = std::max(py.hi, p.y());
    }
    for (double v : t.manip) {
      if (!std::isfinite(v)) continue;
      vy.lo = std::min(vy.lo, v); vy.hi = std::max(vy.hi, v);
    }
    vx.hi = std::max(vx.hi, static_cast<double>(t.manip.size() - 1));
  }
  if (px.lo > px.hi) px = {0.0, 1.0};
  if (py.lo > py.hi) py = {0.0, 1.0};
  if (vy.lo > vy.hi) vy = {0.0, 1.0};
  px.Pad(); py.Pad(); vx.Pad(); vy.Pad();

  const double w = 360, h = 300, top = 50, left1 = 60, left2 = 500;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"900\" height=\"420\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"900\" height=\"420\" fill=\"white\"/>\n";
  s << "<text x=\"450\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << Escape(title) << "</text>\n";
  char buf[200];
  const auto frame = [&](double x0, const char* name, Range xr, Range yr, const char* xl, const char* yl) {
    std::snprintf(buf, sizeof buf, "<g class=\"panel\" id=\"%s\">\n<rect x=\"%.0f\" y=\"%.0f\" width=\"%.0f\" height=\"%.0f\" fill=\"none\" stroke=\"black\"/>\n",
                  name, x0, top, w, h);
    s << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"%.0f\" text-anchor=\"middle\">%s</text>\n", x0 + w / 2, top + h + 32, xl);
    s << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"%.0f\" text-anchor=\"middle\" transform=\"rotate(-90 %.0f %.0f)\">%s</text>\n",
                  x0 - 42, top + h / 2, x0 - 42, top + h / 2, yl);
    s << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"%.0f\">%.3g</text><text x=\"%.0f\" y=\"%.0f\" text-anchor=\"end\">%.3g</text>\n",
                  x0, top + h + 15, xr.lo, x0 + w, top + h + 15, xr.hi);
    s << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"%.0f\" text-anchor=\"end\">%.3g</text><text x=\"%.0f\" y=\"%.0f\" text-anchor=\"end\">%.3g</text>\n",
                  x0 - 4, top + h, yr.lo, x0 - 4, top + 10, yr.hi);
    s << buf;
  };
  frame(left1, "path", px, py, "x (m)", "y (m)");
  for (std::size_t i = 0; i < traces.size(); ++i) {
    s << Polyline(traces[i].path, px, py, left1, top, w, h, kColors[i % 6]);
  }
  s << "</g>\n";
  frame(left2, "manipulability", vx, vy, "step", "v");
  for (std::size_t i = 0; i < traces.size(); ++i) {
    std::vector<Eigen::Vector2d> pts;
    for (std::size_t k = 0; k < traces[i].manip.size(); ++k) {
      pts.emplace_back(static_cast<double>(k), traces[i].manip[k]);
    }
    s << Polyline(pts, vx, vy, left2, top, w, h, kColors[i % 6]);
  }
  s << "</g>\n";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    std::snprintf(buf, sizeof buf, "<text class=\"legend\" x=\"%.0f\" y=\"%.0f\" fill=\"%s\">", left1 + 10 + 180.0 * i, top + h + 60, kColors[i % 6]);
    s << buf << Escape(traces[i].label) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace cmlearn
