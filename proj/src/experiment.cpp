#include "zygmund/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "zygmund/sampling.hpp"
#include "zygmund/slow_points.hpp"
#include "zygmund/stopping_time.hpp"

namespace zyg {

using nlohmann::json;
namespace fs = std::filesystem;

std::string artifact_version() { return "0.3.0"; }

namespace {

// ---------------------------------------------------------------- parsing --

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  require(j.is_object(), where + " must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (!allowed.count(k)) fail_argument("unknown key '" + k + "' in " + where);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail_argument("bad type for '" + std::string(key) + "' in " + where);
  }
}

double get_number(const json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_number(), "'" + std::string(key) + "' in " + where + " must be a number");
  return j.at(key).get<double>();
}

int get_int(const json& j, const char* key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_number_integer(),
          "'" + std::string(key) + "' in " + where + " must be an integer");
  return j.at(key).get<int>();
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback,
                      const std::string& where) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_number_integer() && j.at(key).get<long long>() >= 0,
          "'" + std::string(key) + "' in " + where + " must be a nonnegative integer");
  return j.at(key).get<std::size_t>();
}

Vec get_vec(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return {};
  const json& a = j.at(key);
  require(a.is_array(), "'" + std::string(key) + "' in " + where + " must be an array");
  Vec out;
  for (const auto& v : a) {
    require(v.is_number(), "'" + std::string(key) + "' in " + where + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::optional<double> get_auto(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return std::nullopt;
  const json& v = j.at(key);
  if (v.is_string()) {
    require(v.get<std::string>() == "auto",
            "'" + std::string(key) + "' in " + where + " must be a number or \"auto\"");
    return std::nullopt;
  }
  require(v.is_number(), "'" + std::string(key) + "' in " + where + " must be a number or \"auto\"");
  return v.get<double>();
}

// -------------------------------------------------------------- formatting --

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class CsvWriter {
 public:
  CsvWriter(const std::string& hash, const std::vector<std::string>& header) {
    out_ << "# config_hash=" << hash << '\n';
    row_strings(header);
  }
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      const auto& c = cells[i];
      if (c.find_first_of(",\"\n") != std::string::npos) {
        out_ << '"';
        for (char ch : c) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
        out_ << '"';
      } else {
        out_ << c;
      }
    }
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

class OutputSet {
 public:
  OutputSet(fs::path dir, std::string hash) : dir_(std::move(dir)), hash_(std::move(hash)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create output directory " + dir_.string());
  }
  void write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorKind::io, "cannot write " + p.string());
    f << content;
    if (!f) throw Error(ErrorKind::io, "write failed for " + p.string());
    files_.push_back(name);
  }
  void write_json(const std::string& name, json j) {
    j["config_hash"] = hash_;
    write(name, j.dump(2) + "\n");
  }
  const std::vector<std::string>& files() const { return files_; }
  const std::string& hash() const { return hash_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::string hash_;
  std::vector<std::string> files_;
};

// ------------------------------------------------------------------ context --

struct Context {
  ExperimentConfig cfg;
  FieldBundle fb;
  NadicCube root;
  std::uint64_t seed;
  int threads;
  std::vector<std::string> warnings;
};

std::size_t dim_of(const Context& c) { return c.fb.field->dimension(); }

SampleRegion root_region(const Context& c, double lo, double hi) {
  return SampleRegion{c.root.corner(), c.root.side(), lo, hi};
}

double bloch_estimate(const Context& c) {
  const double hi = std::min(1.0, c.root.side());
  const double lo = std::max(kMinHeight, c.cfg.sampling.bloch_y_min * hi);
  return bloch_seminorm(*c.fb.field, root_region(c, lo, hi), c.cfg.sampling.bloch_samples,
                        mix_seed(c.seed, 11), c.threads)
      .value;
}

const WeierstrassField& need_weierstrass(const Context& c, const std::string& what) {
  if (!c.fb.weierstrass) fail_argument(what + " needs a field of kind \"weierstrass\"");
  return *c.fb.weierstrass;
}

// ---------------------------------------------------------------- commands --

void append_jet(const HarmonicJet& j, std::vector<std::string>& cells) {
  cells.push_back(fmt(j.value));
  for (double g : j.gradient) cells.push_back(fmt(g));
  const std::size_t n = j.hessian.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) cells.push_back(fmt(j.hessian(a, b)));
  cells.push_back(fmt(j.hessian.trace()));
}

json cmd_eval(Context& c, OutputSet& out, const RunOptions& opts) {
  require(!opts.points_path.empty(), "eval needs a points file (--points)");
  std::ifstream in(opts.points_path);
  if (!in) throw Error(ErrorKind::io, "cannot open points file " + opts.points_path);
  const std::size_t d = dim_of(c);
  std::vector<std::pair<Vec, std::size_t>> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& ch : line)
      if (ch == ',' || ch == '\t' || ch == '\r') ch = ' ';
    std::istringstream ls(line);
    std::string tok;
    Vec row;
    bool comment = false;
    while (ls >> tok) {
      if (row.empty() && tok[0] == '#') {
        comment = true;
        break;
      }
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::logic_error&) {
        used = 0;
      }
      if (used != tok.size())
        throw Error(ErrorKind::io, "points file line " + std::to_string(lineno) +
                                       ": not a number: '" + tok + "'");
      row.push_back(v);
    }
    if (comment || row.empty()) continue;
    if (row.size() != d + 1)
      throw Error(ErrorKind::io, "points file line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(d + 1) + " values, got " +
                                     std::to_string(row.size()));
    if (!(row[d] >= kMinHeight) || !std::isfinite(row[d]))
      throw Error(ErrorKind::io, "points file line " + std::to_string(lineno) +
                                     ": height must be >= 1e-12");
    pts.emplace_back(std::move(row), lineno);
  }

  std::vector<std::string> header;
  for (std::size_t i = 1; i <= d; ++i) header.push_back("x" + std::to_string(i));
  header.push_back("y");
  header.push_back("value");
  for (std::size_t i = 1; i <= d + 1; ++i) header.push_back("g" + std::to_string(i));
  for (std::size_t a = 1; a <= d + 1; ++a)
    for (std::size_t b = a; b <= d + 1; ++b)
      header.push_back("h" + std::to_string(a) + "_" + std::to_string(b));
  header.push_back("trace");

  std::vector<std::vector<std::string>> rows(pts.size());
  parallel_for(pts.size(), c.threads, [&](std::size_t i) {
    const Vec& p = pts[i].first;
    const HarmonicJet j = c.fb.field->jet(std::span<const double>(p.data(), d), p[d]);
    auto& cells = rows[i];
    for (double v : p) cells.push_back(fmt(v));
    append_jet(j, cells);
  });
  CsvWriter csv(out.hash(), header);
  for (const auto& r : rows) csv.row_strings(r);
  out.write("jets.csv", csv.str());
  return {{"points", pts.size()}};
}

json cantor_tree_json(const CantorTree& tree) {
  json gens = json::array();
  for (std::size_t g = 0; g < tree.generations.size(); ++g) {
    json nodes = json::array();
    for (const auto& n : tree.generations[g]) {
      nodes.push_back({{"address", n.node.cube.address()},
                       {"avg_grad", n.node.avg_grad},
                       {"status", to_string(n.node.status)},
                       {"deviation", n.node.deviation},
                       {"parent", n.parent},
                       {"alive", n.alive},
                       {"selected", n.selected}});
    }
    json entry = {{"generation", g}, {"nodes", nodes}};
    if (g > 0) {
      const auto& s = tree.summaries[g - 1];
      entry["summary"] = {{"count", s.count},
                          {"alive", s.alive},
                          {"measured_alpha", s.measured_alpha},
                          {"measured_beta", s.measured_beta},
                          {"pruned_beta", s.pruned_beta},
                          {"unresolved_fraction", s.unresolved_fraction},
                          {"filtered_out", s.filtered_out}};
    }
    gens.push_back(entry);
  }
  return {{"root", tree.root.address()},
          {"params",
           {{"M", tree.params.M},
            {"theta", tree.params.theta},
            {"K", tree.params.K},
            {"J_max", tree.params.j_max},
            {"m", tree.params.m},
            {"N", tree.root.N()}}},
          {"generations", gens},
          {"terminated_early", tree.terminated_early},
          {"empty_generation", tree.empty_generation},
          {"selected", {{"alpha", tree.selected_alpha},
                        {"beta", tree.selected_beta},
                        {"nodes", tree.selected_nodes}}},
          {"warnings", tree.warnings}};
}

json cmd_cantor(Context& c, OutputSet& out) {
  const auto& sc = c.cfg.stopping;
  const auto& lc = c.cfg.lattice;
  const int d = static_cast<int>(dim_of(c));
  const double cos_t = std::cos(sc.theta);

  const double bloch = bloch_estimate(c);
  ConstantCalibration cal;
  if (sc.c_const) {
    cal.c_const = *sc.c_const;
  } else if (bloch > 0.0) {
    cal = calibrate_c_const(*c.fb.field, c.root, sc.calibration_depth, lc.m, bloch, c.threads);
  }
  const double root_norm = norm(face_average_gradient(*c.fb.field, c.root, lc.m));
  const double r_auto = std::max(cal.c_const * bloch / cos_t, root_norm);
  double R = r_auto;
  if (sc.R) R = *sc.R;
  if (sc.M) R = *sc.M / cos_t;
  if (!(R > 0.0)) {
    c.warnings.push_back("R resolved to 0 (constant gradient, zero average); using R = 1");
    R = 1.0;
  }

  CantorParams p;
  p.M = R * cos_t;
  p.theta = sc.theta;
  p.K = sc.K;
  p.j_max = lc.j_max;
  p.m = lc.m;
  p.threads = c.threads;
  const CantorTree tree = cantor_build(*c.fb.field, c.root, p);
  for (const auto& w : tree.warnings) c.warnings.push_back(w);

  json tj = cantor_tree_json(tree);
  out.write_json("tree.json", tj);

  json bound;
  bound["constants"] = {{"bloch", bloch},
                        {"c_const", cal.c_const},
                        {"c_parent_child", cal.parent_child},
                        {"c_pointwise", cal.pointwise},
                        {"root_avg_norm", root_norm},
                        {"R_auto", r_auto},
                        {"R", R},
                        {"M", p.M},
                        {"theta", p.theta}};
  const bool no_escape = tree.generations.size() > 1 && tree.generations[1].empty();
  bound["no_escape"] = no_escape;
  if (no_escape) {
    c.warnings.push_back("S_M(Q0) is empty: no cube escapes M; no bound emitted");
    bound["hungerford"] = nullptr;
  } else {
    const DimBound hb = hungerford_bound(tree.measured_alpha(), tree.measured_beta(), d);
    if (!hb.valid) c.warnings.push_back("measured (alpha, beta) violate 0 < alpha < beta^(1/d) <= 1; bound invalid");
    bound["hungerford"] = {{"alpha", hb.alpha},
                           {"beta", hb.beta},
                           {"d", hb.d},
                           {"bound", finite_or_null(hb.bound)},
                           {"valid", hb.valid},
                           {"raw_alpha", tree.raw_alpha()},
                           {"raw_beta", tree.raw_beta()},
                           {"selected_nodes", tree.selected_nodes}};
    if (cal.c_const > 0.0 && bloch > 0.0 && hb.beta > 0.0 && hb.beta <= 1.0) {
      const MakarovBound mb = makarov_bound(d, cal.c_const, bloch, hb.beta, R, p.theta, lc.N);
      bound["makarov"] = {{"raw", mb.raw}, {"bound", mb.bound}, {"clamped", mb.clamped}};
    } else {
      bound["makarov"] = nullptr;
    }
  }
  BoundedRayOptions bo;
  bo.y_floor = c.cfg.sampling.y_floor;
  bo.points_per_decade = c.cfg.sampling.points_per_decade;
  bo.samples_per_cube = c.cfg.sampling.samples_per_cube;
  if (cal.c_const > 0.0 && !sc.R && !sc.M) bo.c_times_bloch = cal.c_const * bloch;
  const BoundedRayReport br = verify_bounded_ray(*c.fb.field, tree, R, bo);
  if (!br.precondition_ok) c.warnings.push_back("bounded ray not certified: " + br.precondition_message);
  bound["bounded_ray"] = {{"precondition_ok", br.precondition_ok},
                          {"message", br.precondition_message},
                          {"R", br.R},
                          {"checks", br.checks},
                          {"violations", br.violations},
                          {"max_ratio", br.max_ratio},
                          {"resolved_floor", br.resolved_floor},
                          {"node_bound_violations", br.node_bound_violations}};
  out.write_json("bound.json", bound);
  return {{"hungerford", bound["hungerford"]}, {"bounded_ray_violations", br.violations}};
}

json cmd_qr(Context& c, OutputSet& out) {
  const auto& q = c.cfg.qr;
  const auto reports = weak_qr_sweep(*c.fb.field, c.root, q.depth, q.N, q.m, c.threads);
  CsvWriter csv(out.hash(), {"cube_address", "N", "numerator", "denominator", "gamma_sq", "flagged"});
  double gmax = 0.0, gmin = std::numeric_limits<double>::infinity();
  std::size_t flagged = 0;
  std::map<int, double> per_gen;
  for (const auto& r : reports) {
    csv.row_strings({r.address, std::to_string(r.N), fmt(r.numerator), fmt(r.denominator),
                     r.flagged ? "inf" : fmt(r.gamma_sq), r.flagged ? "1" : "0"});
    if (r.flagged) {
      ++flagged;
      continue;
    }
    gmax = std::max(gmax, r.gamma_sq);
    gmin = std::min(gmin, r.gamma_sq);
    const int g = std::stoi(r.address.substr(0, r.address.find(':')));
    per_gen[g] = std::max(per_gen[g], r.gamma_sq);
  }
  out.write("qr_sweep.csv", csv.str());
  json pg = json::array();
  for (const auto& [g, v] : per_gen) pg.push_back({{"generation", g}, {"max_gamma_sq", v}});
  json s = {{"cubes", reports.size()},
            {"flagged", flagged},
            {"max_gamma_sq", finite_or_null(reports.size() > flagged ? gmax : NAN)},
            {"min_gamma_sq", finite_or_null(gmin)},
            {"per_generation", pg},
            {"N", q.N},
            {"m", q.m}};
  out.write_json("qr_summary.json", s);
  return s;
}

json cmd_ray(Context& c, OutputSet& out) {
  const std::size_t d = dim_of(c);
  const auto& sm = c.cfg.sampling;
  std::vector<Vec> xs = sm.ray_points;
  if (xs.empty()) xs.push_back(c.root.center());
  for (const auto& x : xs) require(x.size() == d, "ray point has wrong dimension");
  const double y_max = std::min(1.0, c.root.side());
  std::vector<RayProfile> profiles(xs.size());
  std::vector<std::optional<SlowScore>> slows(xs.size());
  parallel_for(xs.size(), c.threads, [&](std::size_t i) {
    profiles[i] = ray_profile(*c.fb.field, xs[i], sm.y_floor, y_max, sm.points_per_decade);
    if (c.fb.boundary)
      slows[i] = slow_score(c.fb.boundary, xs[i], sm.h_min, y_max, sm.slow_directions,
                            mix_seed(c.seed, 21));
  });
  std::vector<std::string> header{"point"};
  for (std::size_t k = 1; k <= d; ++k) header.push_back("x" + std::to_string(k));
  header.insert(header.end(), {"y", "grad_norm", "tangential_norm"});
  CsvWriter csv(out.hash(), header);
  CsvWriter scsv(out.hash(), {"point", "h", "quotient"});
  json per = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto& p = profiles[i];
    for (std::size_t k = 0; k < p.y_grid.size(); ++k) {
      std::vector<std::string> cells{std::to_string(i)};
      for (double v : xs[i]) cells.push_back(fmt(v));
      cells.insert(cells.end(), {fmt(p.y_grid[k]), fmt(p.grad_norms[k]), fmt(p.tangential_norms[k])});
      csv.row_strings(cells);
    }
    json e = {{"point", i},
              {"x", xs[i]},
              {"max_grad_norm", *std::max_element(p.grad_norms.begin(), p.grad_norms.end())},
              {"reached_floor", p.y_grid.back()}};
    if (slows[i]) {
      for (std::size_t k = 0; k < slows[i]->h_grid.size(); ++k)
        scsv.row_strings({std::to_string(i), fmt(slows[i]->h_grid[k]), fmt(slows[i]->quotients[k])});
      e["slow_trend"] = slows[i]->trend;
    } else {
      e["slow_trend"] = nullptr;
    }
    per.push_back(e);
  }
  out.write("ray.csv", csv.str());
  if (c.fb.boundary) out.write("slow.csv", scsv.str());
  json s = {{"points", per}};
  out.write_json("ray_summary.json", s);
  return {{"points", xs.size()}};
}

json cmd_survey(Context& c, OutputSet& out) {
  const std::size_t d = dim_of(c);
  const auto& sm = c.cfg.sampling;
  Vec e = sm.direction;
  if (e.empty()) {
    e.assign(d, 0.0);
    e[0] = 1.0;
  }
  require(e.size() == d, "survey direction has wrong dimension");
  Vec floors = sm.floors;
  if (floors.empty())
    for (int k = 5; k <= 20; ++k) floors.push_back(std::ldexp(1.0, -k));
  Vec thresholds = sm.thresholds;
  if (thresholds.empty()) thresholds = {5.0, 10.0, 20.0};

  const HaltonSequence seq(d, mix_seed(c.seed, 31));
  const Vec corner = c.root.corner();
  std::vector<Vec> xs(sm.x_samples);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = seq.point(i);
    for (std::size_t k = 0; k < d; ++k) xs[i][k] = corner[k] + c.root.side() * xs[i][k];
  }
  const double y_top = std::min(1.0, c.root.side());
  const SurveyTable t = directional_divergence_survey(*c.fb.field, e, xs, floors, thresholds,
                                                      y_top, 16, c.threads);
  std::vector<std::string> header{"point"};
  for (std::size_t k = 1; k <= d; ++k) header.push_back("x" + std::to_string(k));
  header.insert(header.end(), {"floor", "sup_directional"});
  CsvWriter csv(out.hash(), header);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < floors.size(); ++j) {
      std::vector<std::string> cells{std::to_string(i)};
      for (double v : xs[i]) cells.push_back(fmt(v));
      cells.insert(cells.end(), {fmt(floors[j]), fmt(t.sups[i][j])});
      csv.row_strings(cells);
    }
  out.write("survey.csv", csv.str());
  json rows = json::array();
  bool monotone = true;
  for (std::size_t k = 0; k < thresholds.size(); ++k)
    for (std::size_t j = 0; j < floors.size(); ++j) {
      rows.push_back({{"threshold", thresholds[k]},
                      {"floor", floors[j]},
                      {"exceedance_fraction", t.exceedance[k][j]}});
      if (j && t.exceedance[k][j] < t.exceedance[k][j - 1]) monotone = false;
    }
  json s = {{"direction", e}, {"x_samples", xs.size()}, {"rows", rows}, {"monotone", monotone}};
  out.write_json("survey_summary.json", s);
  return {{"monotone", monotone}, {"x_samples", xs.size()}};
}

json cmd_condh(Context& c, OutputSet& out) {
  const auto& w = need_weierstrass(c, "condh");
  const int d = w.base().dimension();
  const auto dirs = condition_h_directions(d, c.cfg.condh.extra_directions, mix_seed(c.seed, 41));
  const auto reps = check_condition_h(w.base(), dirs, c.cfg.condh.window, c.cfg.condh.step);
  std::vector<std::string> header;
  for (int k = 1; k <= d; ++k) header.push_back("e" + std::to_string(k));
  header.insert(header.end(), {"verdict", "directional_derivative", "max_above", "max_below", "margin"});
  CsvWriter csv(out.hash(), header);
  std::size_t holds = 0;
  std::map<std::string, std::size_t> counts;
  for (const auto& r : reps) {
    std::vector<std::string> cells;
    for (double v : r.direction) cells.push_back(fmt(v));
    cells.insert(cells.end(), {to_string(r.verdict), fmt(r.directional_derivative),
                               fmt(r.max_above), fmt(r.max_below), fmt(r.margin)});
    csv.row_strings(cells);
    ++counts[to_string(r.verdict)];
    if (r.verdict == ConditionHVerdict::holds_via_derivative ||
        r.verdict == ConditionHVerdict::holds_via_extremum)
      ++holds;
  }
  out.write("condh.csv", csv.str());
  json s = {{"directions", reps.size()}, {"holds", holds}, {"all_hold", holds == reps.size()},
            {"verdicts", counts}};
  out.write_json("condh_summary.json", s);
  return s;
}

json cmd_seminorms(Context& c, OutputSet& out) {
  const std::size_t d = dim_of(c);
  const auto& sm = c.cfg.sampling;
  const double hi = std::min(1.0, c.root.side());
  const double lo = std::max(kMinHeight, sm.bloch_y_min * hi);
  const SeminormEstimate b = bloch_seminorm(*c.fb.field, root_region(c, lo, hi), sm.bloch_samples,
                                            mix_seed(c.seed, 11), c.threads);
  json s;
  s["bloch"] = {{"value", b.value}, {"samples", b.samples}, {"y_range", {b.range_lo, b.range_hi}},
                {"argmax", b.argmax}, {"operator_factor", bloch_operator_factor(d)}};
  if (c.fb.boundary) {
    const SeminormEstimate z = zygmund_seminorm(c.fb.boundary, d, root_region(c, sm.h_min, hi),
                                                sm.zygmund_samples, mix_seed(c.seed, 12), c.threads);
    s["zygmund"] = {{"value", z.value}, {"samples", z.samples}, {"h_range", {z.range_lo, z.range_hi}},
                    {"argmax", z.argmax}};
    // Observed constant in C^-1 ||f||_* <= ||grad F||_B <= C ||f||_*.
    if (z.value > 0.0 && b.value > 0.0)
      s["equivalence_constant"] = std::max(b.value / z.value, z.value / b.value);
    else
      s["equivalence_constant"] = nullptr;
    const auto inc = increment_samples(d, sm.increment_residual_samples, sm.h_min, hi, mix_seed(c.seed, 13));
    const IncrementResidualReport p = check_increment_residual(c.fb.boundary, *c.fb.field, inc, z.value, c.threads);
    s["increment_residual"] = {{"max_residual", p.max_residual},
                               {"normalized", finite_or_null(p.normalized)},
                               {"limit", 4.0},
                               {"max_symmetry_gap", p.max_symmetry_gap},
                               {"samples", p.samples}};
  } else {
    s["zygmund"] = nullptr;
    s["increment_residual"] = nullptr;
  }
  const OscillationReport o =
      check_oscillation_bound(*c.fb.field, b.value, sm.oscillation_pairs,
                              std::max(kMinHeight, sm.y_floor), mix_seed(c.seed, 14), c.threads);
  s["oscillation"] = {{"pairs", o.pairs}, {"violations", o.violations}, {"factor", o.factor},
                      {"max_ratio", finite_or_null(o.max_ratio)}};
  out.write_json("seminorms.json", s);
  return s;
}

json cmd_selftest(Context& c, OutputSet& out) {
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, bool ok, double value) {
    checks.push_back({{"name", name}, {"pass", ok}, {"value", finite_or_null(value)}});
    all = all && ok;
  };
  const std::size_t d = dim_of(c);
  const HaltonSequence seq(d + 1, mix_seed(c.seed, 51));
  double worst = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    const Vec u = seq.point(i);
    const double y = 0.01 + 0.99 * u[d];
    const HarmonicJet j = c.fb.field->jet(std::span<const double>(u.data(), d), y);
    worst = std::max(worst, std::abs(j.hessian.trace()) / (1.0 + j.hessian.frobenius()));
  }
  record("harmonicity", worst <= 1e-9, worst);
  if (c.fb.weierstrass) {
    std::vector<HalfSpacePoint> pts;
    for (std::size_t i = 0; i < 64; ++i) {
      const Vec u = seq.point(100 + i);
      pts.push_back({Vec(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(d)), 0.01 + 0.99 * u[d]});
    }
    const auto r = check_functional_equations(*c.fb.weierstrass, pts, c.threads);
    const double m = std::max({r.value, r.gradient, r.hessian});
    record("functional_equations", m <= 1e-9, m);
  }
  const DimBound hb = hungerford_bound(0.25, 0.5, 1);
  record("hungerford_arithmetic", hb.valid && std::abs(hb.bound - 0.5) <= 1e-15, hb.bound);
  const ConeCheckResult cone = cone_bound_check(1.0, 0.4, std::numbers::pi / 3.0, 20000, c.seed);
  record("cone_lemma", cone.violations == 0, static_cast<double>(cone.violations));
  const QRReport qr = weak_qr_ratio(*c.fb.field, c.root, c.cfg.qr.N, 8);
  record("gram_psd", qr.denominator >= -1e-12 * qr.gram.trace(), qr.denominator);
  json s = {{"checks", checks}, {"pass", all}};
  out.write_json("selftest.json", s);
  if (!all) throw Error(ErrorKind::numeric, "selftest failed; see selftest.json");
  return s;
}

void update_manifest(const OutputSet& out, const std::string& command, double seconds) {
  const fs::path p = out.dir() / "manifest.json";
  json m;
  if (fs::exists(p)) {
    std::ifstream f(p);
    try {
      m = json::parse(f);
    } catch (const json::exception&) {
      m = json::object();
    }
    if (!m.is_object() || m.value("config_hash", "") != out.hash()) m = json::object();
  }
  m["config_hash"] = out.hash();
  m["artifact_version"] = artifact_version();
  m["commands"][command] = {{"files", out.files()}, {"wall_seconds", seconds}};
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot write " + p.string());
  f << m.dump(2) << '\n';
}

}  // namespace

FieldBundle make_field(const json& block, std::vector<std::string>* warnings) {
  require(block.is_object(), "field block must be a JSON object");
  const std::string kind = get_or<std::string>(block, "kind", "weierstrass", "field");
  FieldBundle fb;
  fb.kind = kind;
  if (kind == "weierstrass") {
    check_keys(block, {"kind", "phi", "b", "tail_tol"}, "field");
    require(block.contains("phi"), "field needs 'phi'");
    auto phi = TrigPolynomial::from_json(block.at("phi"), warnings);
    const double b = get_number(block, "b", 2.0, "field");
    const double tol = get_number(block, "tail_tol", 1e-12, "field");
    auto w = std::make_shared<const WeierstrassField>(std::move(phi), b, tol);
    fb.weierstrass = w;
    fb.field = w;
    fb.boundary = [w](std::span<const double> x) { return w->eval(x); };
    return fb;
  }
  const int d = get_int(block, "d", 1, "field");
  require(d >= 1, "field dimension must be >= 1");
  const auto ud = static_cast<std::size_t>(d);
  if (kind == "linear") {
    check_keys(block, {"kind", "d", "slope", "offset"}, "field");
    const double slope = get_number(block, "slope", 1.0, "field");
    const double offset = get_number(block, "offset", 0.0, "field");
    fb.field = std::make_shared<const LinearField>(ud, slope, offset);
    fb.boundary = [slope, offset](std::span<const double> x) { return slope * x[0] + offset; };
  } else if (kind == "saddle") {
    check_keys(block, {"kind", "d"}, "field");
    fb.field = std::make_shared<const SaddleField>(ud);
    fb.boundary = [](std::span<const double> x) { return x[0] * x[0]; };
  } else if (kind == "kink") {
    check_keys(block, {"kind", "d", "center", "scale"}, "field");
    const double center = get_number(block, "center", 0.5, "field");
    const double scale = get_number(block, "scale", 1.0, "field");
    fb.field = std::make_shared<const KinkField>(ud, center, scale);
    fb.boundary = [center, scale](std::span<const double> x) {
      const double u = x[0] - center;
      return u == 0.0 ? 0.0 : scale * (u * std::log(std::abs(u)) - u);
    };
  } else {
    fail_argument("unknown field kind '" + kind + "'");
  }
  return fb;
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j, {"field", "lattice", "stopping", "qr", "sampling", "condh", "threads", "output_dir"},
             "config");
  ExperimentConfig c;
  require(j.contains("field"), "config needs a 'field' block");
  c.field = j.at("field");
  c.threads = get_int(j, "threads", 0, "config");
  c.output_dir = get_or<std::string>(j, "output_dir", "out", "config");

  if (j.contains("lattice")) {
    const json& l = j.at("lattice");
    check_keys(l, {"N", "corner", "side", "J_max", "m"}, "lattice");
    c.lattice.N = get_int(l, "N", 2, "lattice");
    c.lattice.corner = get_vec(l, "corner", "lattice");
    c.lattice.side = get_number(l, "side", 1.0, "lattice");
    c.lattice.j_max = get_int(l, "J_max", 8, "lattice");
    c.lattice.m = get_int(l, "m", 8, "lattice");
  }
  require(c.lattice.N >= 2, "lattice N must be >= 2");
  require(c.lattice.side > 0.0, "lattice side must be positive");
  require(c.lattice.j_max >= 1, "lattice J_max must be >= 1");
  require(c.lattice.m >= 2, "lattice m must be >= 2");

  if (j.contains("stopping")) {
    const json& s = j.at("stopping");
    check_keys(s, {"R", "M", "theta", "K", "C_const", "calibration_depth"}, "stopping");
    c.stopping.R = get_auto(s, "R", "stopping");
    c.stopping.M = get_auto(s, "M", "stopping");
    c.stopping.theta = get_number(s, "theta", c.stopping.theta, "stopping");
    c.stopping.K = get_int(s, "K", 3, "stopping");
    c.stopping.c_const = get_auto(s, "C_const", "stopping");
    c.stopping.calibration_depth = get_int(s, "calibration_depth", 6, "stopping");
  }
  require(!(c.stopping.R && c.stopping.M), "give either stopping.R or stopping.M, not both");
  require(!c.stopping.R || *c.stopping.R > 0.0, "stopping R must be positive");
  require(!c.stopping.M || *c.stopping.M > 0.0, "stopping M must be positive");
  require(c.stopping.theta >= std::numbers::pi / 3.0 - 1e-15 && c.stopping.theta < std::numbers::pi / 2.0,
          "stopping theta must satisfy pi/3 <= theta < pi/2");
  require(c.stopping.K >= 1, "stopping K must be >= 1");
  require(!c.stopping.c_const || *c.stopping.c_const > 0.0, "C_const must be positive");
  require(c.stopping.calibration_depth >= 1, "calibration_depth must be >= 1");

  if (j.contains("qr")) {
    const json& q = j.at("qr");
    check_keys(q, {"N", "depth", "m"}, "qr");
    c.qr.N = get_int(q, "N", 2, "qr");
    c.qr.depth = get_int(q, "depth", 4, "qr");
    c.qr.m = get_int(q, "m", 16, "qr");
  }
  require(c.qr.N >= 2 && c.qr.depth >= 0 && c.qr.m >= 2, "qr needs N >= 2, depth >= 0, m >= 2");

  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    check_keys(s, {"seed", "bloch_samples", "bloch_y_min", "zygmund_samples", "h_min", "y_floor",
                   "points_per_decade", "samples_per_cube", "x_samples", "floors", "thresholds",
                   "direction", "increment_residual_samples", "oscillation_pairs", "ray_points",
                   "slow_directions"},
               "sampling");
    auto& m = c.sampling;
    if (s.contains("seed")) {
      require(s.at("seed").is_number_integer() && s.at("seed").get<long long>() >= 0,
              "sampling seed must be a nonnegative integer");
      m.seed = s.at("seed").get<std::uint64_t>();
    }
    m.bloch_samples = get_count(s, "bloch_samples", m.bloch_samples, "sampling");
    m.bloch_y_min = get_number(s, "bloch_y_min", m.bloch_y_min, "sampling");
    m.zygmund_samples = get_count(s, "zygmund_samples", m.zygmund_samples, "sampling");
    m.h_min = get_number(s, "h_min", m.h_min, "sampling");
    m.y_floor = get_number(s, "y_floor", m.y_floor, "sampling");
    m.points_per_decade = get_int(s, "points_per_decade", m.points_per_decade, "sampling");
    m.samples_per_cube = get_int(s, "samples_per_cube", m.samples_per_cube, "sampling");
    m.x_samples = get_count(s, "x_samples", m.x_samples, "sampling");
    m.floors = get_vec(s, "floors", "sampling");
    m.thresholds = get_vec(s, "thresholds", "sampling");
    m.direction = get_vec(s, "direction", "sampling");
    m.increment_residual_samples = get_count(s, "increment_residual_samples", m.increment_residual_samples, "sampling");
    m.oscillation_pairs = get_count(s, "oscillation_pairs", m.oscillation_pairs, "sampling");
    m.slow_directions = get_count(s, "slow_directions", m.slow_directions, "sampling");
    if (s.contains("ray_points")) {
      require(s.at("ray_points").is_array(), "sampling ray_points must be an array of points");
      for (const auto& p : s.at("ray_points")) {
        require(p.is_array(), "each ray point must be an array");
        Vec x;
        for (const auto& v : p) {
          require(v.is_number(), "ray point coordinates must be numbers");
          x.push_back(v.get<double>());
        }
        m.ray_points.push_back(std::move(x));
      }
    }
  }
  const auto& m = c.sampling;
  require(m.bloch_y_min > 0.0 && m.bloch_y_min < 1.0, "bloch_y_min must lie in (0,1)");
  require(m.h_min > 0.0 && m.h_min < 1.0, "h_min must lie in (0,1)");
  require(m.y_floor >= kMinHeight && m.y_floor < 1.0, "y_floor must lie in [1e-12, 1)");
  require(m.points_per_decade >= 1 && m.samples_per_cube >= 1, "grid densities must be >= 1");
  require(m.slow_directions >= 1, "slow_directions must be >= 1");
  if (!m.direction.empty())
    require(std::abs(norm(m.direction) - 1.0) <= 1e-12, "sampling direction must be a unit vector");

  if (j.contains("condh")) {
    const json& h = j.at("condh");
    check_keys(h, {"extra_directions", "window", "step"}, "condh");
    c.condh.extra_directions = get_count(h, "extra_directions", c.condh.extra_directions, "condh");
    c.condh.window = get_number(h, "window", c.condh.window, "condh");
    c.condh.step = get_number(h, "step", c.condh.step, "condh");
  }
  require(c.condh.window > 0.0 && c.condh.step > 0.0 && c.condh.step < c.condh.window,
          "condh needs 0 < step < window");
  return c;
}

std::string config_hash(const json& config, std::uint64_t seed) {
  json canon = config;
  canon.erase("threads");
  canon.erase("output_dir");
  canon["sampling"]["seed"] = seed;
  const std::string text = canon.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunResult run_experiment(const std::string& command, const std::string& config_text,
                         const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  json j;
  try {
    j = json::parse(config_text);
  } catch (const json::exception& e) {
    fail_argument(std::string("config is not valid JSON: ") + e.what());
  }
  Context c{parse_config(j), {}, NadicCube::root_of(Vec{0.0}, 1.0, 2), 0, 0, {}};
  c.fb = make_field(c.cfg.field, &c.warnings);
  const std::size_t d = c.fb.field->dimension();
  Vec corner = c.cfg.lattice.corner;
  if (corner.empty()) corner.assign(d, 0.0);
  require(corner.size() == d, "lattice corner has wrong dimension");
  c.root = NadicCube::root_of(corner, c.cfg.lattice.side, c.cfg.lattice.N);
  c.seed = opts.seed.value_or(c.cfg.sampling.seed);
  c.threads = resolve_threads(opts.threads.value_or(c.cfg.threads));

  const std::string dir = opts.out_dir.empty() ? c.cfg.output_dir : opts.out_dir;
  OutputSet out(dir, config_hash(j, c.seed));

  json s;
  if (command == "eval") s = cmd_eval(c, out, opts);
  else if (command == "cantor") s = cmd_cantor(c, out);
  else if (command == "qr") s = cmd_qr(c, out);
  else if (command == "ray") s = cmd_ray(c, out);
  else if (command == "survey") s = cmd_survey(c, out);
  else if (command == "condh") s = cmd_condh(c, out);
  else if (command == "seminorms") s = cmd_seminorms(c, out);
  else if (command == "selftest") s = cmd_selftest(c, out);
  else fail_argument("unknown command '" + command + "'");

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  update_manifest(out, command, secs);
  RunResult r;
  r.files = out.files();
  r.warnings = c.warnings;
  r.summary = {{"command", command},
               {"config_hash", out.hash()},
               {"files", r.files},
               {"warnings", r.warnings},
               {"result", s}};
  return r;
}

}  // namespace zyg
