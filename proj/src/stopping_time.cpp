#include "zygmund/stopping_time.hpp"

#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "zygmund/sampling.hpp"

namespace zyg {

namespace {

constexpr double kPiOver3 = std::numbers::pi / 3.0;

void require_theta(double theta) {
  require(theta >= kPiOver3 - 1e-15 && theta < std::numbers::pi / 2.0,
          "theta must satisfy pi/3 <= theta < pi/2");
}

double deviation(std::span<const double> a, std::span<const double> b) { return distance(a, b); }

}  // namespace

std::string to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::stopped: return "stopped";
    case NodeStatus::interior: return "interior";
    case NodeStatus::unresolved: return "unresolved";
  }
  return "interior";
}

StoppingFamily stopping_family(const FieldHandle& field, const NadicCube& q, double M, int j_max,
                               int m) {
  require(M > 0.0, "stopping threshold M must be positive");
  require(j_max >= 1, "J_max must be >= 1");
  require(m >= 2, "quadrature nodes per axis must be >= 2");
  StoppingFamily fam{q, face_average_gradient(field, q, m), M, {}, {}, 0.0, 0.0, 1};

  const int base_gen = q.generation();
  std::vector<NadicCube> stack{q};
  while (!stack.empty()) {
    NadicCube cur = stack.back();
    stack.pop_back();
    auto kids = cur.children();
    // Reverse push keeps the visiting order lexicographic.
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      StoppingNode node{*it, face_average_gradient(field, *it, m), NodeStatus::interior, 0.0};
      ++fam.cubes_visited;
      node.deviation = deviation(node.avg_grad, fam.root_avg);
      if (node.deviation > M) {
        node.status = NodeStatus::stopped;
        fam.stopped.push_back(std::move(node));
      } else if (it->generation() - base_gen >= j_max) {
        node.status = NodeStatus::unresolved;
        fam.unresolved.push_back(std::move(node));
      } else {
        stack.push_back(*it);
      }
    }
  }
  auto by_cube = [](const StoppingNode& a, const StoppingNode& b) { return a.cube < b.cube; };
  std::sort(fam.stopped.begin(), fam.stopped.end(), by_cube);
  std::sort(fam.unresolved.begin(), fam.unresolved.end(), by_cube);
  const double vol = q.volume();
  for (const auto& n : fam.stopped) fam.stopped_fraction += n.cube.volume() / vol;
  for (const auto& n : fam.unresolved) fam.unresolved_fraction += n.cube.volume() / vol;
  return fam;
}

std::optional<Vec> angular_reference(std::span<const double> avg) {
  const double n = norm(avg);
  if (n == 0.0) return std::nullopt;
  Vec xi(avg.size());
  for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = -avg[i] / n;
  return xi;
}

std::vector<StoppingNode> angular_filter(const std::vector<StoppingNode>& family,
                                         std::span<const double> parent_avg,
                                         const std::optional<Vec>& ref, double theta) {
  if (!ref) return family;
  require(std::abs(norm(*ref) - 1.0) <= 1e-9, "angular reference must be a unit vector");
  require(ref->size() == parent_avg.size(), "angular reference has wrong dimension");
  const double c = std::cos(theta);
  std::vector<StoppingNode> out;
  Vec diff(parent_avg.size());
  for (const auto& n : family) {
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = n.avg_grad[i] - parent_avg[i];
    if (dot(diff, *ref) > c * norm(diff)) out.push_back(n);
  }
  return out;
}

double CantorTree::raw_alpha() const {
  double a = 0.0;
  for (const auto& s : summaries) a = std::max(a, s.measured_alpha);
  return a;
}

double CantorTree::raw_beta() const {
  if (summaries.empty()) return 0.0;
  double b = 1.0;
  for (const auto& s : summaries) b = std::min(b, s.pruned_beta);
  return b;
}

namespace {

// Best guaranteed mass of each node's sub-tree when children are restricted
// to ratio <= alpha. For a node with children values v_c and masses r_c^d the
// optimum is max over t of min(t, sum_{v_c >= t} r_c^d), attained at some v_c.
std::vector<Vec> subtree_values(const CantorTree& tree, double alpha, double d) {
  const std::size_t G = tree.generations.size();
  std::vector<Vec> v(G);
  v[G - 1].assign(tree.generations[G - 1].size(), std::numeric_limits<double>::infinity());
  for (std::size_t g = G - 1; g-- > 0;) {
    const auto& parents = tree.generations[g];
    std::vector<std::vector<std::pair<double, double>>> kids(parents.size());
    for (std::size_t c = 0; c < tree.generations[g + 1].size(); ++c) {
      const auto& child = tree.generations[g + 1][c];
      const auto p = static_cast<std::size_t>(child.parent);
      const double ratio = child.node.cube.side() / parents[p].node.cube.side();
      if (ratio <= alpha * (1.0 + 1e-12) && v[g + 1][c] > 0.0)
        kids[p].emplace_back(v[g + 1][c], std::pow(ratio, d));
    }
    v[g].assign(parents.size(), 0.0);
    for (std::size_t p = 0; p < parents.size(); ++p) {
      auto& k = kids[p];
      std::sort(k.begin(), k.end(), std::greater<>());
      double mass = 0.0;
      for (const auto& [val, m] : k) {
        mass += m;
        v[g][p] = std::max(v[g][p], std::min(val, mass));
      }
    }
  }
  return v;
}

void select_subtree(CantorTree& tree, int dim) {
  const double d = static_cast<double>(dim);
  for (auto& gen : tree.generations)
    for (auto& n : gen) n.selected = false;
  if (tree.terminated_early || tree.generations.size() < 2) return;

  std::set<double> ratios;
  for (std::size_t g = 1; g < tree.generations.size(); ++g)
    for (const auto& c : tree.generations[g])
      ratios.insert(c.node.cube.side() /
                    tree.generations[g - 1][static_cast<std::size_t>(c.parent)].node.cube.side());

  double best = -std::numeric_limits<double>::infinity();
  for (double alpha : ratios) {
    if (!(alpha < 1.0)) continue;
    const double beta = std::min(1.0, subtree_values(tree, alpha, d)[0][0]);
    if (!(beta > 0.0)) continue;
    const double bound = std::log(beta / std::pow(alpha, d)) / std::log(1.0 / alpha);
    if (bound > best) {
      best = bound;
      tree.selected_alpha = alpha;
      tree.selected_beta = beta;
    }
  }
  if (!(tree.selected_beta > 0.0)) return;

  const auto v = subtree_values(tree, tree.selected_alpha, d);
  tree.generations[0][0].selected = true;
  tree.selected_nodes = 1;
  for (std::size_t g = 1; g < tree.generations.size(); ++g) {
    for (std::size_t c = 0; c < tree.generations[g].size(); ++c) {
      auto& child = tree.generations[g][c];
      const auto& parent = tree.generations[g - 1][static_cast<std::size_t>(child.parent)];
      const double ratio = child.node.cube.side() / parent.node.cube.side();
      child.selected = parent.selected && ratio <= tree.selected_alpha * (1.0 + 1e-12) &&
                       v[g][c] >= tree.selected_beta;
      if (child.selected) ++tree.selected_nodes;
    }
  }
}

}  // namespace

CantorTree cantor_build(const FieldHandle& field, const NadicCube& q0, const CantorParams& params) {
  require(params.M > 0.0, "M must be positive");
  require_theta(params.theta);
  require(params.K >= 1, "K must be >= 1");
  require(params.j_max >= 1, "J_max must be >= 1");
  require(params.m >= 2, "m must be >= 2");

  CantorTree tree{q0, params, {}, {}, false, -1, {}};
  const Vec root_avg = face_average_gradient(field, q0, params.m);
  CantorNode root{{q0, root_avg, NodeStatus::interior, 0.0}, -1, angular_reference(root_avg), true};
  tree.generations.push_back({root});
  const double d = static_cast<double>(q0.dimension());

  for (int k = 1; k <= params.K; ++k) {
    auto& parents = tree.generations.back();
    struct ParentResult {
      std::vector<StoppingNode> accepted;
      double unresolved = 0.0;
      std::size_t filtered = 0;
    };
    std::vector<ParentResult> results(parents.size());
    parallel_for(parents.size(), params.threads, [&](std::size_t p) {
      const auto& parent = parents[p];
      StoppingFamily fam = stopping_family(field, parent.node.cube, params.M, params.j_max, params.m);
      results[p].unresolved = fam.unresolved_fraction;
      if (k == 1) {
        results[p].accepted = std::move(fam.stopped);
      } else {
        results[p].accepted = angular_filter(fam.stopped, parent.node.avg_grad, parent.xi, params.theta);
        results[p].filtered = fam.stopped.size() - results[p].accepted.size();
      }
    });

    std::vector<CantorNode> next;
    GenerationSummary summary;
    summary.measured_beta = 1.0;
    std::size_t unresolved_parents = 0;
    for (std::size_t p = 0; p < parents.size(); ++p) {
      double mass = 0.0;
      const double lp = parents[p].node.cube.side();
      for (auto& n : results[p].accepted) {
        const double ratio = n.cube.side() / lp;
        summary.measured_alpha = std::max(summary.measured_alpha, ratio);
        mass += std::pow(ratio, d);
        auto xi = angular_reference(n.avg_grad);
        next.push_back({std::move(n), static_cast<std::int64_t>(p), std::move(xi), true});
      }
      summary.measured_beta = std::min(summary.measured_beta, mass);
      summary.unresolved_fraction = std::max(summary.unresolved_fraction, results[p].unresolved);
      summary.filtered_out += results[p].filtered;
      if (results[p].unresolved > 0.0) ++unresolved_parents;
    }
    if (unresolved_parents > 0) {
      std::ostringstream os;
      os << "generation " << k << ": " << unresolved_parents << " of " << parents.size()
         << " parents left mass unresolved at depth J_max (max fraction "
         << summary.unresolved_fraction << ")";
      tree.warnings.push_back(os.str());
    }
    summary.count = next.size();
    tree.summaries.push_back(summary);
    tree.generations.push_back(std::move(next));
    if (tree.generations.back().empty()) {
      tree.terminated_early = true;
      tree.empty_generation = k;
      tree.warnings.push_back("generation " + std::to_string(k) + " is empty; construction halted");
      break;
    }
  }

  // Survivors: nodes with descendants in generation K.
  const bool complete = !tree.terminated_early;
  for (auto& n : tree.generations.back()) n.alive = complete;
  for (std::size_t g = tree.generations.size() - 1; g-- > 0;) {
    for (auto& n : tree.generations[g]) n.alive = false;
    for (const auto& c : tree.generations[g + 1])
      if (c.alive) tree.generations[g][static_cast<std::size_t>(c.parent)].alive = true;
  }
  for (std::size_t k = 1; k < tree.generations.size(); ++k) {
    auto& s = tree.summaries[k - 1];
    std::vector<double> mass(tree.generations[k - 1].size(), 0.0);
    for (const auto& c : tree.generations[k]) {
      if (!c.alive) continue;
      ++s.alive;
      const double lp = tree.generations[k - 1][static_cast<std::size_t>(c.parent)].node.cube.side();
      mass[static_cast<std::size_t>(c.parent)] += std::pow(c.node.cube.side() / lp, d);
    }
    s.pruned_beta = complete ? 1.0 : 0.0;
    for (std::size_t p = 0; p < mass.size(); ++p)
      if (tree.generations[k - 1][p].alive) s.pruned_beta = std::min(s.pruned_beta, mass[p]);
  }
  select_subtree(tree, static_cast<int>(q0.dimension()));
  return tree;
}

TreeInvariantReport check_tree_invariants(const FieldHandle& field, const CantorTree& tree) {
  TreeInvariantReport rep;
  const int m = tree.params.m;
  const double M = tree.params.M;
  for (std::size_t k = 1; k < tree.generations.size(); ++k) {
    const auto& gen = tree.generations[k];
    const auto& prev = tree.generations[k - 1];
    std::set<std::string> addresses;
    for (const auto& n : gen) addresses.insert(n.node.cube.address());
    if (addresses.size() != gen.size()) {
      rep.disjointness = false;
      rep.problems.push_back("duplicate cube in generation " + std::to_string(k));
    }
    for (const auto& n : gen) {
      ++rep.checked_nodes;
      const NadicCube& cube = n.node.cube;
      const auto& parent = prev[static_cast<std::size_t>(n.parent)];
      const NadicCube& pc = parent.node.cube;
      if (!(pc.contains(cube) && cube.generation() > pc.generation())) {
        rep.nesting = false;
        rep.problems.push_back(cube.address() + " is not a proper descendant of its parent");
        continue;
      }
      // Any proper ancestor of this cube in the same generation breaks
      // disjointness.
      for (int g = 0; g < cube.generation(); ++g) {
        if (addresses.count(cube.ancestor(g).address())) {
          rep.disjointness = false;
          rep.problems.push_back(cube.address() + " overlaps an ancestor in generation " +
                                 std::to_string(k));
        }
      }
      // Tower condition, recomputed from the field.
      const Vec root_avg = face_average_gradient(field, pc, m);
      for (int g = pc.generation() + 1; g < cube.generation(); ++g) {
        const Vec a = face_average_gradient(field, cube.ancestor(g), m);
        if (distance(a, root_avg) > M) {
          rep.maximality = false;
          rep.problems.push_back(cube.address() + " has an escaped ancestor at generation " +
                                 std::to_string(g));
        }
      }
      const Vec own = face_average_gradient(field, cube, m);
      if (!(distance(own, root_avg) > M)) {
        rep.maximality = false;
        rep.problems.push_back(cube.address() + " does not exceed M");
      }
    }
  }
  return rep;
}

BoundedRayReport verify_bounded_ray(const FieldHandle& field, const CantorTree& tree, double R,
                                    const BoundedRayOptions& opts) {
  BoundedRayReport rep;
  rep.R = R;
  require(opts.y_floor >= kMinHeight, "y_floor below the supported minimum height");
  const auto& root = tree.generations.front().front();
  const double root_norm = norm(root.node.avg_grad);
  const double c = std::cos(tree.params.theta);
  std::ostringstream msg;
  if (!(R > 0.0)) {
    msg << "R must be positive";
  } else if (R < root_norm) {
    msg << "R=" << R << " is below |(grad F)_Q0|=" << root_norm;
  } else if (std::abs(tree.params.M - R * c) > 1e-9 * std::max(1.0, tree.params.M)) {
    msg << "tree threshold M=" << tree.params.M << " differs from R cos(theta)=" << R * c;
  } else if (opts.c_times_bloch && R < *opts.c_times_bloch / c) {
    msg << "R=" << R << " is below C*B/cos(theta)=" << *opts.c_times_bloch / c;
  } else if (tree.terminated_early || tree.generations.back().empty()) {
    msg << "final generation is empty; nothing to certify";
  }
  rep.precondition_message = msg.str();
  rep.precondition_ok = rep.precondition_message.empty();
  if (!rep.precondition_ok) return rep;

  for (const auto& gen : tree.generations)
    for (const auto& n : gen)
      if (norm(n.node.avg_grad) > R) ++rep.node_bound_violations;

  const double top = tree.root.side();
  const auto& final_gen = tree.generations.back();
  const std::size_t d = tree.root.dimension();
  HaltonSequence seq(d, 7);
  rep.resolved_floor = top;
  std::vector<BoundedRayReport> per(final_gen.size());
  parallel_for(final_gen.size(), tree.params.threads, [&](std::size_t i) {
    const NadicCube& cube = final_gen[i].node.cube;
    const double floor = std::max(opts.y_floor, cube.side());
    Vec grid = floor < top ? log_grid_descending(top, floor, opts.points_per_decade) : Vec{top};
    const Vec corner = cube.corner();
    auto& r = per[i];
    r.resolved_floor = grid.back();
    for (int s = 0; s < opts.samples_per_cube; ++s) {
      Vec x = cube.center();
      if (s > 0) {
        const Vec u = seq.point(static_cast<std::uint64_t>(s - 1));
        for (std::size_t j = 0; j < d; ++j) x[j] = corner[j] + u[j] * cube.side();
      }
      for (double y : grid) {
        const double g = norm(field.jet(x, y).gradient);
        ++r.checks;
        r.max_ratio = std::max(r.max_ratio, g / (2.0 * R));
        if (g > 2.0 * R) ++r.violations;
      }
    }
  });
  for (const auto& r : per) {
    rep.checks += r.checks;
    rep.violations += r.violations;
    rep.max_ratio = std::max(rep.max_ratio, r.max_ratio);
    rep.resolved_floor = std::min(rep.resolved_floor, r.resolved_floor);
  }
  return rep;
}

DimBound hungerford_bound(double alpha, double beta, int d) {
  require(d >= 1, "dimension must be >= 1");
  DimBound b{alpha, beta, d, std::numeric_limits<double>::quiet_NaN(), false};
  if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0)) return b;
  b.bound = std::log(beta / std::pow(alpha, d)) / std::log(1.0 / alpha);
  b.valid = beta <= 1.0 && alpha < std::pow(beta, 1.0 / d);
  return b;
}

MakarovBound makarov_bound(int d, double c_const, double bloch_norm, double beta, double R,
                           double theta, int N) {
  require(d >= 1, "dimension must be >= 1");
  require(c_const > 0.0 && bloch_norm > 0.0 && R > 0.0, "C, Bloch norm and R must be positive");
  require(beta > 0.0 && beta <= 1.0, "beta must lie in (0,1]");
  require(N >= 2, "N must be >= 2");
  require_theta(theta);
  MakarovBound m;
  m.raw = d - c_const * bloch_norm * std::log(1.0 / beta) /
                  (R * std::cos(theta) * std::log(static_cast<double>(N)));
  m.clamped = m.raw < 0.0;
  m.bound = std::max(0.0, m.raw);
  return m;
}

ConeCheckResult cone_bound_check(double R, double k, double theta, std::size_t trials,
                                 std::uint64_t seed, std::size_t dim) {
  require_theta(theta);
  require(R >= 0.0 && k >= 0.0, "R and k must be nonnegative");
  require(R * std::cos(theta) >= k * (1.0 - 1e-15), "cone check needs R >= k / cos(theta)");
  require(dim >= 2, "cone check needs dimension >= 2");
  const double c = std::cos(theta), s = std::sin(theta);
  const double bound = std::sqrt(R * R * s * s + k * k);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss;

  auto random_unit = [&]() {
    Vec v(dim);
    double n = 0.0;
    do {
      for (double& x : v) x = gauss(rng);
      n = norm(v);
    } while (n < 1e-12);
    for (double& x : v) x /= n;
    return v;
  };

  ConeCheckResult res;
  for (std::size_t t = 0; t < trials; ++t) {
    // Mix interior samples with the extreme corners the 2D reduction singles out.
    const double ur = unif(rng), us = unif(rng), ua = unif(rng);
    const double radius = (t % 4 == 0) ? R : (t % 16 == 1 ? 0.0 : R * ur);
    const double len = (t % 3 == 0) ? R * c + k : R * c + k * us;
    const double ang = (t % 5 == 0) ? theta * (1.0 - 1e-12) : theta * ua;

    const Vec u = random_unit();
    Vec a(dim);
    for (std::size_t i = 0; i < dim; ++i) a[i] = radius * u[i];

    // w: unit vector at angle `ang` from u, so that b = a - len*w lies in the
    // cone of vertex a around the axis through the origin.
    Vec perp = random_unit();
    const double proj = dot(perp, u);
    for (std::size_t i = 0; i < dim; ++i) perp[i] -= proj * u[i];
    const double pn = norm(perp);
    if (pn < 1e-9) continue;
    for (double& x : perp) x /= pn;
    Vec b(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const double w = std::cos(ang) * u[i] + std::sin(ang) * perp[i];
      b[i] = a[i] - len * w;
    }
    ++res.trials;
    const double nb = norm(b);
    const double ratio = bound > 0.0 ? nb / bound : (nb > 0.0 ? INFINITY : 0.0);
    res.worst_ratio = std::max(res.worst_ratio, ratio);
    if (nb > bound * (1.0 + 1e-12) + 1e-300) ++res.violations;
  }
  return res;
}

double radius_g(double x) {
  require(x >= 0.0, "g is defined for x >= 0");
  return std::sqrt(x * (x + 1.0));
}

Vec radius_recursion(std::span<const double> k_seq, double theta, double R1) {
  require_theta(theta);
  require(!k_seq.empty(), "k sequence must be nonempty");
  for (double k : k_seq) require(k > 0.0, "k sequence must be positive");
  const double c = std::cos(theta), s = std::sin(theta);
  require(R1 >= radius_g(k_seq[0] / c) * (1.0 - 1e-15), "R_1 must be >= g(k_1 / cos theta)");
  Vec R(k_seq.size());
  R[0] = R1;
  for (std::size_t n = 0; n + 1 < k_seq.size(); ++n) {
    R[n + 1] = std::max(radius_g(k_seq[n + 1] / c),
                        std::sqrt(R[n] * R[n] * s * s + k_seq[n] * k_seq[n]));
  }
  return R;
}

ConstantCalibration calibrate_c_const(const FieldHandle& field, const NadicCube& q0, int depth,
                                      int m, double bloch, int threads) {
  require(depth >= 1, "calibration depth must be >= 1");
  require(bloch > 0.0, "Bloch seminorm must be positive for calibration");
  std::vector<NadicCube> cubes;
  for (int g = q0.generation(); g < q0.generation() + depth; ++g) {
    auto level = descendants(q0, g);
    cubes.insert(cubes.end(), level.begin(), level.end());
  }
  std::vector<ConstantCalibration> per(cubes.size());
  parallel_for(cubes.size(), threads, [&](std::size_t i) {
    const NadicCube& q = cubes[i];
    const Vec avg = face_average_gradient(field, q, m);
    const double lq = q.side();
    for (const auto& child : q.children()) {
      const Vec ca = face_average_gradient(field, child, m);
      per[i].parent_child = std::max(per[i].parent_child, distance(avg, ca));
      const double lc = child.side();
      const double heights[3] = {lc, std::sqrt(lc * lq), lq};
      for_each_cube_node(child, std::max(2, m / 2), [&](std::span<const double> x, double) {
        for (double y : heights)
          per[i].pointwise = std::max(per[i].pointwise, distance(field.jet(x, y).gradient, avg));
      });
    }
  });
  ConstantCalibration out;
  for (const auto& p : per) {
    out.parent_child = std::max(out.parent_child, p.parent_child);
    out.pointwise = std::max(out.pointwise, p.pointwise);
  }
  out.parent_child /= bloch;
  out.pointwise /= bloch;
  out.c_const = std::max(out.parent_child, out.pointwise);
  return out;
}

}  // namespace zyg
