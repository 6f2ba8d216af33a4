#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zygmund/nadic_cube.hpp"

namespace zyg {

enum class NodeStatus { stopped, interior, unresolved };

std::string to_string(NodeStatus s);

struct StoppingNode {
  NadicCube cube;
  Vec avg_grad;            // (grad F)_Q
  NodeStatus status = NodeStatus::interior;
  double deviation = 0.0;  // |(grad F)_Q - (grad F)_root|
};

struct StoppingFamily {
  NadicCube root;
  Vec root_avg;
  double M = 0.0;
  std::vector<StoppingNode> stopped;     // S_M(root), address order
  std::vector<StoppingNode> unresolved;  // still interior at depth J_max
  double stopped_fraction = 0.0;         // sum m_d(Q') / m_d(root)
  double unresolved_fraction = 0.0;
  std::size_t cubes_visited = 0;
};

// Depth-first search over N-adic descendants of q. A cube stops the first time
// its face average deviates from the root's by strictly more than M; the
// search does not descend below stopped cubes. Cubes that are still within M
// at generation J_max (relative to q) are reported as unresolved.
StoppingFamily stopping_family(const FieldHandle& field, const NadicCube& q, double M,
                               int j_max, int m);

// Keeps the nodes whose average a' lies in the cone Gamma_theta(a) of vertex
// a = parent_avg pointing toward the origin: (a' - a).xi > cos(theta) |a' - a|
// with xi = -a/|a|. Without a reference direction the filter is the identity.
std::vector<StoppingNode> angular_filter(const std::vector<StoppingNode>& family,
                                         std::span<const double> parent_avg,
                                         const std::optional<Vec>& ref, double theta);

// xi_Q = -(grad F)_Q / |(grad F)_Q|, or nothing when the average vanishes.
std::optional<Vec> angular_reference(std::span<const double> avg);

struct CantorParams {
  double M = 1.0;
  double theta = 1.0471975511965976;  // pi/3
  int K = 1;
  int j_max = 8;
  int m = 8;
  int threads = 1;
};

struct CantorNode {
  StoppingNode node;
  std::int64_t parent = -1;   // index into the previous generation
  std::optional<Vec> xi;      // angular reference used for this node's children
  bool alive = true;          // has descendants in the final generation
  bool selected = false;      // member of the sub-tree behind measured_alpha/beta
};

struct GenerationSummary {
  std::size_t count = 0;
  std::size_t alive = 0;
  double measured_alpha = 0.0;    // max l(Q')/l(Q) over parent-child pairs
  double measured_beta = 0.0;     // min over parents of sum (l(Q')/l(Q))^d
  double pruned_beta = 0.0;       // same, restricted to surviving branches
  double unresolved_fraction = 0.0;  // max over parents
  std::size_t filtered_out = 0;   // dropped by the angular filter
};

struct CantorTree {
  NadicCube root;
  CantorParams params;
  std::vector<std::vector<CantorNode>> generations;  // generations[0] = {root}
  std::vector<GenerationSummary> summaries;          // summaries[k] describes G_k, k >= 1
  bool terminated_early = false;
  int empty_generation = -1;
  std::vector<std::string> warnings;

  // Any sub-tree of the construction is again a nested family whose limit set
  // lies inside E_infinity. The selected sub-tree keeps only children with
  // l(Q')/l(Q) <= alpha and maximizes the guaranteed mass
  //   beta = min over kept parents of sum (l(Q')/l(Q))^d,
  // with alpha chosen among the observed ratios to maximize the dimension bound.
  double selected_alpha = 0.0;
  double selected_beta = 0.0;
  std::size_t selected_nodes = 0;

  // Raw alpha (all pairs) and pruned beta (surviving branches) over 1..K.
  double raw_alpha() const;
  double raw_beta() const;
  double measured_alpha() const { return selected_alpha; }
  double measured_beta() const { return selected_beta; }
};

// G_0 = {Q0}, G_1 = S_M(Q0), G_k = union over G_{k-1} of S_{M,theta}(Q).
CantorTree cantor_build(const FieldHandle& field, const NadicCube& q0, const CantorParams& params);

struct TreeInvariantReport {
  bool maximality = true;
  bool disjointness = true;
  bool nesting = true;
  std::size_t checked_nodes = 0;
  std::vector<std::string> problems;
  bool ok() const { return maximality && disjointness && nesting; }
};

// Exhaustive check: every node's tower from its parent satisfies the <= M
// condition strictly above it and > M at it; generations have pairwise
// disjoint interiors; nodes nest in their parents. Face averages are
// recomputed from the field.
TreeInvariantReport check_tree_invariants(const FieldHandle& field, const CantorTree& tree);

struct BoundedRayReport {
  bool precondition_ok = false;
  std::string precondition_message;
  double R = 0.0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;      // max |grad F| / (2R)
  double resolved_floor = 0.0; // smallest height actually checked
  std::size_t node_bound_violations = 0;  // nodes with |avg_grad| > R
};

struct BoundedRayOptions {
  double y_floor = 1e-6;
  int points_per_decade = 8;
  int samples_per_cube = 3;
  // When set, also require R >= c_const * bloch / cos(theta).
  std::optional<double> c_times_bloch;
};

// For sample points in final-generation cubes, checks sup |grad F(x,y)| <= 2R
// on a log-spaced y grid in [max(y_floor, l(Q_K)), l(Q0)]. Refuses to certify
// when R < |(grad F)_{Q0}| or M != R cos(theta).
BoundedRayReport verify_bounded_ray(const FieldHandle& field, const CantorTree& tree, double R,
                                    const BoundedRayOptions& opts);

struct DimBound {
  double alpha = 0.0;
  double beta = 0.0;
  int d = 1;
  double bound = 0.0;
  bool valid = false;
};

// log(beta / alpha^d) / log(1/alpha); valid iff 0 < alpha < beta^{1/d} <= 1.
DimBound hungerford_bound(double alpha, double beta, int d);

struct MakarovBound {
  double raw = 0.0;
  double bound = 0.0;  // max(raw, 0)
  bool clamped = false;
};

// d - C B log(1/beta) / (R cos(theta) log N)
MakarovBound makarov_bound(int d, double c_const, double bloch_norm, double beta, double R,
                           double theta, int N);

struct ConeCheckResult {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max |b| / sqrt(R^2 sin^2 + k^2)
};

// Monte-Carlo check of |a| <= R => |b| <= sqrt(R^2 sin^2(theta) + k^2) for
// b in the cone of vertex a with R cos(theta) <= |a-b| <= R cos(theta) + k.
ConeCheckResult cone_bound_check(double R, double k, double theta, std::size_t trials,
                                 std::uint64_t seed, std::size_t dim = 3);

// g(x) = sqrt(x (x+1))
double radius_g(double x);

// R_{n+1} = max(g(k_{n+1}/cos theta), sqrt(R_n^2 sin^2 theta + k_n^2)).
Vec radius_recursion(std::span<const double> k_seq, double theta, double R1);

// Observed sup of |(grad F)_parent - (grad F)_child| and of the pointwise
// deviation |grad F(x,y) - (grad F)_Q| for x in a child, l(child) <= y <= l(Q),
// over all cubes of generations < depth; both divided by bloch.
struct ConstantCalibration {
  double parent_child = 0.0;
  double pointwise = 0.0;
  double c_const = 0.0;  // max of the two
};

ConstantCalibration calibrate_c_const(const FieldHandle& field, const NadicCube& q0, int depth,
                                      int m, double bloch, int threads = 1);

}  // namespace zyg
