#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zygmund/qr_analysis.hpp"
#include "zygmund/weierstrass.hpp"

namespace zyg {

// A field built from a config "field" block. `weierstrass` is set only for
// kind "weierstrass"; `boundary` is the boundary function f when known.
struct FieldBundle {
  std::string kind;
  FieldPtr field;
  std::shared_ptr<const WeierstrassField> weierstrass;
  BoundaryFunction boundary;
};

// {"kind": "weierstrass" (default) | "linear" | "saddle" | "kink", ...}
//   weierstrass: phi, b, tail_tol
//   linear:      d, slope, offset
//   saddle:      d
//   kink:        d, center, scale
FieldBundle make_field(const nlohmann::json& block, std::vector<std::string>* warnings);

struct LatticeConfig {
  int N = 2;
  Vec corner;  // defaults to the origin
  double side = 1.0;
  int j_max = 8;
  int m = 8;
};

struct StoppingConfig {
  std::optional<double> R;        // unset: max(C B / cos theta, |(grad F)_Q0|)
  std::optional<double> M;        // alternative to R; M = R cos theta
  double theta = std::numbers::pi / 3.0;
  int K = 3;
  std::optional<double> c_const;  // unset: calibrated
  int calibration_depth = 6;
};

struct QRConfig {
  int N = 2;
  int depth = 4;
  int m = 16;
};

struct SamplingConfig {
  std::uint64_t seed = 1;
  std::size_t bloch_samples = 4096;
  double bloch_y_min = 1e-4;
  std::size_t zygmund_samples = 20000;
  double h_min = 1e-6;
  double y_floor = 1e-6;
  int points_per_decade = 8;
  int samples_per_cube = 3;
  std::size_t x_samples = 1000;
  Vec floors;       // survey floors, decreasing; default 2^-5 .. 2^-20
  Vec thresholds;   // survey thresholds; default {5, 10, 20}
  Vec direction;    // survey direction; default e_1
  std::size_t increment_residual_samples = 10000;
  std::size_t oscillation_pairs = 10000;
  std::vector<Vec> ray_points;  // default: root cube center
  std::size_t slow_directions = 8;
};

struct CondHConfig {
  std::size_t extra_directions = 16;
  double window = 0.5;
  double step = 1e-3;
};

struct ExperimentConfig {
  nlohmann::json field;
  LatticeConfig lattice;
  StoppingConfig stopping;
  QRConfig qr;
  SamplingConfig sampling;
  CondHConfig condh;
  int threads = 0;
  std::string output_dir = "out";
};

// Strict parse: unknown keys and wrong types are invalid_argument errors.
ExperimentConfig parse_config(const nlohmann::json& j);

// FNV-1a over the canonical (sorted-key) dump of the config with the
// effective seed substituted and the run-only keys threads/output_dir removed.
std::string config_hash(const nlohmann::json& config, std::uint64_t seed);

struct RunOptions {
  std::string out_dir;  // overrides output_dir when nonempty
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string points_path;  // eval only
};

struct RunResult {
  nlohmann::json summary;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
};

inline const char* kCommands[] = {"eval", "cantor", "qr", "ray", "survey", "condh",
                                  "seminorms", "selftest"};

// Runs one command, writes its outputs into the output directory and updates
// manifest.json there. Outputs depend only on (config, seed).
RunResult run_experiment(const std::string& command, const std::string& config_text,
                         const RunOptions& opts);

std::string artifact_version();

}  // namespace zyg
