#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "zygmund/zygmund.h"

namespace {

int exit_code(zyg_status s) {
  switch (s) {
    case ZYG_OK: return 0;
    case ZYG_ERR_ARGUMENT:
    case ZYG_ERR_IO: return 2;
    case ZYG_ERR_NUMERIC: return 3;
    default: return 1;
  }
}

const char* kind_name(zyg_status s) {
  switch (s) {
    case ZYG_ERR_ARGUMENT: return "config";
    case ZYG_ERR_IO: return "io";
    case ZYG_ERR_NUMERIC: return "numeric";
    default: return "internal";
  }
}

// One line, quotes escaped, so callers can parse it with a regex.
int report_error(zyg_status s, const std::string& message) {
  std::string m;
  for (char c : message) {
    if (c == '\n' || c == '\r') m += ' ';
    else if (c == '"' || c == '\\') m += std::string("\\") + c;
    else m += c;
  }
  std::fprintf(stderr, "error code=%d kind=%s message=\"%s\"\n", exit_code(s), kind_name(s),
               m.c_str());
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weierstrass-type harmonic gradients: stopping-time Cantor trees, weak QR and "
               "slow-point analysis"};
  app.set_version_flag("--version", std::string(zyg_version()));
  std::string config_path, out_dir, points_path;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  auto* seed_opt = app.add_option("--seed", seed, "seed (overrides sampling.seed)");
  app.add_option("--threads", threads, "worker threads (0: config, then all cores)");
  app.require_subcommand(1, 1);

  const std::pair<const char*, const char*> commands[] = {
      {"eval", "field jets at points from --points"},
      {"cantor", "stopping-time Cantor tree, bounded-ray check and dimension bound"},
      {"qr", "weak quasi-regularity sweep over N-adic cubes"},
      {"ray", "vertical ray profiles and slow-point scores"},
      {"survey", "directional divergence survey"},
      {"condh", "condition H verdicts for the base polynomial"},
      {"seminorms", "Bloch/Zygmund estimates, increment residual and oscillation check"},
      {"selftest", "quick internal consistency checks"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    if (std::string(name) == "eval")
      sub->add_option("--points", points_path, "points file: d+1 numbers per row")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report_error(ZYG_ERR_ARGUMENT, e.what());
  }

  std::ifstream f(config_path);
  if (!f) return report_error(ZYG_ERR_ARGUMENT, "cannot read config " + config_path);
  std::stringstream ss;
  ss << f.rdbuf();

  zyg_run_options opts{};
  opts.out_dir = out_dir.empty() ? nullptr : out_dir.c_str();
  opts.has_seed = seed_opt->count() > 0;
  opts.seed = seed;
  opts.threads = threads;
  opts.points_path = points_path.empty() ? nullptr : points_path.c_str();

  const std::string command = app.get_subcommands().front()->get_name();
  char* summary = nullptr;
  const zyg_status s = zyg_run_command(command.c_str(), ss.str().c_str(), &opts, &summary);
  if (s != ZYG_OK) return report_error(s, zyg_last_error());

  const auto j = nlohmann::json::parse(summary);
  zyg_string_free(summary);
  for (const auto& w : j.at("warnings")) std::fprintf(stderr, "warning: %s\n", w.get<std::string>().c_str());
  std::cout << j.dump(2) << '\n';
  return 0;
}
