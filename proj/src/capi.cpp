#include "zygmund/zygmund.h"

#include <cstring>
#include <new>

#include "zygmund/experiment.hpp"
#include "zygmund/stopping_time.hpp"

struct zyg_field {
  zyg::FieldBundle bundle;
};

namespace {

thread_local std::string g_last_error;

zyg_status status_of(zyg::ErrorKind k) {
  switch (k) {
    case zyg::ErrorKind::invalid_argument: return ZYG_ERR_ARGUMENT;
    case zyg::ErrorKind::numeric: return ZYG_ERR_NUMERIC;
    case zyg::ErrorKind::io: return ZYG_ERR_IO;
  }
  return ZYG_ERR_INTERNAL;
}

template <typename Fn>
zyg_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return ZYG_OK;
  } catch (const zyg::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return ZYG_ERR_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ZYG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ZYG_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* zyg_version(void) {
  static const std::string v = zyg::artifact_version();
  return v.c_str();
}

const char* zyg_last_error(void) { return g_last_error.c_str(); }

zyg_status zyg_field_from_json(const char* json, zyg_field** out) {
  return guarded([&] {
    zyg::require(json != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    std::vector<std::string> warnings;
    auto bundle = zyg::make_field(nlohmann::json::parse(json), &warnings);
    *out = new zyg_field{std::move(bundle)};
  });
}

void zyg_field_free(zyg_field* field) { delete field; }

size_t zyg_field_dimension(const zyg_field* field) {
  return field ? field->bundle.field->dimension() : 0;
}

zyg_status zyg_field_jet(const zyg_field* field, const double* x, double y, double* value,
                         double* grad, double* hess) {
  return guarded([&] {
    zyg::require(field != nullptr && x != nullptr, "null argument");
    const std::size_t d = field->bundle.field->dimension();
    const zyg::HarmonicJet j = field->bundle.field->jet(std::span<const double>(x, d), y);
    if (value) *value = j.value;
    if (grad) std::copy(j.gradient.begin(), j.gradient.end(), grad);
    if (hess) std::copy(j.hessian.data().begin(), j.hessian.data().end(), hess);
  });
}

zyg_status zyg_field_eval_boundary(const zyg_field* field, const double* x, double* out) {
  return guarded([&] {
    zyg::require(field != nullptr && x != nullptr && out != nullptr, "null argument");
    zyg::require(static_cast<bool>(field->bundle.boundary), "field has no boundary function");
    *out = field->bundle.boundary(std::span<const double>(x, field->bundle.field->dimension()));
  });
}

zyg_status zyg_hungerford_bound(double alpha, double beta, int d, double* bound, int* valid) {
  return guarded([&] {
    const zyg::DimBound b = zyg::hungerford_bound(alpha, beta, d);
    if (bound) *bound = b.bound;
    if (valid) *valid = b.valid ? 1 : 0;
  });
}

zyg_status zyg_run_command(const char* command, const char* config_json,
                           const zyg_run_options* options, char** summary_json) {
  return guarded([&] {
    zyg::require(command != nullptr && config_json != nullptr, "null argument");
    if (summary_json) *summary_json = nullptr;
    zyg::RunOptions opts;
    if (options) {
      if (options->out_dir) opts.out_dir = options->out_dir;
      if (options->has_seed) opts.seed = options->seed;
      if (options->threads > 0) opts.threads = options->threads;
      if (options->points_path) opts.points_path = options->points_path;
    }
    const zyg::RunResult r = zyg::run_experiment(command, config_json, opts);
    if (summary_json) *summary_json = dup_string(r.summary.dump());
  });
}

void zyg_string_free(char* s) { std::free(s); }

}  // extern "C"
