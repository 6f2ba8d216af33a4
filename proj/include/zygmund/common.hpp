#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace zyg {

using Vec = std::vector<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Smallest height accepted by any jet evaluation. The Weierstrass series needs
// about log_b(1/y) terms, so this caps the per-jet cost.
inline constexpr double kMinHeight = 1e-12;

enum class ErrorKind {
  invalid_argument,  // bad parameters or configuration
  numeric,           // a numeric validation failed
  io,                // unreadable or malformed input files
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_argument(const std::string& what) {
  throw Error(ErrorKind::invalid_argument, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail_argument(what);
}

// Dense square matrix, row-major. Used for Hessians of size d or d+1.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const double> data() const noexcept { return a_; }
  std::span<double> data() noexcept { return a_; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }
  double frobenius() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }
  double max_abs_entry() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
  }

  SquareMatrix& operator+=(const SquareMatrix& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
  }
  SquareMatrix& operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
  }

  Vec apply(std::span<const double> e) const {
    Vec out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out[i] += (*this)(i, j) * e[j];
    return out;
  }
  SquareMatrix square() const {
    SquareMatrix s(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n_; ++k) acc += (*this)(i, k) * (*this)(k, j);
        s(i, j) = acc;
      }
    return s;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Runs body(i) for i in [0, count) on `threads` workers with static
// interleaved assignment. Callers write results into slot i, so the outcome
// does not depend on the thread count. threads <= 0 means hardware
// concurrency. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

int resolve_threads(int threads);

}  // namespace zyg
