#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zygmund/harmonic_field.hpp"

namespace zyg {

struct RootCube {
  Vec corner;
  double side = 1.0;
  int N = 2;

  std::size_t dimension() const noexcept { return corner.size(); }
};

// An N-adic descendant of a root cube. Geometry is always recomputed from
// (root, generation, index), never accumulated through subdivision.
class NadicCube {
 public:
  NadicCube(std::shared_ptr<const RootCube> root, int generation, std::vector<std::int64_t> index);
  static NadicCube root_of(std::shared_ptr<const RootCube> root);
  static NadicCube root_of(Vec corner, double side, int N);

  std::size_t dimension() const noexcept { return root_->dimension(); }
  int N() const noexcept { return root_->N; }
  int generation() const noexcept { return generation_; }
  const std::vector<std::int64_t>& index() const noexcept { return index_; }
  const RootCube& root() const noexcept { return *root_; }
  const std::shared_ptr<const RootCube>& root_ptr() const noexcept { return root_; }

  double side() const;
  Vec corner() const;
  Vec center() const;
  double volume() const { return std::pow(side(), static_cast<double>(dimension())); }

  std::vector<NadicCube> children() const;
  std::optional<NadicCube> parent() const;
  // Ancestor at the given generation (<= this generation).
  NadicCube ancestor(int generation) const;
  bool contains(const NadicCube& other) const;  // other is this cube or a descendant
  bool interiors_overlap(const NadicCube& other) const;

  // "j:i1,i2,...,id"
  std::string address() const;
  static NadicCube from_address(std::shared_ptr<const RootCube> root, const std::string& address);

  bool operator==(const NadicCube& o) const {
    return generation_ == o.generation_ && index_ == o.index_;
  }
  // Generation first, then lexicographic index.
  bool operator<(const NadicCube& o) const {
    if (generation_ != o.generation_) return generation_ < o.generation_;
    return index_ < o.index_;
  }

 private:
  std::shared_ptr<const RootCube> root_;
  int generation_ = 0;
  std::vector<std::int64_t> index_;
};

// Q x [delta l(Q), l(Q)].
struct CarlesonBox {
  NadicCube base;
  double delta;

  CarlesonBox(NadicCube q, double d);
  double y_low() const { return delta * base.side(); }
  double y_high() const { return base.side(); }
  double volume() const { return base.volume() * (y_high() - y_low()); }
};

// All cubes of generation `generation` below `q`, in lexicographic order.
std::vector<NadicCube> descendants(const NadicCube& q, int generation);

// Midpoint nodes of a cube (m per axis), lexicographic order, and the
// common weight m_d(Q)/m^d.
void for_each_cube_node(const NadicCube& q, int m,
                        const std::function<void(std::span<const double>, double)>& visit);

// Midpoint nodes of a box (m per axis, including height). Height is the outer
// loop; weight is volume/m^{d+1}.
void for_each_box_node(const CarlesonBox& box, int m,
                       const std::function<void(std::span<const double>, double, double)>& visit);

struct QuadratureResult {
  double value = 0.0;
  std::optional<double> discrepancy;  // |I_m - I_{2m}| when requested
};

using BoxIntegrand = std::function<double(std::span<const double>, double)>;

double box_quadrature(const CarlesonBox& box, const BoxIntegrand& integrand, int m);
QuadratureResult box_quadrature_with_estimate(const CarlesonBox& box,
                                              const BoxIntegrand& integrand, int m);

// (grad F)_Q: midpoint average of grad F(., l(Q)) over Q.
Vec face_average_gradient(const FieldHandle& field, const NadicCube& q, int m);

}  // namespace zyg
