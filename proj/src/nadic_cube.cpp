#include "zygmund/nadic_cube.hpp"

#include <sstream>

namespace zyg {

namespace {

std::int64_t int_pow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

NadicCube::NadicCube(std::shared_ptr<const RootCube> root, int generation,
                     std::vector<std::int64_t> index)
    : root_(std::move(root)), generation_(generation), index_(std::move(index)) {
  require(root_ != nullptr, "cube needs a root");
  require(root_->N >= 2, "N must be >= 2");
  require(root_->side > 0.0, "root sidelength must be positive");
  require(root_->dimension() >= 1, "root cube needs a dimension");
  require(generation_ >= 0, "generation must be >= 0");
  require(index_.size() == root_->dimension(), "cube index has wrong dimension");
  const double span = std::pow(static_cast<double>(root_->N), generation_);
  require(span < 9.0e15, "generation too deep for exact addressing");
  const auto limit = int_pow(root_->N, generation_);
  for (auto i : index_) require(i >= 0 && i < limit, "cube index out of range");
}

NadicCube NadicCube::root_of(std::shared_ptr<const RootCube> root) {
  const std::size_t d = root->dimension();
  return NadicCube(std::move(root), 0, std::vector<std::int64_t>(d, 0));
}

NadicCube NadicCube::root_of(Vec corner, double side, int N) {
  return root_of(std::make_shared<const RootCube>(RootCube{std::move(corner), side, N}));
}

double NadicCube::side() const {
  return root_->side / std::pow(static_cast<double>(root_->N), generation_);
}

Vec NadicCube::corner() const {
  const double l = side();
  Vec c(dimension());
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = root_->corner[i] + static_cast<double>(index_[i]) * l;
  return c;
}

Vec NadicCube::center() const {
  Vec c = corner();
  const double half = 0.5 * side();
  for (double& v : c) v += half;
  return c;
}

std::vector<NadicCube> NadicCube::children() const {
  const std::size_t d = dimension();
  const int N = root_->N;
  const auto count = static_cast<std::size_t>(int_pow(N, static_cast<int>(d)));
  std::vector<NadicCube> out;
  out.reserve(count);
  std::vector<std::int64_t> idx(d);
  for (std::size_t c = 0; c < count; ++c) {
    // Lexicographic order with the first coordinate most significant.
    std::size_t rest = c;
    for (std::size_t i = d; i-- > 0;) {
      idx[i] = index_[i] * N + static_cast<std::int64_t>(rest % static_cast<std::size_t>(N));
      rest /= static_cast<std::size_t>(N);
    }
    out.emplace_back(root_, generation_ + 1, idx);
  }
  return out;
}

std::optional<NadicCube> NadicCube::parent() const {
  if (generation_ == 0) return std::nullopt;
  return ancestor(generation_ - 1);
}

NadicCube NadicCube::ancestor(int generation) const {
  require(generation >= 0 && generation <= generation_, "ancestor generation out of range");
  const auto factor = int_pow(root_->N, generation_ - generation);
  std::vector<std::int64_t> idx(index_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = index_[i] / factor;
  return NadicCube(root_, generation, idx);
}

bool NadicCube::contains(const NadicCube& other) const {
  if (other.generation_ < generation_) return false;
  return other.ancestor(generation_) == *this;
}

bool NadicCube::interiors_overlap(const NadicCube& other) const {
  return contains(other) || other.contains(*this);
}

std::string NadicCube::address() const {
  std::ostringstream os;
  os << generation_ << ':';
  for (std::size_t i = 0; i < index_.size(); ++i) {
    if (i) os << ',';
    os << index_[i];
  }
  return os.str();
}

NadicCube NadicCube::from_address(std::shared_ptr<const RootCube> root, const std::string& address) {
  const auto colon = address.find(':');
  require(colon != std::string::npos, "cube address must look like j:i1,...,id");
  int gen = 0;
  std::vector<std::int64_t> idx;
  try {
    std::size_t used = 0;
    gen = std::stoi(address.substr(0, colon), &used);
    require(used == colon, "bad generation in cube address");
    std::string rest = address.substr(colon + 1);
    std::size_t pos = 0;
    while (true) {
      const auto comma = rest.find(',', pos);
      const std::string tok = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      std::size_t u = 0;
      idx.push_back(std::stoll(tok, &u));
      require(u == tok.size() && !tok.empty(), "bad index in cube address");
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  } catch (const std::logic_error&) {
    fail_argument("malformed cube address: " + address);
  }
  return NadicCube(std::move(root), gen, std::move(idx));
}

CarlesonBox::CarlesonBox(NadicCube q, double d) : base(std::move(q)), delta(d) {
  require(delta > 0.0 && delta < 1.0, "Carleson box delta must lie in (0,1)");
}

std::vector<NadicCube> descendants(const NadicCube& q, int generation) {
  require(generation >= q.generation(), "descendant generation must not be above the cube");
  std::vector<NadicCube> level{q};
  for (int g = q.generation(); g < generation; ++g) {
    std::vector<NadicCube> next;
    for (const auto& c : level) {
      auto kids = c.children();
      next.insert(next.end(), kids.begin(), kids.end());
    }
    level = std::move(next);
  }
  std::sort(level.begin(), level.end());
  return level;
}

void for_each_cube_node(const NadicCube& q, int m,
                        const std::function<void(std::span<const double>, double)>& visit) {
  require(m >= 1, "nodes per axis must be >= 1");
  const std::size_t d = q.dimension();
  const Vec corner = q.corner();
  const double h = q.side() / m;
  const double weight = q.volume() / std::pow(static_cast<double>(m), static_cast<double>(d));
  std::vector<int> it(d, 0);
  Vec x(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i) x[i] = corner[i] + (it[i] + 0.5) * h;
    visit(x, weight);
    std::size_t k = d;
    while (k > 0) {
      --k;
      if (++it[k] < m) break;
      it[k] = 0;
      if (k == 0) return;
    }
  }
}

void for_each_box_node(const CarlesonBox& box, int m,
                       const std::function<void(std::span<const double>, double, double)>& visit) {
  require(m >= 1, "nodes per axis must be >= 1");
  const double ylo = box.y_low(), yhi = box.y_high();
  const double hy = (yhi - ylo) / m;
  for (int j = 0; j < m; ++j) {
    const double y = ylo + (j + 0.5) * hy;
    for_each_cube_node(box.base, m, [&](std::span<const double> x, double w) {
      visit(x, y, w * hy);
    });
  }
}

double box_quadrature(const CarlesonBox& box, const BoxIntegrand& integrand, int m) {
  require(m >= 2, "box quadrature needs m >= 2");
  double sum = 0.0;
  for_each_box_node(box, m, [&](std::span<const double> x, double y, double w) {
    sum += w * integrand(x, y);
  });
  return sum;
}

QuadratureResult box_quadrature_with_estimate(const CarlesonBox& box,
                                              const BoxIntegrand& integrand, int m) {
  QuadratureResult r;
  r.value = box_quadrature(box, integrand, m);
  r.discrepancy = std::abs(r.value - box_quadrature(box, integrand, 2 * m));
  return r;
}

Vec face_average_gradient(const FieldHandle& field, const NadicCube& q, int m) {
  require(m >= 2, "face average needs m >= 2");
  require(field.dimension() == q.dimension(), "field and cube dimensions differ");
  const double y = q.side();
  Vec avg(q.dimension() + 1, 0.0);
  for_each_cube_node(q, m, [&](std::span<const double> x, double w) {
    const HarmonicJet j = field.jet(x, y);
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += w * j.gradient[i];
  });
  const double vol = q.volume();
  for (double& v : avg) v /= vol;
  return avg;
}

}  // namespace zyg
