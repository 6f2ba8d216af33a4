#include "zygmund/trig_polynomial.hpp"

#include <map>
#include <sstream>

#include "zygmund/sampling.hpp"

namespace zyg {

namespace {

bool is_canonical(const std::vector<int>& k) {
  for (int v : k) {
    if (v > 0) return true;
    if (v < 0) return false;
  }
  return false;  // zero vector
}

std::vector<int> negated(const std::vector<int>& k) {
  std::vector<int> n(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) n[i] = -k[i];
  return n;
}

double euclid(const std::vector<int>& k) {
  double s = 0.0;
  for (int v : k) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

double l1(const std::vector<int>& k) {
  double s = 0.0;
  for (int v : k) s += std::abs(static_cast<double>(v));
  return s;
}

}  // namespace

std::string to_string(ConditionHVerdict v) {
  switch (v) {
    case ConditionHVerdict::holds_via_derivative: return "holds_via_derivative";
    case ConditionHVerdict::holds_via_extremum: return "holds_via_extremum";
    case ConditionHVerdict::fails: return "fails";
    case ConditionHVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double reduced_phase(std::span<const int> k, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] == 0) continue;
    const double xi = x[i] - std::floor(x[i]);
    s += k[i] * xi;
  }
  s -= std::floor(s);
  return kTwoPi * s;
}

TrigPolynomial::TrigPolynomial(int d, const std::vector<TrigTerm>& terms, double* asymmetry)
    : d_(d) {
  require(d >= 1, "trigonometric polynomial dimension must be >= 1");
  std::map<std::vector<int>, std::complex<double>> coeffs;
  for (const auto& t : terms) {
    require(static_cast<int>(t.k.size()) == d,
            "frequency vector length does not match dimension");
    require(std::isfinite(t.c.real()) && std::isfinite(t.c.imag()),
            "non-finite coefficient");
    coeffs[t.k] += t.c;
  }

  double worst = 0.0;
  std::map<std::vector<int>, std::complex<double>> half;
  for (const auto& [k, c] : coeffs) {
    const bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
    if (zero) {
      worst = std::max(worst, std::abs(c.imag()));
      constant_ = c.real();
      continue;
    }
    const std::vector<int> key = is_canonical(k) ? k : negated(k);
    if (half.count(key)) continue;
    const auto pos = coeffs.find(key);
    const auto neg = coeffs.find(negated(key));
    const std::complex<double> cp = pos == coeffs.end() ? 0.0 : pos->second;
    const std::complex<double> cn = neg == coeffs.end() ? 0.0 : neg->second;
    worst = std::max(worst, std::abs(cp - std::conj(cn)));
    half[key] = 0.5 * (cp + std::conj(cn));
  }
  if (asymmetry) *asymmetry = worst;

  for (const auto& [k, c] : half) {
    if (c == std::complex<double>(0.0, 0.0)) continue;
    RealMode m;
    m.k = k;
    m.a = 2.0 * c.real();
    m.b = -2.0 * c.imag();
    m.freq = euclid(k);
    m.abs_pair = 2.0 * std::abs(c);
    modes_.push_back(std::move(m));
  }
  max_freq_ = 0.0;
  min_freq_ = modes_.empty() ? 0.0 : modes_.front().freq;
  for (const auto& m : modes_) {
    max_freq_ = std::max(max_freq_, m.freq);
    min_freq_ = std::min(min_freq_, m.freq);
  }
}

TrigPolynomial TrigPolynomial::cosine_sum(int d) {
  std::vector<TrigTerm> terms;
  for (int i = 0; i < d; ++i) {
    std::vector<int> k(static_cast<std::size_t>(d), 0);
    k[static_cast<std::size_t>(i)] = 1;
    terms.push_back({k, 0.5});
    k[static_cast<std::size_t>(i)] = -1;
    terms.push_back({k, 0.5});
  }
  return TrigPolynomial(d, terms);
}

TrigPolynomial TrigPolynomial::from_real_modes(int d, double constant,
                                               const std::vector<RealMode>& modes) {
  std::vector<TrigTerm> terms;
  std::vector<int> zero(static_cast<std::size_t>(d), 0);
  if (constant != 0.0) terms.push_back({zero, constant});
  for (const auto& m : modes) {
    const std::complex<double> c(0.5 * m.a, -0.5 * m.b);
    terms.push_back({m.k, c});
    terms.push_back({negated(m.k), std::conj(c)});
  }
  return TrigPolynomial(d, terms);
}

TrigPolynomial TrigPolynomial::from_json(const nlohmann::json& j,
                                         std::vector<std::string>* warnings) {
  require(j.is_object(), "phi must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    require(key == "d" || key == "terms", "unknown key in phi: " + key);
  }
  require(j.contains("d") && j["d"].is_number_integer(), "phi.d must be an integer");
  require(j.contains("terms") && j["terms"].is_array(), "phi.terms must be an array");
  const int d = j["d"].get<int>();
  require(d >= 1, "phi.d must be >= 1");
  std::vector<TrigTerm> terms;
  for (const auto& t : j["terms"]) {
    require(t.is_object(), "phi term must be an object");
    for (const auto& [key, _] : t.items()) {
      require(key == "k" || key == "re" || key == "im", "unknown key in phi term: " + key);
    }
    require(t.contains("k") && t["k"].is_array(), "phi term needs integer array k");
    TrigTerm term;
    for (const auto& v : t["k"]) {
      require(v.is_number_integer(), "phi term frequencies must be integers");
      term.k.push_back(v.get<int>());
    }
    require(static_cast<int>(term.k.size()) == d, "phi term k has wrong length");
    const double re = t.value("re", 0.0);
    const double im = t.value("im", 0.0);
    term.c = {re, im};
    terms.push_back(std::move(term));
  }
  double asym = 0.0;
  TrigPolynomial p(d, terms, &asym);
  if (asym > 1e-12 && warnings) {
    std::ostringstream os;
    os << "phi coefficients were not Hermitian (asymmetry " << asym << "); symmetrized";
    warnings->push_back(os.str());
  }
  return p;
}

nlohmann::json TrigPolynomial::to_json() const {
  nlohmann::json out;
  out["d"] = d_;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : terms()) {
    arr.push_back({{"k", t.k}, {"re", t.c.real()}, {"im", t.c.imag()}});
  }
  out["terms"] = arr;
  return out;
}

std::vector<TrigTerm> TrigPolynomial::terms() const {
  std::vector<TrigTerm> out;
  if (constant_ != 0.0) out.push_back({std::vector<int>(static_cast<std::size_t>(d_), 0), constant_});
  for (const auto& m : modes_) {
    const std::complex<double> c(0.5 * m.a, -0.5 * m.b);
    out.push_back({m.k, c});
    out.push_back({negated(m.k), std::conj(c)});
  }
  return out;
}

double TrigPolynomial::weighted_l1(int order) const {
  double s = order == 0 ? std::abs(constant_) : 0.0;
  for (const auto& m : modes_) s += m.abs_pair * std::pow(kTwoPi * m.freq, order);
  return s;
}

double TrigPolynomial::eval(std::span<const double> x) const {
  double v = constant_;
  for (const auto& m : modes_) {
    const double th = reduced_phase(m.k, x);
    v += m.a * std::cos(th) + m.b * std::sin(th);
  }
  return v;
}

std::complex<double> TrigPolynomial::eval_complex(std::span<const double> x) const {
  std::complex<double> v = constant_;
  for (const auto& m : modes_) {
    const double th = reduced_phase(m.k, x);
    const std::complex<double> c(0.5 * m.a, -0.5 * m.b);
    v += c * std::polar(1.0, th) + std::conj(c) * std::polar(1.0, -th);
  }
  return v;
}

Jet2 TrigPolynomial::jet2(std::span<const double> x) const {
  const auto d = static_cast<std::size_t>(d_);
  Jet2 j{constant_, Vec(d, 0.0), SquareMatrix(d)};
  for (const auto& m : modes_) {
    const double th = reduced_phase(m.k, x);
    const double c = std::cos(th), s = std::sin(th);
    const double even = m.a * c + m.b * s;
    const double odd = -m.a * s + m.b * c;
    j.value += even;
    for (std::size_t i = 0; i < d; ++i) {
      const double wi = kTwoPi * m.k[i];
      j.gradient[i] += wi * odd;
      for (std::size_t l = 0; l < d; ++l) j.hessian(i, l) -= wi * kTwoPi * m.k[l] * even;
    }
  }
  return j;
}

SeminormBundle TrigPolynomial::seminorm_bounds(double alpha) const {
  require(alpha > 0.0 && alpha < 1.0, "Holder exponent must lie in (0,1)");
  SeminormBundle b;
  b.alpha = alpha;
  b.sup_abs = weighted_l1(0);
  b.sup_grad = weighted_l1(1);
  b.sup_hess = weighted_l1(2);
  // |e^{i t} - 1| <= min(|t|, 2) <= 2^{1-alpha} |t|^alpha; summing the entry
  // seminorms brings in sum_ij |k_i k_j| = |k|_1^2.
  const double holder_factor = std::pow(2.0, 1.0 - alpha) * std::pow(kTwoPi, 2.0 + alpha);
  for (const auto& m : modes_) {
    const double k1 = l1(m.k);
    b.hess_holder_alpha += m.abs_pair * holder_factor * k1 * k1 * std::pow(m.freq, alpha);
  }
  return b;
}

std::vector<Vec> condition_h_directions(int d, std::size_t extra, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(d);
  std::vector<Vec> dirs;
  for (std::size_t i = 0; i < n; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    dirs.push_back(e);
  }
  if (d >= 2) {
    // Diagonals up to overall sign: first coordinate fixed positive.
    const std::size_t combos = std::size_t{1} << (n - 1);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t mask = 0; mask < combos; ++mask) {
      Vec e(n, s);
      for (std::size_t i = 1; i < n; ++i)
        if (mask & (std::size_t{1} << (i - 1))) e[i] = -s;
      dirs.push_back(e);
    }
  }
  if (extra > 0 && d >= 2) {
    auto more = sphere_directions(n, n + extra, seed);
    dirs.insert(dirs.end(), more.begin() + static_cast<std::ptrdiff_t>(n), more.end());
  }
  return dirs;
}

std::vector<ConditionHReport> check_condition_h(const TrigPolynomial& phi,
                                                const std::vector<Vec>& directions,
                                                double t_window, double grid_step) {
  require(t_window > 0.0, "condition H window T must be positive");
  require(grid_step > 0.0, "condition H grid step h must be positive");
  require(!directions.empty(), "condition H needs at least one direction");
  const auto d = static_cast<std::size_t>(phi.dimension());
  const SeminormBundle bounds = phi.seminorm_bounds(0.5);
  const double tol_deriv = 1e-9 * bounds.sup_grad;
  const double tol_nonconst = 1e-9 * bounds.sup_abs;
  const Vec origin(d, 0.0);
  const Jet2 at0 = phi.jet2(origin);

  std::vector<ConditionHReport> out;
  for (const auto& e : directions) {
    require(e.size() == d, "condition H direction has wrong dimension");
    require(std::abs(norm(e) - 1.0) <= 1e-12, "condition H directions must be unit vectors");
    ConditionHReport r;
    r.direction = e;
    r.directional_derivative = dot(at0.gradient, e);

    // Exact Lipschitz constant of t -> phi(te): sum |c_k| 2 pi |k.e|.
    double lip = 0.0;
    for (const auto& m : phi.modes()) {
      double ke = 0.0;
      for (std::size_t i = 0; i < d; ++i) ke += m.k[i] * e[i];
      lip += m.abs_pair * kTwoPi * std::abs(ke);
    }
    r.margin = lip * grid_step / 2.0;

    if (std::abs(r.directional_derivative) > tol_deriv) {
      r.verdict = ConditionHVerdict::holds_via_derivative;
      out.push_back(std::move(r));
      continue;
    }

    const auto steps = static_cast<long>(std::ceil(t_window / grid_step));
    Vec pt(d);
    for (long s = -steps; s <= steps; ++s) {
      const double t = std::clamp(s * grid_step, -t_window, t_window);
      for (std::size_t i = 0; i < d; ++i) pt[i] = t * e[i];
      const double diff = phi.eval(pt) - at0.value;
      r.max_above = std::max(r.max_above, diff);
      r.max_below = std::max(r.max_below, -diff);
    }
    const bool nonconstant = std::max(r.max_above, r.max_below) > tol_nonconst;
    const bool is_max = r.max_above <= tol_nonconst;
    const bool is_min = r.max_below <= tol_nonconst;
    if (!nonconstant) {
      r.verdict = ConditionHVerdict::fails;
    } else if (is_max || is_min) {
      r.verdict = ConditionHVerdict::holds_via_extremum;
    } else if (r.max_above > r.margin && r.max_below > r.margin) {
      r.verdict = ConditionHVerdict::fails;
    } else {
      r.verdict = ConditionHVerdict::inconclusive;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace zyg
