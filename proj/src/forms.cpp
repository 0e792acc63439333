#include "msol/forms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "msol/common.hpp"
#include "msol/quadrature.hpp"
#include "msol/rng.hpp"

namespace msol {

std::vector<int> mask_indices(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if (mask & (1u << i)) out.push_back(i + 1);
  return out;
}

int mask_size(std::uint32_t mask) { return std::popcount(mask); }

std::vector<std::uint32_t> masks_of_degree(int n, int degree) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 0; m < (1u << n); ++m)
    if (std::popcount(m) == degree) out.push_back(m);
  std::sort(out.begin(), out.end(), [](std::uint32_t a, std::uint32_t b) { return mask_indices(a) < mask_indices(b); });
  return out;
}

TorusForm::TorusForm(int n, int degree) : n_(n), degree_(degree) {
  if (n < 1 || n > 8) throw DomainError("torus dimension must be in 1..8");
  if (degree < 0 || degree > n) throw DomainError("form degree must be in 0..n");
}

TorusForm TorusForm::constant(int n, double c) {
  TorusForm w(n, 0);
  w.add_term(std::vector<int>(static_cast<std::size_t>(n), 0), {}, Phase::Cos, c);
  return w;
}

TorusForm TorusForm::dtheta(int n, int i) {
  if (i < 1 || i > n) throw DomainError("dtheta index out of range");
  TorusForm w(n, 1);
  w.add_term(std::vector<int>(static_cast<std::size_t>(n), 0), {i}, Phase::Cos, 1.0);
  return w;
}

void TorusForm::add_canonical(FormKey key, double c) {
  for (int kj : key.k)
    if (std::abs(kj) > kFrequencyCap) throw DomainError("frequency exceeds the cap of 64");
  const auto first = std::find_if(key.k.begin(), key.k.end(), [](int v) { return v != 0; });
  if (first == key.k.end()) {
    if (key.phase == Phase::Sin) return;
  } else if (*first < 0) {
    for (int& v : key.k) v = -v;
    if (key.phase == Phase::Sin) c = -c;
  }
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(std::move(key), c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

TorusForm& TorusForm::add_term(std::vector<int> k, std::vector<int> indices, Phase phase, double c) {
  if (static_cast<int>(k.size()) != n_) throw DomainError("frequency vector length must equal n");
  if (static_cast<int>(indices.size()) != degree_) throw DomainError("index set size must equal the degree");
  int sign = 1;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 1 || indices[i] > n_) throw DomainError("form index out of range");
    for (std::size_t j = i + 1; j < indices.size(); ++j) {
      if (indices[i] == indices[j]) return *this;
      if (indices[i] > indices[j]) sign = -sign;
    }
  }
  std::uint32_t mask = 0;
  for (int i : indices) mask |= 1u << (i - 1);
  add_canonical(FormKey{std::move(k), mask, phase}, sign * c);
  return *this;
}

TorusForm TorusForm::plus(const TorusForm& other) const {
  if (other.n_ != n_ || other.degree_ != degree_) throw DomainError("forms must share dimension and degree");
  TorusForm out = *this;
  for (const auto& [key, c] : other.terms_) out.add_canonical(key, c);
  return out;
}

TorusForm TorusForm::scaled(double c) const {
  TorusForm out(n_, degree_);
  for (const auto& [key, v] : terms_) out.add_canonical(key, v * c);
  return out;
}

double TorusForm::component(std::uint32_t mask, const double* theta) const {
  double s = 0.0;
  for (const auto& [key, c] : terms_) {
    if (key.mask != mask) continue;
    double arg = 0.0;
    for (int j = 0; j < n_; ++j) arg += key.k[static_cast<std::size_t>(j)] * theta[j];
    arg = kTwoPi * (arg - std::floor(arg));
    s += c * (key.phase == Phase::Cos ? std::cos(arg) : std::sin(arg));
  }
  return s;
}

FormEvaluator::FormEvaluator(const TorusForm& w) : n_(w.dim()), kmax_(static_cast<std::size_t>(w.dim()), 0) { add(w); }

FormEvaluator::FormEvaluator(const std::vector<TorusForm>& forms) {
  if (forms.empty()) throw DomainError("evaluator needs at least one form");
  n_ = forms.front().dim();
  kmax_.assign(static_cast<std::size_t>(n_), 0);
  for (const auto& w : forms) {
    if (w.dim() != n_) throw DomainError("evaluator forms live on different tori");
    add(w);
  }
}

void FormEvaluator::add(const TorusForm& w) {
  const auto masks = masks_of_degree(w.dim(), w.degree());
  for (const auto& [key, c] : w.terms()) {
    if (c == 0.0) continue;
    for (int j = 0; j < n_; ++j) {
      const int kj = key.k[static_cast<std::size_t>(j)];
      k_.push_back(kj);
      auto& km = kmax_[static_cast<std::size_t>(j)];
      km = std::max(km, std::abs(kj));
    }
    out_.push_back(size_ + static_cast<std::size_t>(std::find(masks.begin(), masks.end(), key.mask) - masks.begin()));
    sin_.push_back(key.phase == Phase::Sin);
    c_.push_back(c);
  }
  size_ += masks.size();
}

void FormEvaluator::evaluate(const double* theta, double* out) const {
  // row j holds exp(2 pi i m theta_j) for -cap <= m <= cap at index cap + m
  constexpr int kMid = kFrequencyCap;
  double re[8][2 * kFrequencyCap + 1], im[8][2 * kFrequencyCap + 1];
  for (int j = 0; j < n_; ++j) {
    const int km = kmax_[static_cast<std::size_t>(j)];
    double* cr = re[j] + kMid;
    double* ci = im[j] + kMid;
    cr[0] = 1.0;
    ci[0] = 0.0;
    if (km == 0) continue;
    // quadrant reduction: theta = q/4 + s with |s| <= 1/8, exact in binary
    const double q = std::nearbyint(4.0 * theta[j]);
    const double a = kTwoPi * (theta[j] - 0.25 * q);
    const double c = std::cos(a), sn = std::sin(a);
    switch (static_cast<int>(q - 4.0 * std::floor(q / 4.0))) {
      case 0: cr[1] = c; ci[1] = sn; break;
      case 1: cr[1] = -sn; ci[1] = c; break;
      case 2: cr[1] = -c; ci[1] = -sn; break;
      default: cr[1] = sn; ci[1] = -c; break;
    }
    // squaring for even powers keeps the rounding growth logarithmic
    for (int m = 2; m <= km; ++m) {
      const int p = m % 2 == 0 ? m / 2 : m - 1, r = m % 2 == 0 ? m / 2 : 1;
      cr[m] = cr[p] * cr[r] - ci[p] * ci[r];
      ci[m] = cr[p] * ci[r] + ci[p] * cr[r];
    }
    for (int m = 1; m <= km; ++m) {
      cr[-m] = cr[m];
      ci[-m] = -ci[m];
    }
  }
  for (std::size_t i = 0; i < size_; ++i) out[i] = 0.0;
  const std::size_t terms = c_.size();
  const int* k = k_.data();
  for (std::size_t t = 0; t < terms; ++t, k += n_) {
    double er = re[0][kMid + k[0]], ei = im[0][kMid + k[0]];
    for (int j = 1; j < n_; ++j) {
      const double zr = re[j][kMid + k[j]], zi = im[j][kMid + k[j]];
      const double tr = er * zr - ei * zi;
      ei = er * zi + ei * zr;
      er = tr;
    }
    out[out_[t]] += c_[t] * (sin_[t] ? ei : er);
  }
}

int TorusForm::max_frequency() const noexcept {
  int m = 0;
  for (const auto& [key, c] : terms_)
    for (int kj : key.k) m = std::max(m, std::abs(kj));
  return m;
}

double TorusForm::max_abs_coefficient() const noexcept {
  double m = 0.0;
  for (const auto& [key, c] : terms_) m = std::max(m, std::fabs(c));
  return m;
}

bool TorusForm::is_zero(double tol) const noexcept { return max_abs_coefficient() <= tol; }

TorusForm d(const TorusForm& w) {
  const int n = w.dim();
  if (w.degree() >= n) throw DomainError("d of a top-degree form");
  TorusForm out(n, w.degree() + 1);
  for (const auto& [key, c] : w.terms()) {
    for (int j = 0; j < n; ++j) {
      const int kj = key.k[static_cast<std::size_t>(j)];
      if (kj == 0 || (key.mask & (1u << j))) continue;
      const int below = std::popcount(key.mask & ((1u << j) - 1u));
      const double sign = (below % 2 == 0) ? 1.0 : -1.0;
      const double f = kTwoPi * kj;
      // d cos = -2 pi k_j sin dtheta_j, d sin = 2 pi k_j cos dtheta_j
      FormKey nk{key.k, key.mask | (1u << j), key.phase == Phase::Cos ? Phase::Sin : Phase::Cos};
      const double coeff = key.phase == Phase::Cos ? -(c * f) : c * f;
      std::vector<int> idx = mask_indices(nk.mask);
      out.add_term(nk.k, idx, nk.phase, sign * coeff);
    }
  }
  return out;
}

TorusForm wedge(const TorusForm& a, const TorusForm& b) {
  if (a.dim() != b.dim()) throw DomainError("wedge of forms on different tori");
  const int n = a.dim();
  if (a.degree() + b.degree() > n) throw DomainError("wedge degree exceeds the dimension");
  TorusForm out(n, a.degree() + b.degree());
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      if (ka.mask & kb.mask) continue;
      int inversions = 0;
      for (int i : mask_indices(ka.mask))
        for (int j : mask_indices(kb.mask))
          if (i > j) ++inversions;
      const double c = 0.5 * ca * cb * (inversions % 2 == 0 ? 1.0 : -1.0);
      std::vector<int> sum(static_cast<std::size_t>(n)), diff(static_cast<std::size_t>(n));
      for (std::size_t j = 0; j < sum.size(); ++j) {
        sum[j] = ka.k[j] + kb.k[j];
        diff[j] = ka.k[j] - kb.k[j];
      }
      const auto idx = mask_indices(ka.mask | kb.mask);
      const bool ca_cos = ka.phase == Phase::Cos, cb_cos = kb.phase == Phase::Cos;
      if (ca_cos && cb_cos) {
        out.add_term(diff, idx, Phase::Cos, c);
        out.add_term(sum, idx, Phase::Cos, c);
      } else if (!ca_cos && !cb_cos) {
        out.add_term(diff, idx, Phase::Cos, c);
        out.add_term(sum, idx, Phase::Cos, -c);
      } else if (!ca_cos && cb_cos) {
        out.add_term(sum, idx, Phase::Sin, c);
        out.add_term(diff, idx, Phase::Sin, c);
      } else {
        out.add_term(sum, idx, Phase::Sin, c);
        out.add_term(diff, idx, Phase::Sin, -c);
      }
    }
  }
  return out;
}

double integrate_torus(const TorusForm& w) {
  if (w.degree() != w.dim()) throw DomainError("integrate_torus needs a top-degree form");
  const FormKey key{std::vector<int>(static_cast<std::size_t>(w.dim()), 0), (1u << w.dim()) - 1u, Phase::Cos};
  const auto it = w.terms().find(key);
  return it == w.terms().end() ? 0.0 : it->second;
}

TorusForm random_torus_form(int n, int degree, int cap, std::size_t terms, std::uint64_t seed) {
  if (cap < 0 || cap > kFrequencyCap) throw DomainError("random form cap must be in 0..64");
  CounterRng rng(seed, 0x666f726dULL);
  const auto masks = masks_of_degree(n, degree);
  TorusForm w(n, degree);
  for (std::size_t t = 0; t < terms; ++t) {
    std::vector<int> k(static_cast<std::size_t>(n));
    for (int& v : k) v = static_cast<int>(rng.integer(-cap, cap));
    const auto mask = masks[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(masks.size()) - 1))];
    const Phase ph = rng.integer(0, 1) == 0 ? Phase::Cos : Phase::Sin;
    w.add_term(k, mask_indices(mask), ph, rng.uniform(-1.0, 1.0));
  }
  return w;
}

LeafwiseForm leafwise_d(std::function<double(const TransversalPoint&, double)> a_t, double t_frequency) {
  return LeafwiseForm{1, std::move(a_t), t_frequency};
}

double gluing_defect(const SuspensionSolenoid& sol, const LeafwiseForm& phi, std::size_t samples) {
  double worst = 0.0;
  for (const auto& x : sample_points(sol.space(), samples)) {
    const auto fx = apply_return_map(sol.space(), sol.map(), x, 1);
    worst = std::max(worst, std::fabs(phi.a(x, 1.0) - phi.a(fx, 0.0)));
  }
  return worst;
}

std::vector<WeightedPoint> transversal_quadrature(const TransversalSpace& space, const RawTransversalMeasure& m,
                                                  std::size_t bins) {
  std::vector<WeightedPoint> out;
  switch (space.kind()) {
    case TransversalKind::Finite:
      for (std::size_t i = 0; i < m.weights.size(); ++i)
        if (m.weights[i] != 0.0) out.push_back({TransversalPoint::finite(i), m.weights[i]});
      break;
    case TransversalKind::CantorPAdic:
      for (std::size_t i = 0; i < m.weights.size(); ++i)
        if (m.weights[i] != 0.0)
          out.push_back({TransversalPoint::cantor(cylinder_digits(space.base(), space.depth(), i)), m.weights[i]});
      break;
    case TransversalKind::Circle: {
      const double g = 0.5 / std::sqrt(3.0);
      const bool has_density = m.density.constant != 0.0 || m.density.max_frequency() > 0;
      if (has_density) {
        const double h = 1.0 / static_cast<double>(bins);
        for (std::size_t b = 0; b < bins; ++b)
          for (double off : {0.5 - g, 0.5 + g}) {
            const double x = (static_cast<double>(b) + off) * h;
            out.push_back({TransversalPoint::on_circle(x), 0.5 * h * m.density(x)});
          }
      }
      const std::size_t hb = m.histogram.size();
      for (std::size_t b = 0; b < hb; ++b) {
        if (m.histogram[b] == 0.0) continue;
        for (double off : {0.5 - g, 0.5 + g})
          out.push_back({TransversalPoint::on_circle((static_cast<double>(b) + off) / static_cast<double>(hb)),
                         0.5 * m.histogram[b]});
      }
      for (const auto& a : m.atoms) out.push_back({TransversalPoint::on_circle(a.x), a.mass});
      break;
    }
  }
  return out;
}

double integrate_leafwise(const SuspensionSolenoid& sol, const TransversalMeasureInv& m, const LeafwiseForm& phi) {
  if (phi.degree != 1) throw DomainError("only leafwise 1-forms pair with the fundamental class");
  if (!phi.a) throw DomainError("leafwise form has no coefficient");
  const double defect = gluing_defect(sol, phi);
  if (!(defect <= 1e-9)) throw DomainError("leafwise form is discontinuous across the gluing");
  const auto pts = transversal_quadrature(sol.space(), m.raw);
  const std::size_t panels = panels_for_frequency(phi.t_frequency);
  std::vector<double> part(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto& x = pts[i].x;
    part[i] = pts[i].w * composite_gauss([&](double t) { return phi.a(x, t); }, 0.0, 1.0, panels);
  });
  return compensated_sum(part);
}

}  // namespace msol
