#include "msol/transversal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msol/common.hpp"

namespace msol {

namespace {
constexpr double kTwo64 = 18446744073709551616.0;
constexpr std::size_t kMaxCylinders = std::size_t{1} << 24;
}  // namespace

std::string to_string(TransversalKind kind) {
  switch (kind) {
    case TransversalKind::Finite: return "finite";
    case TransversalKind::Circle: return "circle";
    case TransversalKind::CantorPAdic: return "cantor";
  }
  return "?";
}

std::uint64_t turns_from_coordinate(double x) noexcept {
  const double y = wrap01(x);
  const double scaled = std::round(y * kTwo64);
  if (scaled >= kTwo64) return 0;
  return static_cast<std::uint64_t>(scaled);
}

double coordinate_from_turns(std::uint64_t turns) noexcept {
  const double x = static_cast<double>(turns) / kTwo64;
  return x >= 1.0 ? 0.0 : x;
}

TransversalPoint TransversalPoint::on_circle(double x) { return from_turns(turns_from_coordinate(x)); }

double TransversalPoint::circle_coordinate() const noexcept { return coordinate_from_turns(turns); }

TransversalSpace TransversalSpace::finite(std::vector<double> points) {
  if (points.empty()) throw DomainError("finite transversal needs at least one point");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i] >= 0.0 && points[i] < 1.0)) throw DomainError("finite transversal points must lie in [0,1)");
    if (i > 0 && points[i] == points[i - 1]) throw DomainError("duplicate finite transversal point");
    if (i > 0 && points[i] < points[i - 1]) throw DomainError("finite transversal points must be sorted ascending");
  }
  TransversalSpace s;
  s.kind_ = TransversalKind::Finite;
  s.points_ = std::move(points);
  return s;
}

TransversalSpace TransversalSpace::circle() { return TransversalSpace{}; }

TransversalSpace TransversalSpace::cantor(int p, int depth) {
  if (p < 2) throw DomainError("p-adic base must be >= 2");
  if (depth < 1) throw DomainError("p-adic depth must be >= 1");
  std::size_t n = 1;
  for (int i = 0; i < depth; ++i) {
    n *= static_cast<std::size_t>(p);
    if (n > kMaxCylinders) throw DomainError("p^depth exceeds the supported cylinder table size (2^24)");
  }
  TransversalSpace s;
  s.kind_ = TransversalKind::CantorPAdic;
  s.base_ = p;
  s.depth_ = depth;
  return s;
}

std::size_t TransversalSpace::cell_count() const noexcept {
  switch (kind_) {
    case TransversalKind::Finite: return points_.size();
    case TransversalKind::CantorPAdic: return int_pow(static_cast<std::size_t>(base_), depth_);
    case TransversalKind::Circle: return 0;
  }
  return 0;
}

void TransversalSpace::check_point(const TransversalPoint& pt) const {
  switch (kind_) {
    case TransversalKind::Finite:
      if (pt.index >= points_.size()) throw DomainError("finite point index out of range");
      break;
    case TransversalKind::Circle: break;
    case TransversalKind::CantorPAdic:
      if (pt.digits.size() != static_cast<std::size_t>(depth_))
        throw DomainError("digit string length must equal the space depth");
      for (int a : pt.digits)
        if (a < 0 || a >= base_) throw DomainError("p-adic digit out of range");
      break;
  }
}

std::size_t int_pow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::size_t cylinder_index(int p, const std::vector<int>& digits) {
  std::size_t idx = 0;
  for (std::size_t i = digits.size(); i-- > 0;) idx = idx * static_cast<std::size_t>(p) + static_cast<std::size_t>(digits[i]);
  return idx;
}

std::vector<int> cylinder_digits(int p, int depth, std::size_t index) {
  std::vector<int> d(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) {
    d[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(p));
    index /= static_cast<std::size_t>(p);
  }
  return d;
}

double embed_point(const TransversalSpace& space, const TransversalPoint& pt) {
  space.check_point(pt);
  switch (space.kind()) {
    case TransversalKind::Finite: return space.points()[pt.index];
    case TransversalKind::Circle: return pt.circle_coordinate();
    case TransversalKind::CantorPAdic: return embed_cylinder(space.base(), pt.digits).lo;
  }
  return 0.0;
}

Interval embed_cylinder(int p, const std::vector<int>& prefix) {
  const double ratio = 1.0 / static_cast<double>(2 * p - 1);
  double scale = ratio;
  double x = 0.0;
  for (int a : prefix) {
    x += 2.0 * static_cast<double>(a) * scale;
    scale *= ratio;
  }
  // The tail sum of later digits is bounded by (2p-1)^-k.
  return {x, x + scale / ratio};
}

std::string to_string(TransversalClass c) {
  switch (c) {
    case TransversalClass::FiniteSet: return "FiniteSet";
    case TransversalClass::UnionOfCircles: return "UnionOfCircles";
    case TransversalClass::CantorSet: return "CantorSet";
  }
  return "?";
}

TransversalClassification classify_transversal(const TransversalSpace& space) {
  switch (space.kind()) {
    case TransversalKind::Circle:
      return {TransversalClass::UnionOfCircles, "foliation of a (k+1)-manifold"};
    case TransversalKind::Finite:
      return {TransversalClass::FiniteSet, "connected manifold of dimension k"};
    case TransversalKind::CantorPAdic:
      return {TransversalClass::CantorSet, "solenoid with Cantor transversal"};
  }
  return {TransversalClass::CantorSet, ""};
}

std::vector<TransversalCell> uniform_cells(const TransversalSpace& space, int level) {
  if (level < 0) throw DomainError("cell level must be >= 0");
  std::vector<TransversalCell> cells;
  switch (space.kind()) {
    case TransversalKind::Circle: {
      const std::size_t n = std::size_t{1} << level;
      cells.reserve(n);
      for (std::size_t i = 0; i < n; ++i)
        cells.push_back(TransversalCell::interval(static_cast<double>(i) / static_cast<double>(n),
                                                  static_cast<double>(i + 1) / static_cast<double>(n)));
      break;
    }
    case TransversalKind::CantorPAdic: {
      const int lvl = std::min(level, space.depth());
      const std::size_t n = int_pow(static_cast<std::size_t>(space.base()), lvl);
      cells.reserve(n);
      for (std::size_t i = 0; i < n; ++i) cells.push_back(TransversalCell::cylinder(cylinder_digits(space.base(), lvl, i)));
      break;
    }
    case TransversalKind::Finite: {
      const std::size_t n = std::size_t{1} << level;
      std::vector<std::vector<std::size_t>> groups(n);
      for (std::size_t i = 0; i < space.points().size(); ++i) {
        auto g = static_cast<std::size_t>(space.points()[i] * static_cast<double>(n));
        groups[std::min(g, n - 1)].push_back(i);
      }
      for (auto& g : groups)
        if (!g.empty()) cells.push_back(TransversalCell::points(std::move(g)));
      break;
    }
  }
  return cells;
}

RawTransversalMeasure RawTransversalMeasure::finite_weights(std::vector<double> w) {
  RawTransversalMeasure m;
  m.kind = TransversalKind::Finite;
  m.weights = std::move(w);
  return m;
}

RawTransversalMeasure RawTransversalMeasure::circle(TrigPoly density, std::vector<CircleAtom> atoms) {
  RawTransversalMeasure m;
  m.kind = TransversalKind::Circle;
  m.density = std::move(density);
  m.atoms = std::move(atoms);
  return m;
}

RawTransversalMeasure RawTransversalMeasure::circle_histogram(std::vector<double> bin_masses) {
  RawTransversalMeasure m;
  m.kind = TransversalKind::Circle;
  m.histogram = std::move(bin_masses);
  return m;
}

RawTransversalMeasure RawTransversalMeasure::cylinder_weights(std::vector<double> w) {
  RawTransversalMeasure m;
  m.kind = TransversalKind::CantorPAdic;
  m.weights = std::move(w);
  return m;
}

RawTransversalMeasure RawTransversalMeasure::haar(const TransversalSpace& space) {
  if (space.kind() != TransversalKind::CantorPAdic) throw DomainError("Haar measure needs a p-adic transversal");
  const std::size_t n = space.cell_count();
  return cylinder_weights(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

RawTransversalMeasure RawTransversalMeasure::scaled(double c) const {
  RawTransversalMeasure m = *this;
  for (double& w : m.weights) w *= c;
  for (double& h : m.histogram) h *= c;
  m.density = m.density.scaled(c);
  for (auto& a : m.atoms) a.mass *= c;
  return m;
}

RawTransversalMeasure RawTransversalMeasure::plus(const RawTransversalMeasure& other) const {
  if (kind != other.kind) throw DomainError("cannot add measures on different transversal kinds");
  RawTransversalMeasure m = *this;
  if (!other.weights.empty()) {
    if (m.weights.empty()) m.weights.assign(other.weights.size(), 0.0);
    if (m.weights.size() != other.weights.size()) throw DomainError("weight tables differ in size");
    for (std::size_t i = 0; i < m.weights.size(); ++i) m.weights[i] += other.weights[i];
  }
  if (!other.histogram.empty()) {
    if (m.histogram.empty()) m.histogram.assign(other.histogram.size(), 0.0);
    if (m.histogram.size() != other.histogram.size()) throw DomainError("histograms differ in bin count");
    for (std::size_t i = 0; i < m.histogram.size(); ++i) m.histogram[i] += other.histogram[i];
  }
  m.density = m.density.plus(other.density);
  m.atoms.insert(m.atoms.end(), other.atoms.begin(), other.atoms.end());
  return m;
}

void validate_measure(const TransversalSpace& space, const RawTransversalMeasure& m, std::size_t max_frequency) {
  if (m.kind != space.kind()) throw DomainError("measure kind does not match transversal kind");
  for (double w : m.weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("measure weights must be finite and >= 0");
  switch (space.kind()) {
    case TransversalKind::Finite:
      if (m.weights.size() != space.points().size()) throw DomainError("need one weight per finite point");
      break;
    case TransversalKind::CantorPAdic:
      if (m.weights.size() != space.cell_count()) throw DomainError("need p^depth cylinder weights");
      break;
    case TransversalKind::Circle: {
      if (m.density.max_frequency() > max_frequency) throw DomainError("density exceeds the frequency cap");
      if (trig_grid_min(m.density) < -1e-12) throw DomainError("density is negative on the validation grid");
      for (double h : m.histogram)
        if (!(h >= 0.0) || !std::isfinite(h)) throw DomainError("histogram masses must be finite and >= 0");
      for (const auto& a : m.atoms) {
        if (!(a.x >= 0.0 && a.x < 1.0)) throw DomainError("atom position must lie in [0,1)");
        if (!(a.mass >= 0.0) || !std::isfinite(a.mass)) throw DomainError("atom mass must be finite and >= 0");
      }
      break;
    }
  }
}

double total_mass(const RawTransversalMeasure& m) {
  CompensatedSum s;
  for (double w : m.weights) s.add(w);
  for (double h : m.histogram) s.add(h);
  if (m.kind == TransversalKind::Circle) s.add(m.density.mean());
  for (const auto& a : m.atoms) s.add(a.mass);
  return s.value();
}

namespace {

// Mass of a piecewise-constant density with the given bin masses on [0, x], 0 <= x <= 1.
double histogram_cdf(const std::vector<double>& bins, double x) {
  const auto n = static_cast<double>(bins.size());
  const double pos = x * n;
  auto full = static_cast<std::size_t>(std::floor(pos));
  full = std::min(full, bins.size());
  CompensatedSum s;
  for (std::size_t i = 0; i < full; ++i) s.add(bins[i]);
  if (full < bins.size()) s.add(bins[full] * (pos - static_cast<double>(full)));
  return s.value();
}

double histogram_interval(const std::vector<double>& bins, double lo, double hi) {
  if (bins.empty()) return 0.0;
  const double total = compensated_sum(bins);
  const double shift = std::floor(lo);
  lo -= shift;
  hi -= shift;
  if (hi <= 1.0) return histogram_cdf(bins, hi) - histogram_cdf(bins, lo);
  return (total - histogram_cdf(bins, lo)) + histogram_cdf(bins, hi - 1.0);
}

}  // namespace

double circle_interval_mass(const RawTransversalMeasure& m, double lo, double hi) {
  if (hi < lo) throw DomainError("interval with hi < lo");
  if (hi - lo >= 1.0) return total_mass(m);
  CompensatedSum s;
  s.add(m.density.integrate(lo, hi));
  s.add(histogram_interval(m.histogram, lo, hi));
  const double len = hi - lo;
  for (const auto& a : m.atoms)
    if (wrap01(a.x - lo) < len) s.add(a.mass);
  return s.value();
}

double cell_mass(const TransversalSpace& space, const RawTransversalMeasure& m, const TransversalCell& cell) {
  switch (space.kind()) {
    case TransversalKind::Circle: return circle_interval_mass(m, cell.lo, cell.hi);
    case TransversalKind::Finite: {
      CompensatedSum s;
      for (std::size_t i : cell.point_indices) s.add(m.weights.at(i));
      return s.value();
    }
    case TransversalKind::CantorPAdic: {
      const int k = static_cast<int>(cell.prefix.size());
      if (k > space.depth()) throw DomainError("cylinder prefix longer than the space depth");
      const std::size_t stride = int_pow(static_cast<std::size_t>(space.base()), k);
      const std::size_t start = cylinder_index(space.base(), cell.prefix);
      CompensatedSum s;
      for (std::size_t i = start; i < m.weights.size(); i += stride) s.add(m.weights[i]);
      return s.value();
    }
  }
  return 0.0;
}

std::vector<double> coarsen_cylinder_weights(const TransversalSpace& space, const RawTransversalMeasure& m, int level) {
  if (space.kind() != TransversalKind::CantorPAdic) throw DomainError("coarsening needs a p-adic transversal");
  if (level < 0 || level > space.depth()) throw DomainError("coarsening level out of range");
  const std::size_t n = int_pow(static_cast<std::size_t>(space.base()), level);
  std::vector<double> out(n, 0.0);
  // Children of a level-k cylinder r are the indices r + n*j.
  for (std::size_t i = 0; i < m.weights.size(); ++i) out[i % n] += m.weights[i];
  return out;
}

}  // namespace msol
