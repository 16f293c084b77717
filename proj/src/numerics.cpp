#include "lgconn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <stdexcept>

namespace lgconn {

DomainBox::DomainBox(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi))
{
  if (lower.size() != upper.size() || lower.size() < 1) {
    throw ConfigError("box", "lower/upper must have the same positive dimension");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw ConfigError("box", "lower[" + std::to_string(i) + "] must be < upper[" + std::to_string(i) + "]");
    }
  }
}

DomainBox DomainBox::cube(Eigen::Index dim, double lo, double hi)
{
  return DomainBox(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

bool DomainBox::contains(const Vector & p) const
{
  if (p.size() != lower.size()) {
    return false;
  }
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= lower[i] && p[i] <= upper[i])) {
      return false;
    }
  }
  return true;
}

void ToleranceConfig::validate() const
{
  if (!(abs_tol > 0.0) || abs_tol > 1.0) {
    throw ConfigError("tolerances.abs_tol", "must be in (0, 1]");
  }
  if (!(rel_tol > 0.0)) {
    throw ConfigError("tolerances.rel_tol", "must be positive");
  }
  if (!(fd_step > 0.0) || fd_step > 1e-2) {
    throw ConfigError("tolerances.fd_step", "must be in (0, 1e-2]");
  }
}

double ToleranceConfig::threshold(double reference_magnitude) const
{
  return std::max(abs_tol, rel_tol * std::abs(reference_magnitude));
}

ResidualStats accumulate_residual(ResidualStats stats, double value, const Vector & point)
{
  if (std::isnan(value)) {
    throw NumericalFailure("accumulate_residual: NaN residual");
  }
  const double v = std::abs(value);
  if (stats.count == 0 || v > stats.max_abs) {
    stats.max_abs = v;
    stats.worst_point = point;
  }
  stats.sum_abs += v;
  ++stats.count;
  return stats;
}

ResidualStats merge(const ResidualStats & a, const ResidualStats & b)
{
  if (a.count == 0) {
    return b;
  }
  if (b.count == 0) {
    return a;
  }
  ResidualStats out = a;
  if (b.max_abs > a.max_abs) {
    out.max_abs = b.max_abs;
    out.worst_point = b.worst_point;
  }
  out.sum_abs = a.sum_abs + b.sum_abs;
  out.count = a.count + b.count;
  return out;
}

Matrix fd_jacobian(const VectorMap & f, const Vector & point, double step)
{
  if (!(step > 0.0)) {
    throw NumericalFailure("fd_jacobian: step must be positive");
  }
  const Eigen::Index a = point.size();
  Matrix jac;
  Vector xp = point;
  Vector xm = point;
  for (Eigen::Index j = 0; j < a; ++j) {
    xp[j] = point[j] + step;
    xm[j] = point[j] - step;
    const Vector fp = f(xp);
    const Vector fm = f(xm);
    xp[j] = point[j];
    xm[j] = point[j];
    if (j == 0) {
      jac.resize(fp.size(), a);
    }
    if (fp.size() != jac.rows() || fm.size() != jac.rows()) {
      throw NumericalFailure("fd_jacobian: output dimension changed between evaluations", static_cast<std::size_t>(j));
    }
    if (!fp.allFinite() || !fm.allFinite()) {
      throw NumericalFailure(
        "fd_jacobian: non-finite function value when perturbing coordinate " + std::to_string(j),
        static_cast<std::size_t>(j));
    }
    jac.col(j) = (fp - fm) / (2.0 * step);
  }
  if (a == 0) {
    jac.resize(f(point).size(), 0);
  }
  return jac;
}

std::uint64_t SplitMix64::next()
{
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform_open()
{
  // 53 random bits, shifted by half an ulp so 0 and 1 are unreachable.
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<Vector> sample_points(const DomainBox & box, std::size_t count, std::uint64_t seed)
{
  SplitMix64 rng(seed);
  std::vector<Vector> out;
  out.reserve(count);
  const Vector w = box.width();
  for (std::size_t n = 0; n < count; ++n) {
    Vector p(box.dim());
    for (Eigen::Index i = 0; i < box.dim(); ++i) {
      p[i] = box.lower[i] + w[i] * rng.uniform_open();
      // guard against rounding onto the boundary for very wide boxes
      p[i] = std::clamp(p[i], std::nextafter(box.lower[i], box.upper[i]),
                        std::nextafter(box.upper[i], box.lower[i]));
    }
    out.push_back(std::move(p));
  }
  return out;
}

Vector concat(std::initializer_list<std::reference_wrapper<const Vector>> parts)
{
  Eigen::Index n = 0;
  for (const auto & p : parts) {
    n += p.get().size();
  }
  Vector out(n);
  Eigen::Index off = 0;
  for (const auto & p : parts) {
    out.segment(off, p.get().size()) = p.get();
    off += p.get().size();
  }
  return out;
}

double max_abs_entry(const Matrix & m)
{
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool ValidationReport::passed() const
{
  return !conditions.empty()
         && std::all_of(conditions.begin(), conditions.end(), [](const auto & c) { return c.passed(); });
}

double ValidationReport::max_residual() const
{
  double m = 0.0;
  for (const auto & c : conditions) {
    m = std::max(m, c.stats.max_abs);
  }
  return m;
}

const ConditionResult & ValidationReport::condition(const std::string & condition_name) const
{
  for (const auto & c : conditions) {
    if (c.name == condition_name) {
      return c;
    }
  }
  throw std::out_of_range("no condition named '" + condition_name + "' in report '" + name + "'");
}

void ValidationReport::append(const ValidationReport & other)
{
  conditions.insert(conditions.end(), other.conditions.begin(), other.conditions.end());
}

ConditionAccumulator::ConditionAccumulator(std::string name, const ToleranceConfig & tol) : tol_(tol)
{
  result_.name = std::move(name);
  result_.abs_tol = tol.abs_tol;
  result_.rel_tol = tol.rel_tol;
}

void ConditionAccumulator::add(double difference, double reference_magnitude, const Vector & point)
{
  if (!std::isfinite(difference)) {
    // an infinite residual is a violation, not a crash
    result_.stats = accumulate_residual(result_.stats, std::numeric_limits<double>::infinity(), point);
    ++result_.violations;
    return;
  }
  result_.stats = accumulate_residual(result_.stats, difference, point);
  if (std::abs(difference) > tol_.threshold(reference_magnitude)) {
    ++result_.violations;
  }
}

void ConditionAccumulator::merge_from(const ConditionAccumulator & other)
{
  result_.stats = merge(result_.stats, other.result_.stats);
  result_.skipped += other.result_.skipped;
  result_.violations += other.result_.violations;
}

std::vector<BundleSample> draw_samples(const SamplingPlan & plan)
{
  if (plan.count == 0) {
    throw ConfigError("sampling.count", "must be at least 1");
  }
  // Distinct odd offsets keep the per-slot streams decorrelated.
  const auto xs = sample_points(plan.base, plan.count, plan.seed);
  const auto gs = sample_points(plan.fiber, plan.count, plan.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  const auto hs = sample_points(plan.fiber, plan.count, plan.seed ^ 0x5C5C5C5C5C5C5C5DULL);
  std::vector<Vector> ss;
  if (plan.sigma) {
    ss = sample_points(*plan.sigma, plan.count, plan.seed ^ 0x3131313131313131ULL);
  }
  std::vector<BundleSample> out(plan.count);
  for (std::size_t i = 0; i < plan.count; ++i) {
    out[i].x = xs[i];
    out[i].sigma = plan.sigma ? ss[i] : Vector(0);
    out[i].g = gs[i];
    out[i].h = hs[i];
  }
  return out;
}

MatrixField random_smooth_field(Eigen::Index rows, Eigen::Index cols, Eigen::Index input_dim, std::uint64_t seed,
                                double scale)
{
  SplitMix64 rng(seed);
  auto draw = [&rng](double lo, double hi) { return lo + (hi - lo) * rng.uniform_open(); };
  const Eigen::Index n = rows * cols;
  Vector offset(n), amplitude(n), phase(n);
  Matrix freq(n, input_dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    offset[i] = draw(-scale, scale);
    amplitude[i] = draw(-scale, scale);
    phase[i] = draw(-std::numbers::pi, std::numbers::pi);
    for (Eigen::Index j = 0; j < input_dim; ++j) {
      freq(i, j) = draw(-1.0, 1.0);
    }
  }
  return [=](const Vector & z) -> Matrix {
    if (z.size() != input_dim) {
      throw NumericalFailure("random_smooth_field: input has dimension " + std::to_string(z.size()) + ", expected "
                             + std::to_string(input_dim));
    }
    const Vector arg = freq * z + phase;
    Matrix out(rows, cols);
    for (Eigen::Index i = 0; i < n; ++i) {
      out(i / cols, i % cols) = offset[i] + amplitude[i] * std::sin(arg[i]);
    }
    return out;
  };
}

}  // namespace lgconn
