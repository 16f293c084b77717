#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lgconn/errors.hpp"

namespace lgconn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using VectorMap = std::function<Vector(const Vector &)>;

inline constexpr double kDefaultFdStep = 1e-5;

/// Axis-aligned sampling/validity region.
struct DomainBox
{
  Vector lower;
  Vector upper;

  DomainBox() = default;
  DomainBox(Vector lo, Vector hi);

  /// Same interval [lo, hi] on every one of `dim` coordinates.
  static DomainBox cube(Eigen::Index dim, double lo, double hi);

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Vector & p) const;
  Vector center() const { return 0.5 * (lower + upper); }
  Vector width() const { return upper - lower; }
};

struct ToleranceConfig
{
  double abs_tol = 1e-6;
  double rel_tol = 1e-9;
  double fd_step = kDefaultFdStep;

  /// Throws ConfigError unless all fields are positive, abs_tol <= 1 and fd_step <= 1e-2.
  void validate() const;

  /// max(abs_tol, rel_tol * |reference|)
  double threshold(double reference_magnitude) const;

  /// Tolerances for analytic-vs-analytic comparisons.
  static ToleranceConfig analytic() { return {1e-6, 1e-9, kDefaultFdStep}; }
  /// Tolerances when a finite-difference oracle takes part in the comparison.
  static ToleranceConfig finite_difference() { return {1e-4, 1e-9, kDefaultFdStep}; }
};

struct ResidualStats
{
  double max_abs = 0.0;
  double sum_abs = 0.0;
  std::size_t count = 0;
  Vector worst_point;

  double mean_abs() const { return count == 0 ? 0.0 : sum_abs / static_cast<double>(count); }
};

/// Folds one residual into `stats`. Throws NumericalFailure on NaN.
ResidualStats accumulate_residual(ResidualStats stats, double value, const Vector & point);

/// Associative merge of two partial folds. Ties on max_abs keep the left worst point.
ResidualStats merge(const ResidualStats & a, const ResidualStats & b);

/// Central-difference Jacobian of f at `point`.
Matrix fd_jacobian(const VectorMap & f, const Vector & point, double step = kDefaultFdStep);

/// splitmix64 generator; the whole sampling layer is built on it.
class SplitMix64
{
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in the open interval (0, 1).
  double uniform_open();

private:
  std::uint64_t state_;
};

/// `count` points uniformly distributed strictly inside `box`; deterministic in `seed`.
std::vector<Vector> sample_points(const DomainBox & box, std::size_t count, std::uint64_t seed);

/// Concatenation helper, used for worst-point tuples.
Vector concat(std::initializer_list<std::reference_wrapper<const Vector>> parts);

/// Max-abs entry of a matrix (0 for empty ones).
double max_abs_entry(const Matrix & m);

using MatrixField = std::function<Matrix(const Vector &)>;

/// Seeded smooth field z ↦ M(z) with M_ij = a_ij + b_ij sin(w_ij·z + p_ij);
/// a, b, w drawn from [-scale, scale], [-scale, scale], [-1, 1].
MatrixField random_smooth_field(Eigen::Index rows, Eigen::Index cols, Eigen::Index input_dim, std::uint64_t seed,
                                double scale = 1.0);

// ---------------------------------------------------------------------------
// Validation reporting
// ---------------------------------------------------------------------------

struct ConditionResult
{
  std::string name;
  ResidualStats stats;
  double abs_tol = 0.0;
  double rel_tol = 0.0;
  std::size_t skipped = 0;     ///< samples dropped because of ChartExit
  std::size_t violations = 0;  ///< samples whose residual exceeded the threshold

  bool passed() const { return stats.count > 0 && violations == 0; }
};

struct ValidationReport
{
  std::string name;
  std::vector<ConditionResult> conditions;

  bool passed() const;
  /// Largest max_abs over all conditions.
  double max_residual() const;
  /// Throws std::out_of_range when absent.
  const ConditionResult & condition(const std::string & condition_name) const;

  void append(const ValidationReport & other);
};

/// Builds one ConditionResult point by point.
class ConditionAccumulator
{
public:
  ConditionAccumulator(std::string name, const ToleranceConfig & tol);

  /// Records |difference| against max(abs_tol, rel_tol * reference_magnitude).
  void add(double difference, double reference_magnitude, const Vector & point);
  void skip() { ++result_.skipped; }
  void merge_from(const ConditionAccumulator & other);

  const ConditionResult & result() const { return result_; }

private:
  ToleranceConfig tol_;
  ConditionResult result_;
};

// ---------------------------------------------------------------------------
// Bundle sampling
// ---------------------------------------------------------------------------

/// One sampled configuration (x, sigma, g, h). `sigma` is empty for LGFB checks.
struct BundleSample
{
  Vector x;
  Vector sigma;
  Vector g;
  Vector h;

  Vector tuple() const { return concat({x, sigma, g, h}); }
};

struct SamplingPlan
{
  DomainBox base;
  std::optional<DomainBox> sigma;
  DomainBox fiber;
  std::size_t count = 1000;
  std::uint64_t seed = 1;
};

/// Independent streams per slot, derived from plan.seed.
std::vector<BundleSample> draw_samples(const SamplingPlan & plan);

}  // namespace lgconn
