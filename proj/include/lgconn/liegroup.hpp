#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "lgconn/numerics.hpp"

namespace lgconn {

using BinaryMap = std::function<Vector(const Vector &, const Vector &)>;
using PartialMap = std::function<Matrix(const Vector &, const Vector &)>;

/**
 * A Lie group in one global coordinate chart.
 *
 * Multiplication, inverse and (optionally) the partials of the multiplication
 * with respect to its first and second argument are supplied as closures.
 * Without analytic partials the model falls back to central differences.
 *
 * Two boxes are attached to every group: `chart_box` is where coordinates are
 * valid at all (leaving it raises ChartExit), `sample_box` is the region
 * validation suites draw group elements from. Products of a few sampled
 * elements stay inside the chart for all built-in groups.
 */
class LieGroupModel
{
public:
  struct Definition
  {
    std::string name;
    Vector identity;
    BinaryMap multiply;
    std::function<Vector(const Vector &)> invert;
    std::optional<PartialMap> d1_multiply;
    std::optional<PartialMap> d2_multiply;
    DomainBox chart_box;
    DomainBox sample_box;
  };

  explicit LieGroupModel(Definition def);

  const std::string & name() const { return def_.name; }
  Eigen::Index dim() const { return def_.identity.size(); }
  const Vector & identity() const { return def_.identity; }
  const DomainBox & chart_box() const { return def_.chart_box; }
  const DomainBox & sample_box() const { return def_.sample_box; }
  bool has_analytic_partials() const { return def_.d1_multiply && def_.d2_multiply; }

  /// g·h. Throws ChartExit when an input or the result leaves the chart.
  Vector multiply(const Vector & g, const Vector & h) const;
  Vector invert(const Vector & g) const;

  /// ∂π^I/∂g^A at (g, h): row I, column A.
  Matrix d1_multiply(const Vector & g, const Vector & h, double fd_step = kDefaultFdStep) const;
  /// ∂π^I/∂h^A at (g, h).
  Matrix d2_multiply(const Vector & g, const Vector & h, double fd_step = kDefaultFdStep) const;

  /// Derivative at e of δ ↦ g·δ·g⁻¹, assembled by the chain rule from the partials.
  Matrix adjoint(const Vector & g, double fd_step = kDefaultFdStep) const;

  /// Copy of this model that forgets the analytic partials (forces the FD path).
  LieGroupModel without_analytic_partials() const;

  /// Copy with a different multiplication; used to build negative controls.
  LieGroupModel with_multiply(std::string name, BinaryMap multiply) const;

private:
  void require_in_chart(const Vector & p, const char * what) const;

  Definition def_;
};

using GroupPtr = std::shared_ptr<const LieGroupModel>;

/// (ℝˡ, +)
GroupPtr additive_group(Eigen::Index l);
/// H₃ with (x₁,y₁,z₁)·(x₂,y₂,z₂) = (x₁+x₂, y₁+y₂, z₁+z₂+x₁y₂)
GroupPtr heisenberg_group();
/// Aff(1)⁺ = {(a,b): a>0}, (a₁,b₁)·(a₂,b₂) = (a₁a₂, a₁b₂+b₁)
GroupPtr aff1_group();
/// SO(2) in the angle chart (−π, π); no wrapping, products leaving the chart raise ChartExit.
GroupPtr so2_group();

/// Resolves "additive:<l>", "heisenberg", "aff1", "so2". Throws ConfigError.
GroupPtr group_by_name(std::string_view name);

struct GroupAxiomReport
{
  ConditionResult associativity;
  ConditionResult identity_law;
  ConditionResult inverse_law;
  ConditionResult assoc_derivative_identity;
  ConditionResult partials_vs_fd;
  ConditionResult unit_partials;            ///< d2(e,h) = I and d1(g,e) = I
  ConditionResult adjoint_representation;   ///< Ad(gh) = Ad(g)Ad(h)

  bool passed() const { return as_report().passed(); }
  ValidationReport as_report() const;
};

/// Residuals of the group laws and the derivative identities over sampled tuples.
/// ChartExit samples are counted as skipped, never thrown.
GroupAxiomReport check_group_axioms(const LieGroupModel & group,
                                    std::size_t sample_count,
                                    std::uint64_t seed,
                                    const ToleranceConfig & tol);

}  // namespace lgconn
