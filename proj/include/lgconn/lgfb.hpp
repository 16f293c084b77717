#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lgconn/atlas.hpp"
#include "lgconn/liegroup.hpp"
#include "lgconn/numerics.hpp"

namespace lgconn {

/// η(x, g) as an l×m matrix: row I, column μ.
using CoefficientMap = std::function<Matrix(const Vector & x, const Vector & g)>;

/**
 * Connection coefficients η^I_μ(x, g) on a Lie group fiber bundle.
 *
 * Being an LGFB connection is a checked property, not an invariant: any
 * closure is accepted and the check_* functions report how far it is from
 * satisfying the characterization.
 */
class LgfbConnectionField
{
public:
  LgfbConnectionField(GroupPtr group, Eigen::Index base_dim, CoefficientMap eta,
                      std::optional<DomainBox> base_box = std::nullopt);

  const LieGroupModel & group() const { return *group_; }
  const GroupPtr & group_ptr() const { return group_; }
  Eigen::Index base_dim() const { return base_dim_; }
  const std::optional<DomainBox> & base_box() const { return base_box_; }

  /// Throws NumericalFailure on non-finite or mis-shaped output.
  Matrix operator()(const Vector & x, const Vector & g) const;

  const CoefficientMap & map() const { return eta_; }

private:
  GroupPtr group_;
  Eigen::Index base_dim_;
  CoefficientMap eta_;
  std::optional<DomainBox> base_box_;
};

/// a^μ ∂_μ + b^I ∂_I at a bundle point.
struct TangentVector
{
  Vector base_part;
  Vector fiber_part;
};

/// η(x, g) ≡ 0.
LgfbConnectionField trivial_connection(GroupPtr group, Eigen::Index base_dim);

/// Per-direction coefficient matrices N_μ(x) (l×l each, μ = 0..m-1).
using LinearCoefficients = std::function<std::vector<Matrix>(const Vector & x)>;

/// η^I_μ(x, v) = N^I_{Jμ}(x) v^J on additive ℝˡ.
LgfbConnectionField linear_connection(LinearCoefficients n, GroupPtr additive, Eigen::Index base_dim);

/// Multiplicative vector fields on H₃ parameterized per base direction:
/// params(x) is 6×m with rows (α, β, γ, δ, p, q) and
/// V(g) = (α gx + γ gy, δ gx + β gy, (α+β) gz + p gy + q gx + δ gx²/2 + γ gy²/2).
LgfbConnectionField heisenberg_derivation_connection(std::function<Matrix(const Vector &)> params,
                                                     Eigen::Index base_dim);

/// Inner derivations of Aff(1)⁺: params(x) is 2×m with rows (s, u),
/// V(a, b) = (0, s b + u (1 - a)).
LgfbConnectionField aff1_derivation_connection(std::function<Matrix(const Vector &)> params, Eigen::Index base_dim);

/// η(x, e) = 0.
ValidationReport check_identity_condition(const LgfbConnectionField & eta,
                                          std::span<const BundleSample> samples,
                                          const ToleranceConfig & tol);

/// η(x, gh) = ∂¹π(g,h) η(x,g) + ∂²π(g,h) η(x,h).
ValidationReport check_multiplicativity_condition(const LgfbConnectionField & eta,
                                                  std::span<const BundleSample> samples,
                                                  const ToleranceConfig & tol);

/// Both conditions of the local characterization.
ValidationReport check_lgfb_connection(const LgfbConnectionField & eta,
                                       std::span<const BundleSample> samples,
                                       const ToleranceConfig & tol);

/**
 * Horizontal lifts are compatible with fiberwise multiplication:
 * η_{gh}(∂_μ) = T M(η_g(∂_μ), η_h(∂_μ)).
 *
 * The tangent map of the multiplication is evaluated by a central difference
 * of M along the lifted directions, so this check never touches the analytic
 * partials used by check_multiplicativity_condition.
 */
ValidationReport check_lift_multiplication(const LgfbConnectionField & eta,
                                           std::span<const BundleSample> samples,
                                           const ToleranceConfig & tol);

TangentVector horizontal_lift(const LgfbConnectionField & eta, const Vector & x, const Vector & g, const Vector & a);
TangentVector vertical_projection(const LgfbConnectionField & eta, const Vector & x, const Vector & g,
                                  const TangentVector & v);

/// Connection coefficients in the chart reached by (base, fiber):
/// η'(x', g') = (J^I_J η(x, g) − J^I_ν) J̄^ν_μ, evaluated by pulling (x', g') back.
LgfbConnectionField transform_lgfb(const LgfbConnectionField & eta, const BaseChange & base,
                                   const FiberAutomorphismField & fiber, double fd_step = kDefaultFdStep);

/// Maps source samples into the target chart (x', G(x, g), G(x, h)).
std::vector<BundleSample> push_samples(const BaseChange & base, const FiberAutomorphismField & fiber,
                                       std::span<const BundleSample> samples);

/// Transforms η and re-validates both conditions in the target chart, plus J^I_ν(x, e) = 0.
ValidationReport check_lgfb_invariance(const LgfbConnectionField & eta, const BaseChange & base,
                                        const FiberAutomorphismField & fiber,
                                        std::span<const BundleSample> samples, const ToleranceConfig & tol);

/// Scalars used to witness homogeneity.
inline constexpr double kLinearityScalars[] = {-1.0, 0.5, 2.0, 1.0 / 3.0};

/// On additive ℝˡ: η(x, v+w) = η(x,v) + η(x,w) and η(x, s v) = s η(x, v).
ValidationReport check_linearity_forced(const LgfbConnectionField & eta,
                                        std::span<const BundleSample> samples,
                                        const ToleranceConfig & tol);

}  // namespace lgconn
