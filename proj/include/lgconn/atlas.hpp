#pragma once

#include <functional>
#include <optional>
#include <span>

#include "lgconn/liegroup.hpp"
#include "lgconn/numerics.hpp"

namespace lgconn {

using MatrixMap = std::function<Matrix(const Vector &)>;

/// Condition-number threshold above which a Jacobian block is treated as singular.
inline constexpr double kMaxConditionNumber = 1e8;

/// Inverts a square block, throwing SingularJacobian beyond kMaxConditionNumber.
/// Empty (0×0) blocks invert to themselves.
Matrix checked_inverse(const Matrix & block, const char * what);

/// x' = x'(x) on the base.
struct BaseChange
{
  VectorMap forward;
  VectorMap inverse;
  std::optional<MatrixMap> jac;  ///< J^ν_μ = ∂x'^ν/∂x^μ

  Matrix jacobian(const Vector & x, double fd_step = kDefaultFdStep) const;
  BaseChange inverted() const;
};

BaseChange identity_base_change();
/// x'_i = x_i + 0.1 x_i², invertible for x_i > -5.
BaseChange polynomial_base_change();
/// x'_0 = 1.1 x_0 + 0.1, x'_i = x_i + 0.3 sin(x_{i-1}) for i >= 1.
BaseChange triangular_base_change();

/**
 * Fiberwise automorphism field G^I(x, g). `inverse(x, g')` returns the g with
 * G(x, g) = g' for the same base point x.
 */
struct FiberAutomorphismField
{
  GroupPtr group;
  BinaryMap apply;
  BinaryMap inverse;
  std::optional<PartialMap> jac_fiber;  ///< J^I_J = ∂G^I/∂g^J
  std::optional<PartialMap> jac_base;   ///< J^I_ν = ∂G^I/∂x^ν

  Matrix fiber_jacobian(const Vector & x, const Vector & g, double fd_step = kDefaultFdStep) const;
  Matrix base_jacobian(const Vector & x, const Vector & g, double fd_step = kDefaultFdStep) const;
};

FiberAutomorphismField identity_automorphism(GroupPtr group);
/// Additive ℝˡ: G(x, v) = A(x) v.
FiberAutomorphismField linear_automorphism(GroupPtr additive, MatrixMap a, MatrixMap a_inverse);
/// Additive ℝ²: G(x, v) = R(angle(x)) v.
FiberAutomorphismField rotation_automorphism(GroupPtr additive2, std::function<double(const Vector &)> angle);
/// Heisenberg: G(x, g) = k(x)·g·k(x)⁻¹ with k(x) = (p(x), q(x), *).
FiberAutomorphismField heisenberg_inner_automorphism(std::function<Vector(const Vector &)> pq);
/// Heisenberg: (gx, gy, gz) ↦ (e^α gx, e^β gy, e^{α+β} gz) with (α, β) = rates(x).
FiberAutomorphismField heisenberg_scaling_automorphism(std::function<Vector(const Vector &)> rates);
/// Aff(1)⁺: conjugation by (c(x), d(x)), c > 0.
FiberAutomorphismField aff1_inner_automorphism(std::function<Vector(const Vector &)> cd);
/// (x, g) ↦ second(x, first(x, g)).
FiberAutomorphismField compose(const FiberAutomorphismField & first, const FiberAutomorphismField & second);

/// Σ^Θ(x, σ) on the σ-fibers; inverse(x, σ') recovers σ for the same source x.
struct SigmaChange
{
  BinaryMap forward;
  BinaryMap inverse;
  std::optional<PartialMap> jac_sigma;  ///< J^Λ_Ξ = ∂Σ^Λ/∂σ^Ξ
  std::optional<PartialMap> jac_base;   ///< J^Λ_μ = ∂Σ^Λ/∂x^μ

  Matrix sigma_jacobian(const Vector & x, const Vector & sigma, double fd_step = kDefaultFdStep) const;
  Matrix base_jacobian(const Vector & x, const Vector & sigma, double fd_step = kDefaultFdStep) const;
};

SigmaChange identity_sigma_change();
/// Σ_0 = σ_0 + 0.2 sin(x_0), Σ_i = 1.2 σ_i + 0.1 σ_{i-1}² (i >= 1).
SigmaChange shear_sigma_change();

struct GpbPoint
{
  Vector x;
  Vector sigma;
  Vector g;
};

struct PairPoint
{
  Vector x;
  Vector sigma;
  Vector g;
  Vector h;
};

struct JacobianBlocks
{
  Matrix base;          ///< J^ν_μ
  Matrix base_inv;      ///< J̄^ν_μ
  Matrix sigma;         ///< J^Λ_Ξ
  Matrix sigma_inv;     ///< J̄^Λ_Ξ
  Matrix sigma_base;    ///< J^Λ_μ
  Matrix fiber;         ///< J^I_J
  Matrix fiber_base;    ///< J^I_ν
  Matrix phi_base;      ///< ∂_ν φ^A
  Matrix phi_sigma;     ///< ∂_Λ φ^A
};

/**
 * Change of generalized principal bundle coordinates
 * (x, σ, g) ↦ (x'(x), Σ(x, σ), φ(x, σ)·G(x, g)).
 */
struct GpbChange
{
  BaseChange base;
  SigmaChange sigma;
  BinaryMap phi;
  std::optional<PartialMap> phi_jac_base;
  std::optional<PartialMap> phi_jac_sigma;
  FiberAutomorphismField fiber;

  const LieGroupModel & group() const { return *fiber.group; }

  Matrix phi_base_jacobian(const Vector & x, const Vector & sigma, double fd_step = kDefaultFdStep) const;
  Matrix phi_sigma_jacobian(const Vector & x, const Vector & sigma, double fd_step = kDefaultFdStep) const;

  /// The change C⁻¹ with C⁻¹ ∘ C = id, built from the user-supplied inverses.
  GpbChange inverted() const;
};

/// Pure LGFB change (φ ≡ e, Σ = id) in GPB form.
GpbChange lgfb_as_gpb_change(BaseChange base, FiberAutomorphismField fiber);

/// Checks G(x, e) = e and G(x, π(g, h)) = π(G(x, g), G(x, h)) on samples.
ValidationReport check_fiber_automorphism(const FiberAutomorphismField & field,
                                          std::span<const BundleSample> samples,
                                          const ToleranceConfig & tol);

/// Checks J^I_ν(x, e) = 0 on samples.
ValidationReport check_base_derivative_at_identity(const FiberAutomorphismField & field,
                                                   std::span<const BundleSample> samples,
                                                   const ToleranceConfig & tol);

GpbPoint apply_gpb_change(const GpbChange & change, const GpbPoint & p);
/// (x, σ, g, h) ↦ (x', σ', φ·G(x, g), G(x, h)); the h slot carries no φ.
PairPoint apply_pair_change(const GpbChange & change, const PairPoint & q);

/// All blocks at p (analytic where supplied, FD otherwise). Throws SingularJacobian.
JacobianBlocks jacobian_blocks(const GpbChange & change, const GpbPoint & p, double fd_step = kDefaultFdStep);

}  // namespace lgconn
