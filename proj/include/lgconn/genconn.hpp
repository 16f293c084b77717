#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lgconn/atlas.hpp"
#include "lgconn/lgfb.hpp"

namespace lgconn {

/// Coefficients as functions of (x, σ, g).
using GenCoefficientMap = std::function<Matrix(const Vector & x, const Vector & sigma, const Vector & g)>;
/// Boundary coefficients as functions of (x, σ).
using BoundaryMap = std::function<Matrix(const Vector & x, const Vector & sigma)>;

/**
 * Generalized principal connection coefficients {A^I_μ(x, σ, g), A^I_Θ(x, σ, g)}
 * in generalized principal bundle coordinates with dim M = m, n − l = k.
 *
 * k = 0 is allowed: A_theta then returns l×0 matrices and the Θ-conditions are
 * vacuous, which is how standard principal bundles and vector bundles enter.
 */
class GenConnectionField
{
public:
  GenConnectionField(GroupPtr group, Eigen::Index base_dim, Eigen::Index sigma_dim, GenCoefficientMap a_mu,
                     GenCoefficientMap a_theta);

  const LieGroupModel & group() const { return *group_; }
  const GroupPtr & group_ptr() const { return group_; }
  Eigen::Index base_dim() const { return m_; }
  Eigen::Index sigma_dim() const { return k_; }
  /// n = k + l, the fiber dimension of the bundle the group acts on.
  Eigen::Index fiber_dim() const { return k_ + group_->dim(); }

  Matrix a_mu(const Vector & x, const Vector & sigma, const Vector & g) const;
  Matrix a_theta(const Vector & x, const Vector & sigma, const Vector & g) const;

private:
  GroupPtr group_;
  Eigen::Index m_;
  Eigen::Index k_;
  GenCoefficientMap a_mu_;
  GenCoefficientMap a_theta_;
};

/// A^I_μ(x, σ, e) and A^I_Θ(x, σ, e).
struct BoundaryData
{
  BoundaryMap a_mu_at_e;
  BoundaryMap a_theta_at_e;
};

/// A_μ(x,σ,gh) = ∂¹π(g,h) A_μ(x,σ,g) + ∂²π(g,h) η(x,h) and A_Θ(x,σ,gh) = ∂¹π(g,h) A_Θ(x,σ,g).
ValidationReport check_gen_connection(const GenConnectionField & a, const LgfbConnectionField & eta,
                             std::span<const BundleSample> samples, const ToleranceConfig & tol);

/**
 * A_μ(x, σ, g) = A_μ(x, σ, e)·∂¹π(e, g) + η(x, g), A_Θ(x, σ, g) = A_Θ(x, σ, e)·∂¹π(e, g).
 *
 * η is validated against both LGFB conditions on `validation_samples` first;
 * InvalidEta is thrown when it fails.
 */
GenConnectionField build_from_boundary(const BoundaryData & boundary, const LgfbConnectionField & eta,
                                       Eigen::Index sigma_dim, std::span<const BundleSample> validation_samples,
                                       const ToleranceConfig & tol);

/// Evaluates A at g = e.
BoundaryData extract_boundary(const GenConnectionField & a);

struct InferredEta
{
  LgfbConnectionField eta;
  ValidationReport report;  ///< σ-independence residual
  Vector reference_sigma;
};

/**
 * η(x, g) = A_μ(x, σ₀, g) − A_μ(x, σ₀, e)·∂¹π(e, g) at σ₀ = center of `sigma_box`,
 * with the right-hand side re-evaluated at σ₀ ± a quarter box width to witness
 * σ-independence. `sigma_box` must be empty exactly when k = 0.
 */
InferredEta infer_eta(const GenConnectionField & a, const std::optional<DomainBox> & sigma_box,
                      std::span<const BundleSample> samples, const ToleranceConfig & tol);

/// infer_eta followed by the LGFB characterization of the result.
ValidationReport check_eta_forced_lgfb(const GenConnectionField & a, const std::optional<DomainBox> & sigma_box,
                                       std::span<const BundleSample> samples, const ToleranceConfig & tol);

/// Coefficients in the chart reached by `change`, pulled back through its inverse.
GenConnectionField transform_genconn(const GenConnectionField & a, const GpbChange & change,
                                     double fd_step = kDefaultFdStep);

/// (x, σ, g, h) ↦ (x', σ', φ·G(x, g), G(x, h)) for each sample.
std::vector<BundleSample> push_pair_samples(const GpbChange & change, std::span<const BundleSample> samples);

/// Transforms A and η and re-validates both equivariance conditions in the target chart.
ValidationReport check_gen_invariance(const GenConnectionField & a, const LgfbConnectionField & eta,
                                        const GpbChange & change, std::span<const BundleSample> samples,
                                        const ToleranceConfig & tol);

/// A(x, g) without σ coordinates.
using StandardCoefficientMap = std::function<Matrix(const Vector & x, const Vector & g)>;

/// Wraps A(x, g) as a generalized connection with k = 0.
GenConnectionField standard_as_generalized(GroupPtr group, Eigen::Index base_dim, StandardCoefficientMap a_std);

/**
 * A(x, gh) = A(x, g)·∂¹π(g, h) checked directly and through check_gen_connection with the
 * trivial η; the report carries both residuals and their per-point agreement.
 */
ValidationReport check_standard_reduction(GroupPtr group, Eigen::Index base_dim, const StandardCoefficientMap & a_std,
                                          std::span<const BundleSample> samples, const ToleranceConfig & tol);

/// A(x, v) = σ(x) + N(x) v on additive ℝˡ, k = 0.
GenConnectionField affine_connection(std::function<Matrix(const Vector &)> sigma_field, LinearCoefficients n,
                                     GroupPtr additive, Eigen::Index base_dim);

}  // namespace lgconn
