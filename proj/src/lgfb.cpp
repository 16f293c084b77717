#include "lgconn/lgfb.hpp"

#include <string>

namespace lgconn {

LgfbConnectionField::LgfbConnectionField(GroupPtr group, Eigen::Index base_dim, CoefficientMap eta,
                                         std::optional<DomainBox> base_box)
    : group_(std::move(group)), base_dim_(base_dim), eta_(std::move(eta)), base_box_(std::move(base_box))
{
  if (!group_ || base_dim_ < 1 || !eta_) {
    throw ConfigError("eta", "connection field needs a group, a positive base dimension and a coefficient map");
  }
  if (base_box_ && base_box_->dim() != base_dim_) {
    throw ConfigError("eta", "base box dimension does not match base_dim");
  }
}

Matrix LgfbConnectionField::operator()(const Vector & x, const Vector & g) const
{
  Matrix out = eta_(x, g);
  if (out.rows() != group_->dim() || out.cols() != base_dim_) {
    throw NumericalFailure("eta: coefficient matrix has shape " + std::to_string(out.rows()) + "x"
                           + std::to_string(out.cols()) + ", expected " + std::to_string(group_->dim()) + "x"
                           + std::to_string(base_dim_));
  }
  if (!out.allFinite()) {
    throw NumericalFailure("eta: non-finite coefficient");
  }
  return out;
}

LgfbConnectionField trivial_connection(GroupPtr group, Eigen::Index base_dim)
{
  const Eigen::Index l = group->dim();
  return LgfbConnectionField(std::move(group), base_dim, [l, base_dim](const Vector &, const Vector &) -> Matrix {
    return Matrix::Zero(l, base_dim);
  });
}

LgfbConnectionField linear_connection(LinearCoefficients n, GroupPtr additive, Eigen::Index base_dim)
{
  const Eigen::Index l = additive->dim();
  return LgfbConnectionField(std::move(additive), base_dim, [n, l, base_dim](const Vector & x, const Vector & v) {
    const std::vector<Matrix> coeffs = n(x);
    if (static_cast<Eigen::Index>(coeffs.size()) != base_dim) {
      throw NumericalFailure("linear_connection: expected one coefficient matrix per base direction");
    }
    Matrix out(l, base_dim);
    for (Eigen::Index mu = 0; mu < base_dim; ++mu) {
      out.col(mu) = coeffs[static_cast<std::size_t>(mu)] * v;
    }
    return out;
  });
}

LgfbConnectionField heisenberg_derivation_connection(std::function<Matrix(const Vector &)> params,
                                                     Eigen::Index base_dim)
{
  return LgfbConnectionField(heisenberg_group(), base_dim, [params, base_dim](const Vector & x, const Vector & g) {
    const Matrix p = params(x);
    Matrix out(3, base_dim);
    for (Eigen::Index mu = 0; mu < base_dim; ++mu) {
      const double alpha = p(0, mu), beta = p(1, mu), gamma = p(2, mu), delta = p(3, mu);
      const double pz = p(4, mu), qz = p(5, mu);
      out(0, mu) = alpha * g[0] + gamma * g[1];
      out(1, mu) = delta * g[0] + beta * g[1];
      out(2, mu) = (alpha + beta) * g[2] + pz * g[1] + qz * g[0] + 0.5 * delta * g[0] * g[0]
                   + 0.5 * gamma * g[1] * g[1];
    }
    return out;
  });
}

LgfbConnectionField aff1_derivation_connection(std::function<Matrix(const Vector &)> params, Eigen::Index base_dim)
{
  return LgfbConnectionField(aff1_group(), base_dim, [params, base_dim](const Vector & x, const Vector & g) {
    const Matrix p = params(x);
    Matrix out(2, base_dim);
    for (Eigen::Index mu = 0; mu < base_dim; ++mu) {
      out(0, mu) = 0.0;
      out(1, mu) = p(0, mu) * g[1] + p(1, mu) * (1.0 - g[0]);
    }
    return out;
  });
}

ValidationReport check_identity_condition(const LgfbConnectionField & eta,
                                          std::span<const BundleSample> samples,
                                          const ToleranceConfig & tol)
{
  const Vector & e = eta.group().identity();
  ConditionAccumulator acc("identity_condition", tol);
  for (const auto & s : samples) {
    acc.add(max_abs_entry(eta(s.x, e)), 0.0, s.x);
  }
  return ValidationReport{"identity_condition", {acc.result()}};
}

ValidationReport check_multiplicativity_condition(const LgfbConnectionField & eta,
                                                  std::span<const BundleSample> samples,
                                                  const ToleranceConfig & tol)
{
  const LieGroupModel & grp = eta.group();
  ConditionAccumulator acc("multiplicativity_condition", tol);
  for (const auto & s : samples) {
    try {
      const Vector gh = grp.multiply(s.g, s.h);
      const Matrix lhs = eta(s.x, gh);
      const Matrix rhs = grp.d1_multiply(s.g, s.h, tol.fd_step) * eta(s.x, s.g)
                         + grp.d2_multiply(s.g, s.h, tol.fd_step) * eta(s.x, s.h);
      acc.add(max_abs_entry(lhs - rhs), max_abs_entry(rhs), concat({s.x, s.g, s.h}));
    } catch (const ChartExit &) {
      acc.skip();
    }
  }
  return ValidationReport{"multiplicativity_condition", {acc.result()}};
}

ValidationReport check_lgfb_connection(const LgfbConnectionField & eta,
                                       std::span<const BundleSample> samples,
                                       const ToleranceConfig & tol)
{
  ValidationReport r{"lgfb_connection", {}};
  r.append(check_identity_condition(eta, samples, tol));
  r.append(check_multiplicativity_condition(eta, samples, tol));
  return r;
}

ValidationReport check_lift_multiplication(const LgfbConnectionField & eta,
                                           std::span<const BundleSample> samples,
                                           const ToleranceConfig & tol)
{
  const LieGroupModel & grp = eta.group();
  const Eigen::Index m = eta.base_dim();
  const double step = tol.fd_step;
  ConditionAccumulator acc("lift_multiplication", tol);
  for (const auto & s : samples) {
    try {
      const Vector gh = grp.multiply(s.g, s.h);
      const Matrix eta_g = eta(s.x, s.g);
      const Matrix eta_h = eta(s.x, s.h);
      double worst = 0.0;
      double ref = 0.0;
      for (Eigen::Index mu = 0; mu < m; ++mu) {
        const Vector a = Vector::Unit(m, mu);
        const TangentVector lift_gh = horizontal_lift(eta, s.x, gh, a);
        // T M(η_g(a), η_h(a)): directional derivative of (g, h) ↦ π(g, h).
        const Vector bg = -eta_g.col(mu);
        const Vector bh = -eta_h.col(mu);
        const Vector plus = grp.multiply(s.g + step * bg, s.h + step * bh);
        const Vector minus = grp.multiply(s.g - step * bg, s.h - step * bh);
        const Vector pushed = (plus - minus) / (2.0 * step);
        worst = std::max(worst, (lift_gh.fiber_part - pushed).lpNorm<Eigen::Infinity>());
        ref = std::max(ref, pushed.lpNorm<Eigen::Infinity>());
      }
      acc.add(worst, ref, concat({s.x, s.g, s.h}));
    } catch (const ChartExit &) {
      acc.skip();
    }
  }
  return ValidationReport{"lift_multiplication", {acc.result()}};
}

TangentVector horizontal_lift(const LgfbConnectionField & eta, const Vector & x, const Vector & g, const Vector & a)
{
  return TangentVector{a, -(eta(x, g) * a)};
}

TangentVector vertical_projection(const LgfbConnectionField & eta, const Vector & x, const Vector & g,
                                  const TangentVector & v)
{
  return TangentVector{Vector::Zero(v.base_part.size()), v.fiber_part + eta(x, g) * v.base_part};
}

LgfbConnectionField transform_lgfb(const LgfbConnectionField & eta, const BaseChange & base,
                                   const FiberAutomorphismField & fiber, double fd_step)
{
  auto src = std::make_shared<const LgfbConnectionField>(eta);
  auto map = [src, base, fiber, fd_step](const Vector & xp, const Vector & gp) -> Matrix {
    const Vector x = base.inverse(xp);
    const Vector g = fiber.inverse(x, gp);
    const Matrix jbar = checked_inverse(base.jacobian(x, fd_step), "J^nu_mu");
    const Matrix jg = fiber.fiber_jacobian(x, g, fd_step);
    const Matrix jx = fiber.base_jacobian(x, g, fd_step);
    return (jg * (*src)(x, g) - jx) * jbar;
  };
  return LgfbConnectionField(eta.group_ptr(), eta.base_dim(), map);
}

std::vector<BundleSample> push_samples(const BaseChange & base, const FiberAutomorphismField & fiber,
                                       std::span<const BundleSample> samples)
{
  std::vector<BundleSample> out;
  out.reserve(samples.size());
  for (const auto & s : samples) {
    out.push_back(BundleSample{base.forward(s.x), s.sigma, fiber.apply(s.x, s.g), fiber.apply(s.x, s.h)});
  }
  return out;
}

ValidationReport check_lgfb_invariance(const LgfbConnectionField & eta, const BaseChange & base,
                                        const FiberAutomorphismField & fiber,
                                        std::span<const BundleSample> samples, const ToleranceConfig & tol)
{
  const LgfbConnectionField transformed = transform_lgfb(eta, base, fiber, tol.fd_step);
  const auto target = push_samples(base, fiber, samples);
  ValidationReport r{"lgfb_invariance", {}};
  for (auto cond : check_lgfb_connection(transformed, target, tol).conditions) {
    cond.name = "target." + cond.name;
    r.conditions.push_back(std::move(cond));
  }
  r.append(check_base_derivative_at_identity(fiber, samples, tol));
  return r;
}

ValidationReport check_linearity_forced(const LgfbConnectionField & eta,
                                        std::span<const BundleSample> samples,
                                        const ToleranceConfig & tol)
{
  ConditionAccumulator add("additivity", tol);
  ConditionAccumulator hom("homogeneity", tol);
  for (const auto & s : samples) {
    const Matrix ev = eta(s.x, s.g);
    const Matrix ew = eta(s.x, s.h);
    const Matrix sum = eta(s.x, s.g + s.h);
    add.add(max_abs_entry(sum - ev - ew), max_abs_entry(ev) + max_abs_entry(ew), concat({s.x, s.g, s.h}));
    double worst = 0.0;
    double ref = 0.0;
    for (double c : kLinearityScalars) {
      const Matrix scaled = eta(s.x, c * s.g);
      worst = std::max(worst, max_abs_entry(scaled - c * ev));
      ref = std::max(ref, std::abs(c) * max_abs_entry(ev));
    }
    hom.add(worst, ref, concat({s.x, s.g}));
  }
  return ValidationReport{"linearity_forced", {add.result(), hom.result()}};
}

}  // namespace lgconn
