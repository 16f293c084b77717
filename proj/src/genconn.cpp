#include "lgconn/genconn.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace lgconn {

GenConnectionField::GenConnectionField(GroupPtr group, Eigen::Index base_dim, Eigen::Index sigma_dim,
                                       GenCoefficientMap a_mu, GenCoefficientMap a_theta)
    : group_(std::move(group)), m_(base_dim), k_(sigma_dim), a_mu_(std::move(a_mu)), a_theta_(std::move(a_theta))
{
  if (!group_ || m_ < 1 || k_ < 0 || !a_mu_) {
    throw ConfigError("connection", "needs a group, m >= 1, k >= 0 and an A_mu map");
  }
  if (!a_theta_) {
    if (k_ != 0) {
      throw ConfigError("connection", "A_theta is required when the sigma dimension is positive");
    }
    const Eigen::Index l = group_->dim();
    a_theta_ = [l](const Vector &, const Vector &, const Vector &) -> Matrix { return Matrix(l, 0); };
  }
}

namespace {

Matrix checked_shape(Matrix m, Eigen::Index rows, Eigen::Index cols, const char * what)
{
  if (m.rows() != rows || m.cols() != cols) {
    throw NumericalFailure(std::string(what) + ": coefficient matrix has shape " + std::to_string(m.rows()) + "x"
                           + std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x"
                           + std::to_string(cols));
  }
  if (!m.allFinite()) {
    throw NumericalFailure(std::string(what) + ": non-finite coefficient");
  }
  return m;
}

}  // namespace

Matrix GenConnectionField::a_mu(const Vector & x, const Vector & sigma, const Vector & g) const
{
  return checked_shape(a_mu_(x, sigma, g), group_->dim(), m_, "A_mu");
}

Matrix GenConnectionField::a_theta(const Vector & x, const Vector & sigma, const Vector & g) const
{
  return checked_shape(a_theta_(x, sigma, g), group_->dim(), k_, "A_theta");
}

ValidationReport check_gen_connection(const GenConnectionField & a, const LgfbConnectionField & eta,
                             std::span<const BundleSample> samples, const ToleranceConfig & tol)
{
  if (a.group_ptr() != eta.group_ptr() && a.group().name() != eta.group().name()) {
    throw ConfigError("eta", "A and eta must share the same group model");
  }
  const LieGroupModel & grp = a.group();
  ConditionAccumulator mu("mu_equivariance", tol);
  ConditionAccumulator theta("theta_equivariance", tol);
  for (const auto & s : samples) {
    try {
      const Vector gh = grp.multiply(s.g, s.h);
      const Matrix d1 = grp.d1_multiply(s.g, s.h, tol.fd_step);
      const Matrix d2 = grp.d2_multiply(s.g, s.h, tol.fd_step);
      const Vector pt = s.tuple();

      const Matrix lhs_mu = a.a_mu(s.x, s.sigma, gh);
      const Matrix rhs_mu = d1 * a.a_mu(s.x, s.sigma, s.g) + d2 * eta(s.x, s.h);
      mu.add(max_abs_entry(lhs_mu - rhs_mu), max_abs_entry(rhs_mu), pt);

      const Matrix lhs_th = a.a_theta(s.x, s.sigma, gh);
      const Matrix rhs_th = d1 * a.a_theta(s.x, s.sigma, s.g);
      theta.add(max_abs_entry(lhs_th - rhs_th), max_abs_entry(rhs_th), pt);
    } catch (const ChartExit &) {
      mu.skip();
      theta.skip();
    }
  }
  return ValidationReport{"gen_connection", {mu.result(), theta.result()}};
}

GenConnectionField build_from_boundary(const BoundaryData & boundary, const LgfbConnectionField & eta,
                                       Eigen::Index sigma_dim, std::span<const BundleSample> validation_samples,
                                       const ToleranceConfig & tol)
{
  const ValidationReport check = check_lgfb_connection(eta, validation_samples, tol);
  if (!check.passed()) {
    throw InvalidEta("build_from_boundary: eta is not an LGFB connection (max residual "
                     + std::to_string(check.max_residual()) + ")");
  }
  auto grp = eta.group_ptr();
  auto eta_ptr = std::make_shared<const LgfbConnectionField>(eta);
  const double step = tol.fd_step;
  auto a_mu = [grp, eta_ptr, b = boundary.a_mu_at_e, step](const Vector & x, const Vector & s, const Vector & g) {
    return Matrix(grp->d1_multiply(grp->identity(), g, step) * b(x, s) + (*eta_ptr)(x, g));
  };
  GenCoefficientMap a_theta;
  if (boundary.a_theta_at_e) {
    a_theta = [grp, b = boundary.a_theta_at_e, step](const Vector & x, const Vector & s, const Vector & g) {
      return Matrix(grp->d1_multiply(grp->identity(), g, step) * b(x, s));
    };
  }
  return GenConnectionField(grp, eta.base_dim(), sigma_dim, a_mu, a_theta);
}

BoundaryData extract_boundary(const GenConnectionField & a)
{
  auto field = std::make_shared<const GenConnectionField>(a);
  BoundaryData b;
  b.a_mu_at_e = [field](const Vector & x, const Vector & s) {
    return field->a_mu(x, s, field->group().identity());
  };
  b.a_theta_at_e = [field](const Vector & x, const Vector & s) {
    return field->a_theta(x, s, field->group().identity());
  };
  return b;
}

namespace {

Matrix implied_eta(const GenConnectionField & a, const Vector & x, const Vector & sigma, const Vector & g, double step)
{
  const LieGroupModel & grp = a.group();
  const Vector & e = grp.identity();
  return a.a_mu(x, sigma, g) - grp.d1_multiply(e, g, step) * a.a_mu(x, sigma, e);
}

}  // namespace

InferredEta infer_eta(const GenConnectionField & a, const std::optional<DomainBox> & sigma_box,
                      std::span<const BundleSample> samples, const ToleranceConfig & tol)
{
  const Eigen::Index k = a.sigma_dim();
  if ((k == 0) != !sigma_box.has_value() || (sigma_box && sigma_box->dim() != k)) {
    throw ConfigError("domain.sigma", "sigma box must match the sigma dimension of the connection");
  }
  const Vector sigma0 = sigma_box ? sigma_box->center() : Vector(0);
  const Vector offset = sigma_box ? Vector(0.25 * sigma_box->width()) : Vector(0);

  auto field = std::make_shared<const GenConnectionField>(a);
  const double step = tol.fd_step;
  LgfbConnectionField eta(a.group_ptr(), a.base_dim(), [field, sigma0, step](const Vector & x, const Vector & g) {
    return implied_eta(*field, x, sigma0, g, step);
  });

  ConditionAccumulator indep("sigma_independence", tol);
  for (const auto & s : samples) {
    const Matrix ref = implied_eta(a, s.x, sigma0, s.g, step);
    double worst = 0.0;
    if (k > 0) {
      for (double sign : {1.0, -1.0}) {
        const Matrix probe = implied_eta(a, s.x, sigma0 + sign * offset, s.g, step);
        worst = std::max(worst, max_abs_entry(probe - ref));
      }
    }
    indep.add(worst, max_abs_entry(ref), concat({s.x, s.g}));
  }
  return InferredEta{std::move(eta), ValidationReport{"infer_eta", {indep.result()}}, sigma0};
}

ValidationReport check_eta_forced_lgfb(const GenConnectionField & a, const std::optional<DomainBox> & sigma_box,
                                       std::span<const BundleSample> samples, const ToleranceConfig & tol)
{
  InferredEta inferred = infer_eta(a, sigma_box, samples, tol);
  ValidationReport r{"eta_forced_lgfb", inferred.report.conditions};
  for (auto cond : check_lgfb_connection(inferred.eta, samples, tol).conditions) {
    cond.name = "inferred." + cond.name;
    r.conditions.push_back(std::move(cond));
  }
  return r;
}

GenConnectionField transform_genconn(const GenConnectionField & a, const GpbChange & change, double fd_step)
{
  auto src = std::make_shared<const GenConnectionField>(a);
  auto chg = std::make_shared<const GpbChange>(change);

  struct Pulled
  {
    Matrix mu;
    Matrix theta;
  };

  // Both coefficient families come out of the same pull-back; compute them together.
  auto pull = [src, chg, fd_step](const Vector & xp, const Vector & sp, const Vector & gp) -> Pulled {
    const LieGroupModel & grp = chg->group();
    const Vector x = chg->base.inverse(xp);
    const Vector s = chg->sigma.inverse(x, sp);
    const Vector phi = chg->phi(x, s);
    const Vector g = chg->fiber.inverse(x, grp.multiply(grp.invert(phi), gp));
    const Vector gg = chg->fiber.apply(x, g);

    const JacobianBlocks b = jacobian_blocks(*chg, GpbPoint{x, s, g}, fd_step);
    const Matrix d1 = grp.d1_multiply(phi, gg, fd_step);
    const Matrix d2 = grp.d2_multiply(phi, gg, fd_step);

    // Γ(x, σ, g) = π(φ(x, σ), G(x, g)) by the chain rule.
    const Matrix dgamma_g = d2 * b.fiber;
    const Matrix dgamma_x = d1 * b.phi_base + d2 * b.fiber_base;
    const Matrix dgamma_s = d1 * b.phi_sigma;

    const Matrix bx = dgamma_g * src->a_mu(x, s, g) - dgamma_x;
    const Matrix bs = dgamma_g * src->a_theta(x, s, g) - dgamma_s;

    Pulled out;
    out.theta = bs * b.sigma_inv;
    out.mu = bx * b.base_inv - bs * b.sigma_inv * b.sigma_base * b.base_inv;
    return out;
  };

  return GenConnectionField(
    a.group_ptr(), a.base_dim(), a.sigma_dim(),
    [pull](const Vector & x, const Vector & s, const Vector & g) { return pull(x, s, g).mu; },
    [pull](const Vector & x, const Vector & s, const Vector & g) { return pull(x, s, g).theta; });
}

std::vector<BundleSample> push_pair_samples(const GpbChange & change, std::span<const BundleSample> samples)
{
  std::vector<BundleSample> out;
  out.reserve(samples.size());
  for (const auto & s : samples) {
    const PairPoint q = apply_pair_change(change, PairPoint{s.x, s.sigma, s.g, s.h});
    out.push_back(BundleSample{q.x, q.sigma, q.g, q.h});
  }
  return out;
}

ValidationReport check_gen_invariance(const GenConnectionField & a, const LgfbConnectionField & eta,
                                        const GpbChange & change, std::span<const BundleSample> samples,
                                        const ToleranceConfig & tol)
{
  const GenConnectionField a_target = transform_genconn(a, change, tol.fd_step);
  const LgfbConnectionField eta_target = transform_lgfb(eta, change.base, change.fiber, tol.fd_step);
  const auto target = push_pair_samples(change, samples);
  ValidationReport r{"gen_invariance", {}};
  for (auto cond : check_gen_connection(a_target, eta_target, target, tol).conditions) {
    cond.name = "target." + cond.name;
    r.conditions.push_back(std::move(cond));
  }
  return r;
}

GenConnectionField standard_as_generalized(GroupPtr group, Eigen::Index base_dim, StandardCoefficientMap a_std)
{
  return GenConnectionField(
    std::move(group), base_dim, 0,
    [a_std](const Vector & x, const Vector &, const Vector & g) { return a_std(x, g); }, nullptr);
}

ValidationReport check_standard_reduction(GroupPtr group, Eigen::Index base_dim, const StandardCoefficientMap & a_std,
                                          std::span<const BundleSample> samples, const ToleranceConfig & tol)
{
  const LieGroupModel & grp = *group;
  ConditionAccumulator direct("standard.right_equivariance", tol);
  std::vector<double> direct_residuals;
  direct_residuals.reserve(samples.size());
  std::vector<BundleSample> evaluated;
  evaluated.reserve(samples.size());

  for (const auto & s : samples) {
    try {
      const Vector gh = grp.multiply(s.g, s.h);
      const Matrix lhs = a_std(s.x, gh);
      const Matrix rhs = grp.d1_multiply(s.g, s.h, tol.fd_step) * a_std(s.x, s.g);
      const double r = max_abs_entry(lhs - rhs);
      direct.add(r, max_abs_entry(rhs), concat({s.x, s.g, s.h}));
      direct_residuals.push_back(r);
      evaluated.push_back(BundleSample{s.x, Vector(0), s.g, s.h});
    } catch (const ChartExit &) {
      direct.skip();
    }
  }

  // Same identity through the general machinery with the trivial η and no σ.
  const GenConnectionField as_gen = standard_as_generalized(group, base_dim, a_std);
  const LgfbConnectionField eta0 = trivial_connection(group, base_dim);
  ConditionAccumulator general("standard.general_with_trivial_eta", tol);
  ConditionAccumulator agree("standard.path_agreement", tol);
  for (std::size_t i = 0; i < evaluated.size(); ++i) {
    const auto one = std::span<const BundleSample>(&evaluated[i], 1);
    const ValidationReport r = check_gen_connection(as_gen, eta0, one, tol);
    const double res = r.condition("mu_equivariance").stats.max_abs;
    general.add(res, 0.0, evaluated[i].tuple());
    agree.add(std::abs(res - direct_residuals[i]), direct_residuals[i], evaluated[i].tuple());
  }
  return ValidationReport{"standard_reduction", {direct.result(), general.result(), agree.result()}};
}

GenConnectionField affine_connection(std::function<Matrix(const Vector &)> sigma_field, LinearCoefficients n,
                                     GroupPtr additive, Eigen::Index base_dim)
{
  const LgfbConnectionField linear = linear_connection(std::move(n), additive, base_dim);
  return GenConnectionField(
    std::move(additive), base_dim, 0,
    [sigma_field, linear](const Vector & x, const Vector &, const Vector & v) {
      return Matrix(sigma_field(x) + linear(x, v));
    },
    nullptr);
}

}  // namespace lgconn
