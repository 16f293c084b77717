#include "lgconn/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lgconn {

namespace {

Vector eval_polynomial(const std::vector<std::vector<double>> & coeffs, double t, bool derivative)
{
  Vector out(static_cast<Eigen::Index>(coeffs.size()));
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    double acc = 0.0;
    // Horner, on the derivative's coefficients when asked.
    const auto & c = coeffs[i];
    for (std::size_t j = c.size(); j-- > (derivative ? 1u : 0u);) {
      acc = acc * t + (derivative ? static_cast<double>(j) * c[j] : c[j]);
    }
    out[static_cast<Eigen::Index>(i)] = acc;
  }
  return out;
}

using Rhs = std::function<Vector(double, const Vector &)>;

struct Integrated
{
  Vector final_state;
  std::vector<TrajectoryPoint> trajectory;
};

Integrated rk4(const Rhs & f, const LieGroupModel & group, const Vector & g0, int steps)
{
  const double h = 1.0 / steps;
  Integrated out;
  out.trajectory.reserve(static_cast<std::size_t>(steps) + 1);
  out.trajectory.push_back({0.0, g0});
  Vector y = g0;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const Vector k1 = f(t, y);
    const Vector k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const Vector k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const Vector k4 = f(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double t_next = (i + 1 == steps) ? 1.0 : (i + 1) * h;
    if (!y.allFinite() || !group.chart_box().contains(y)) {
      throw TransportChartExit("transport left the chart of " + group.name() + " at t = " + std::to_string(t_next),
                               t_next, std::move(out.trajectory));
    }
    out.trajectory.push_back({t_next, y});
  }
  out.final_state = y;
  return out;
}

TransportResult integrate(const Rhs & f, const LieGroupModel & group, const Vector & g0, int steps)
{
  if (steps < 4) {
    throw ConfigError("steps", "transport needs at least 4 steps");
  }
  if (g0.size() != group.dim() || !group.chart_box().contains(g0)) {
    throw ChartExit("transport: initial fiber point is outside the chart of " + group.name());
  }
  Integrated coarse = rk4(f, group, g0, steps);
  const Integrated fine = rk4(f, group, g0, 2 * steps);
  TransportResult r;
  r.est_error = (coarse.final_state - fine.final_state).norm() * 16.0 / 15.0;
  r.final_fiber = std::move(coarse.final_state);
  r.trajectory = std::move(coarse.trajectory);
  r.step_count = steps;
  return r;
}

}  // namespace

BaseCurve polynomial_curve(const std::vector<std::vector<double>> & coefficients,
                           const std::vector<std::vector<double>> & sigma_coefficients)
{
  if (coefficients.empty()) {
    throw ConfigError("curve", "at least one base coordinate is required");
  }
  BaseCurve c;
  c.eval = [coefficients](double t) { return eval_polynomial(coefficients, t, false); };
  c.velocity = [coefficients](double t) { return eval_polynomial(coefficients, t, true); };
  if (!sigma_coefficients.empty()) {
    c.sigma_eval = [sigma_coefficients](double t) { return eval_polynomial(sigma_coefficients, t, false); };
    c.sigma_velocity = [sigma_coefficients](double t) { return eval_polynomial(sigma_coefficients, t, true); };
  }
  return c;
}

BaseCurve straight_line(const Vector & start, const Vector & direction)
{
  BaseCurve c;
  c.eval = [start, direction](double t) { return Vector(start + t * direction); };
  c.velocity = [direction](double) { return direction; };
  return c;
}

BaseCurve reversed(const BaseCurve & curve)
{
  BaseCurve r;
  r.eval = [c = curve.eval](double t) { return c(1.0 - t); };
  r.velocity = [v = curve.velocity](double t) { return Vector(-v(1.0 - t)); };
  if (curve.has_sigma()) {
    r.sigma_eval = [c = curve.sigma_eval](double t) { return c(1.0 - t); };
    r.sigma_velocity = [v = curve.sigma_velocity](double t) { return Vector(-v(1.0 - t)); };
  }
  return r;
}

double curve_consistency_residual(const BaseCurve & curve, double delta, int grid)
{
  double worst = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double t = std::min(1.0 - delta, static_cast<double>(i) / grid);
    const Vector r = curve.eval(t + delta) - curve.eval(t) - delta * curve.velocity(t);
    worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
  }
  return worst;
}

TransportResult integrate_lgfb_transport(const LgfbConnectionField & eta, const BaseCurve & curve, const Vector & g0,
                                         int steps)
{
  const Rhs f = [&](double t, const Vector & g) -> Vector { return -(eta(curve.eval(t), g) * curve.velocity(t)); };
  return integrate(f, eta.group(), g0, steps);
}

TransportResult integrate_gen_transport(const GenConnectionField & a, const BaseCurve & curve, const Vector & g0,
                                        int steps)
{
  if (a.sigma_dim() > 0 && !curve.has_sigma()) {
    throw ConfigError("curve.sigma", "generalized transport with k > 0 needs a sigma component on the curve");
  }
  const Rhs f = [&](double t, const Vector & g) -> Vector {
    const Vector x = curve.eval(t);
    if (a.sigma_dim() == 0) {
      const Vector none(0);
      return -(a.a_mu(x, none, g) * curve.velocity(t));
    }
    const Vector s = curve.sigma_eval(t);
    return -(a.a_mu(x, s, g) * curve.velocity(t)) - a.a_theta(x, s, g) * curve.sigma_velocity(t);
  };
  return integrate(f, a.group(), g0, steps);
}

ValidationReport check_transport_homomorphism(const LgfbConnectionField & eta, const BaseCurve & curve,
                                              std::span<const BundleSample> samples, int steps,
                                              const ToleranceConfig & tol)
{
  const LieGroupModel & grp = eta.group();
  ConditionAccumulator hom("homomorphism", tol);
  ConditionAccumulator unit("identity_transported", tol);

  const Vector t_e = integrate_lgfb_transport(eta, curve, grp.identity(), steps).final_fiber;
  unit.add((t_e - grp.identity()).lpNorm<Eigen::Infinity>(), grp.identity().lpNorm<Eigen::Infinity>(), t_e);

  for (const auto & s : samples) {
    try {
      const Vector gh = grp.multiply(s.g, s.h);
      const Vector t_gh = integrate_lgfb_transport(eta, curve, gh, steps).final_fiber;
      const Vector t_g = integrate_lgfb_transport(eta, curve, s.g, steps).final_fiber;
      const Vector t_h = integrate_lgfb_transport(eta, curve, s.h, steps).final_fiber;
      const Vector prod = grp.multiply(t_g, t_h);
      hom.add((t_gh - prod).lpNorm<Eigen::Infinity>(), prod.lpNorm<Eigen::Infinity>(), concat({s.g, s.h}));
    } catch (const ChartExit &) {
      hom.skip();
    }
  }
  return ValidationReport{"transport_homomorphism", {hom.result(), unit.result()}};
}

}  // namespace lgconn
