#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lgconn/genconn.hpp"
#include "lgconn/lgfb.hpp"

namespace lgconn {

using CurveMap = std::function<Vector(double)>;

/// A base curve on [0, 1], optionally carrying σ(t) for generalized transport.
struct BaseCurve
{
  CurveMap eval;
  CurveMap velocity;
  CurveMap sigma_eval;      ///< empty when the curve has no σ-component
  CurveMap sigma_velocity;  ///< empty when the curve has no σ-component

  bool has_sigma() const { return static_cast<bool>(sigma_eval); }
};

/**
 * Polynomial curve from per-coordinate coefficient lists: coefficients[i][j]
 * multiplies t^j in coordinate i. Velocities are the exact derivatives.
 */
BaseCurve polynomial_curve(const std::vector<std::vector<double>> & coefficients,
                           const std::vector<std::vector<double>> & sigma_coefficients = {});

/// x(t) = start + t·direction.
BaseCurve straight_line(const Vector & start, const Vector & direction);

/// The same path traversed from t = 1 back to t = 0.
BaseCurve reversed(const BaseCurve & curve);

/// max ‖eval(t+δ) − eval(t) − δ·velocity(t)‖ over a grid of t; O(δ²) for a consistent curve.
double curve_consistency_residual(const BaseCurve & curve, double delta = 1e-4, int grid = 32);

struct TrajectoryPoint
{
  double t;
  Vector g;
};

struct TransportResult
{
  Vector final_fiber;
  std::vector<TrajectoryPoint> trajectory;
  int step_count = 0;
  /// |y_N − y_2N|·16/15, the Richardson estimate of the error in final_fiber.
  double est_error = 0.0;
};

/// Integration left the group chart. Carries the exit time and the trajectory up to it.
class TransportChartExit : public ChartExit
{
public:
  TransportChartExit(const std::string & what, double exit_time, std::vector<TrajectoryPoint> partial)
      : ChartExit(what), exit_time_(exit_time), partial_(std::move(partial))
  {}

  double exit_time() const noexcept { return exit_time_; }
  const std::vector<TrajectoryPoint> & partial_trajectory() const noexcept { return partial_; }

private:
  double exit_time_;
  std::vector<TrajectoryPoint> partial_;
};

/// RK4 on dg/dt = −η(c(t), g)·ċ(t) with `steps` fixed steps; `steps` ≥ 4.
TransportResult integrate_lgfb_transport(const LgfbConnectionField & eta, const BaseCurve & curve, const Vector & g0,
                                         int steps);

/// RK4 on dg/dt = −A_μ(x, σ, g)·ẋ − A_Θ(x, σ, g)·σ̇; curves without σ are allowed when k = 0.
TransportResult integrate_gen_transport(const GenConnectionField & a, const BaseCurve & curve, const Vector & g0,
                                        int steps);

/**
 * T(gh) against T(g)·T(h) for sampled (g, h), with T the transport along `curve`,
 * plus T(e) = e. Conditions "homomorphism" and "identity_transported".
 */
ValidationReport check_transport_homomorphism(const LgfbConnectionField & eta, const BaseCurve & curve,
                                              std::span<const BundleSample> samples, int steps,
                                              const ToleranceConfig & tol);

}  // namespace lgconn
