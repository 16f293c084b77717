#include "lgconn/atlas.hpp"

#include <cmath>
#include <memory>
#include <string>

namespace lgconn {

Matrix checked_inverse(const Matrix & block, const char * what)
{
  if (block.rows() != block.cols()) {
    throw SingularJacobian(std::string(what) + ": block is not square");
  }
  if (block.size() == 0) {
    return block;
  }
  if (!block.allFinite()) {
    throw SingularJacobian(std::string(what) + ": non-finite entries");
  }
  Eigen::JacobiSVD<Matrix> svd(block);
  const auto & s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || smax / smin > kMaxConditionNumber) {
    throw SingularJacobian(std::string(what) + ": condition number exceeds threshold");
  }
  Matrix inv = block.fullPivLu().inverse();
  const Matrix id = Matrix::Identity(block.rows(), block.cols());
  if (max_abs_entry(block * inv - id) > 1e-8) {
    throw SingularJacobian(std::string(what) + ": inverse fails J·J̄ = I");
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Base changes
// ---------------------------------------------------------------------------

Matrix BaseChange::jacobian(const Vector & x, double fd_step) const
{
  if (jac) {
    return (*jac)(x);
  }
  return fd_jacobian(forward, x, fd_step);
}

BaseChange BaseChange::inverted() const
{
  BaseChange out;
  out.forward = inverse;
  out.inverse = forward;
  if (jac) {
    auto self = std::make_shared<const BaseChange>(*this);
    out.jac = [self](const Vector & xp) -> Matrix {
      return checked_inverse(self->jacobian(self->inverse(xp)), "inverse base Jacobian");
    };
  }
  return out;
}

BaseChange identity_base_change()
{
  BaseChange c;
  c.forward = [](const Vector & x) -> Vector { return x; };
  c.inverse = [](const Vector & x) -> Vector { return x; };
  c.jac = [](const Vector & x) -> Matrix { return Matrix::Identity(x.size(), x.size()); };
  return c;
}

BaseChange polynomial_base_change()
{
  BaseChange c;
  c.forward = [](const Vector & x) -> Vector { return x + 0.1 * x.cwiseProduct(x); };
  c.inverse = [](const Vector & xp) -> Vector {
    Vector x(xp.size());
    for (Eigen::Index i = 0; i < xp.size(); ++i) {
      x[i] = (-1.0 + std::sqrt(1.0 + 0.4 * xp[i])) / 0.2;
    }
    return x;
  };
  c.jac = [](const Vector & x) -> Matrix { return (Vector::Ones(x.size()) + 0.2 * x).asDiagonal(); };
  return c;
}

BaseChange triangular_base_change()
{
  BaseChange c;
  c.forward = [](const Vector & x) -> Vector {
    Vector xp(x.size());
    xp[0] = 1.1 * x[0] + 0.1;
    for (Eigen::Index i = 1; i < x.size(); ++i) {
      xp[i] = x[i] + 0.3 * std::sin(x[i - 1]);
    }
    return xp;
  };
  c.inverse = [](const Vector & xp) -> Vector {
    Vector x(xp.size());
    x[0] = (xp[0] - 0.1) / 1.1;
    for (Eigen::Index i = 1; i < xp.size(); ++i) {
      x[i] = xp[i] - 0.3 * std::sin(x[i - 1]);
    }
    return x;
  };
  c.jac = [](const Vector & x) -> Matrix {
    Matrix j = Matrix::Identity(x.size(), x.size());
    j(0, 0) = 1.1;
    for (Eigen::Index i = 1; i < x.size(); ++i) {
      j(i, i - 1) = 0.3 * std::cos(x[i - 1]);
    }
    return j;
  };
  return c;
}

// ---------------------------------------------------------------------------
// Fiber automorphisms
// ---------------------------------------------------------------------------

Matrix FiberAutomorphismField::fiber_jacobian(const Vector & x, const Vector & g, double fd_step) const
{
  if (jac_fiber) {
    return (*jac_fiber)(x, g);
  }
  return fd_jacobian([&](const Vector & gg) { return apply(x, gg); }, g, fd_step);
}

Matrix FiberAutomorphismField::base_jacobian(const Vector & x, const Vector & g, double fd_step) const
{
  if (jac_base) {
    return (*jac_base)(x, g);
  }
  return fd_jacobian([&](const Vector & xx) { return apply(xx, g); }, x, fd_step);
}

FiberAutomorphismField identity_automorphism(GroupPtr group)
{
  FiberAutomorphismField f;
  const Eigen::Index l = group->dim();
  f.group = std::move(group);
  f.apply = [](const Vector &, const Vector & g) -> Vector { return g; };
  f.inverse = [](const Vector &, const Vector & g) -> Vector { return g; };
  f.jac_fiber = [l](const Vector &, const Vector &) -> Matrix { return Matrix::Identity(l, l); };
  f.jac_base = [l](const Vector & x, const Vector &) -> Matrix { return Matrix::Zero(l, x.size()); };
  return f;
}

FiberAutomorphismField linear_automorphism(GroupPtr additive, MatrixMap a, MatrixMap a_inverse)
{
  FiberAutomorphismField f;
  f.group = std::move(additive);
  f.apply = [a](const Vector & x, const Vector & v) -> Vector { return a(x) * v; };
  f.inverse = [a_inverse](const Vector & x, const Vector & v) -> Vector { return a_inverse(x) * v; };
  f.jac_fiber = [a](const Vector & x, const Vector &) -> Matrix { return a(x); };
  return f;
}

FiberAutomorphismField rotation_automorphism(GroupPtr additive2, std::function<double(const Vector &)> angle)
{
  auto rot = [angle](const Vector & x, double sign) -> Matrix {
    const double t = sign * angle(x);
    return Matrix{{std::cos(t), -std::sin(t)}, {std::sin(t), std::cos(t)}};
  };
  return linear_automorphism(
    std::move(additive2), [rot](const Vector & x) { return rot(x, 1.0); },
    [rot](const Vector & x) { return rot(x, -1.0); });
}

FiberAutomorphismField heisenberg_inner_automorphism(std::function<Vector(const Vector &)> pq)
{
  // k·g·k⁻¹ = (gx, gy, gz + p gy - q gx) for k = (p, q, r).
  FiberAutomorphismField f;
  f.group = heisenberg_group();
  f.apply = [pq](const Vector & x, const Vector & g) -> Vector {
    const Vector k = pq(x);
    return Vector{{g[0], g[1], g[2] + k[0] * g[1] - k[1] * g[0]}};
  };
  f.inverse = [pq](const Vector & x, const Vector & g) -> Vector {
    const Vector k = pq(x);
    return Vector{{g[0], g[1], g[2] - k[0] * g[1] + k[1] * g[0]}};
  };
  f.jac_fiber = [pq](const Vector & x, const Vector &) -> Matrix {
    const Vector k = pq(x);
    Matrix j = Matrix::Identity(3, 3);
    j(2, 0) = -k[1];
    j(2, 1) = k[0];
    return j;
  };
  return f;
}

FiberAutomorphismField heisenberg_scaling_automorphism(std::function<Vector(const Vector &)> rates)
{
  FiberAutomorphismField f;
  f.group = heisenberg_group();
  auto scale = [rates](const Vector & x, double sign) -> Vector {
    const Vector r = rates(x);
    return Vector{{std::exp(sign * r[0]), std::exp(sign * r[1]), std::exp(sign * (r[0] + r[1]))}};
  };
  f.apply = [scale](const Vector & x, const Vector & g) -> Vector { return scale(x, 1.0).cwiseProduct(g); };
  f.inverse = [scale](const Vector & x, const Vector & g) -> Vector { return scale(x, -1.0).cwiseProduct(g); };
  f.jac_fiber = [scale](const Vector & x, const Vector &) -> Matrix { return scale(x, 1.0).asDiagonal(); };
  return f;
}

FiberAutomorphismField aff1_inner_automorphism(std::function<Vector(const Vector &)> cd)
{
  // (c,d)·(a,b)·(c,d)⁻¹ = (a, c b + d (1 - a))
  FiberAutomorphismField f;
  f.group = aff1_group();
  f.apply = [cd](const Vector & x, const Vector & g) -> Vector {
    const Vector k = cd(x);
    return Vector{{g[0], k[0] * g[1] + k[1] * (1.0 - g[0])}};
  };
  f.inverse = [cd](const Vector & x, const Vector & g) -> Vector {
    const Vector k = cd(x);
    return Vector{{g[0], (g[1] - k[1] * (1.0 - g[0])) / k[0]}};
  };
  f.jac_fiber = [cd](const Vector & x, const Vector &) -> Matrix {
    const Vector k = cd(x);
    return Matrix{{1.0, 0.0}, {-k[1], k[0]}};
  };
  return f;
}

FiberAutomorphismField compose(const FiberAutomorphismField & first, const FiberAutomorphismField & second)
{
  FiberAutomorphismField f;
  f.group = first.group;
  f.apply = [first, second](const Vector & x, const Vector & g) -> Vector {
    return second.apply(x, first.apply(x, g));
  };
  f.inverse = [first, second](const Vector & x, const Vector & g) -> Vector {
    return first.inverse(x, second.inverse(x, g));
  };
  return f;
}

// ---------------------------------------------------------------------------
// σ changes
// ---------------------------------------------------------------------------

Matrix SigmaChange::sigma_jacobian(const Vector & x, const Vector & sigma, double fd_step) const
{
  if (jac_sigma) {
    return (*jac_sigma)(x, sigma);
  }
  if (sigma.size() == 0) {
    return Matrix(0, 0);
  }
  return fd_jacobian([&](const Vector & s) { return forward(x, s); }, sigma, fd_step);
}

Matrix SigmaChange::base_jacobian(const Vector & x, const Vector & sigma, double fd_step) const
{
  if (jac_base) {
    return (*jac_base)(x, sigma);
  }
  if (sigma.size() == 0) {
    return Matrix(0, x.size());
  }
  return fd_jacobian([&](const Vector & xx) { return forward(xx, sigma); }, x, fd_step);
}

SigmaChange identity_sigma_change()
{
  SigmaChange c;
  c.forward = [](const Vector &, const Vector & s) -> Vector { return s; };
  c.inverse = [](const Vector &, const Vector & s) -> Vector { return s; };
  c.jac_sigma = [](const Vector &, const Vector & s) -> Matrix { return Matrix::Identity(s.size(), s.size()); };
  c.jac_base = [](const Vector & x, const Vector & s) -> Matrix { return Matrix::Zero(s.size(), x.size()); };
  return c;
}

SigmaChange shear_sigma_change()
{
  SigmaChange c;
  c.forward = [](const Vector & x, const Vector & s) -> Vector {
    Vector out(s.size());
    if (s.size() == 0) {
      return out;
    }
    out[0] = s[0] + 0.2 * std::sin(x[0]);
    for (Eigen::Index i = 1; i < s.size(); ++i) {
      out[i] = 1.2 * s[i] + 0.1 * s[i - 1] * s[i - 1];
    }
    return out;
  };
  c.inverse = [](const Vector & x, const Vector & sp) -> Vector {
    Vector s(sp.size());
    if (sp.size() == 0) {
      return s;
    }
    s[0] = sp[0] - 0.2 * std::sin(x[0]);
    for (Eigen::Index i = 1; i < sp.size(); ++i) {
      s[i] = (sp[i] - 0.1 * s[i - 1] * s[i - 1]) / 1.2;
    }
    return s;
  };
  c.jac_sigma = [](const Vector &, const Vector & s) -> Matrix {
    Matrix j = Matrix::Zero(s.size(), s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      j(i, i) = i == 0 ? 1.0 : 1.2;
      if (i > 0) {
        j(i, i - 1) = 0.2 * s[i - 1];
      }
    }
    return j;
  };
  c.jac_base = [](const Vector & x, const Vector & s) -> Matrix {
    Matrix j = Matrix::Zero(s.size(), x.size());
    if (s.size() > 0) {
      j(0, 0) = 0.2 * std::cos(x[0]);
    }
    return j;
  };
  return c;
}

// ---------------------------------------------------------------------------
// GPB changes
// ---------------------------------------------------------------------------

Matrix GpbChange::phi_base_jacobian(const Vector & x, const Vector & s, double fd_step) const
{
  if (phi_jac_base) {
    return (*phi_jac_base)(x, s);
  }
  return fd_jacobian([&](const Vector & xx) { return phi(xx, s); }, x, fd_step);
}

Matrix GpbChange::phi_sigma_jacobian(const Vector & x, const Vector & s, double fd_step) const
{
  if (phi_jac_sigma) {
    return (*phi_jac_sigma)(x, s);
  }
  if (s.size() == 0) {
    return Matrix(group().dim(), 0);
  }
  return fd_jacobian([&](const Vector & ss) { return phi(x, ss); }, s, fd_step);
}

GpbChange GpbChange::inverted() const
{
  auto self = std::make_shared<const GpbChange>(*this);
  GpbChange out;
  out.base = base.inverted();

  out.sigma.forward = [self](const Vector & xp, const Vector & sp) -> Vector {
    const Vector x = self->base.inverse(xp);
    return self->sigma.inverse(x, sp);
  };
  out.sigma.inverse = [self](const Vector & xp, const Vector & s) -> Vector {
    const Vector x = self->base.inverse(xp);
    return self->sigma.forward(x, s);
  };

  out.fiber.group = fiber.group;
  out.fiber.apply = [self](const Vector & xp, const Vector & gp) -> Vector {
    return self->fiber.inverse(self->base.inverse(xp), gp);
  };
  out.fiber.inverse = [self](const Vector & xp, const Vector & g) -> Vector {
    return self->fiber.apply(self->base.inverse(xp), g);
  };

  // g = G⁻¹(x, φ⁻¹·g') = G⁻¹(x, φ⁻¹)·G⁻¹(x, g'), so φ'(x', σ') = G⁻¹(x, φ(x, σ)⁻¹).
  out.phi = [self](const Vector & xp, const Vector & sp) -> Vector {
    const Vector x = self->base.inverse(xp);
    const Vector s = self->sigma.inverse(x, sp);
    return self->fiber.inverse(x, self->group().invert(self->phi(x, s)));
  };
  return out;
}

GpbChange lgfb_as_gpb_change(BaseChange base, FiberAutomorphismField fiber)
{
  GpbChange c;
  c.base = std::move(base);
  c.sigma = identity_sigma_change();
  const Vector e = fiber.group->identity();
  const Eigen::Index l = fiber.group->dim();
  c.phi = [e](const Vector &, const Vector &) -> Vector { return e; };
  c.phi_jac_base = [l](const Vector & x, const Vector &) -> Matrix { return Matrix::Zero(l, x.size()); };
  c.phi_jac_sigma = [l](const Vector &, const Vector & s) -> Matrix { return Matrix::Zero(l, s.size()); };
  c.fiber = std::move(fiber);
  return c;
}

ValidationReport check_fiber_automorphism(const FiberAutomorphismField & field,
                                          std::span<const BundleSample> samples,
                                          const ToleranceConfig & tol)
{
  const LieGroupModel & grp = *field.group;
  const Vector & e = grp.identity();
  ConditionAccumulator unit("identity_preserved", tol);
  ConditionAccumulator hom("homomorphism", tol);
  for (const auto & s : samples) {
    const Vector ge = field.apply(s.x, e);
    unit.add((ge - e).lpNorm<Eigen::Infinity>(), e.lpNorm<Eigen::Infinity>(), s.x);
    try {
      const Vector lhs = field.apply(s.x, grp.multiply(s.g, s.h));
      const Vector rhs = grp.multiply(field.apply(s.x, s.g), field.apply(s.x, s.h));
      hom.add((lhs - rhs).lpNorm<Eigen::Infinity>(), rhs.lpNorm<Eigen::Infinity>(), concat({s.x, s.g, s.h}));
    } catch (const ChartExit &) {
      hom.skip();
    }
  }
  return ValidationReport{"fiber_automorphism", {unit.result(), hom.result()}};
}

ValidationReport check_base_derivative_at_identity(const FiberAutomorphismField & field,
                                                   std::span<const BundleSample> samples,
                                                   const ToleranceConfig & tol)
{
  const Vector & e = field.group->identity();
  ConditionAccumulator acc("base_derivative_at_identity", tol);
  for (const auto & s : samples) {
    acc.add(max_abs_entry(field.base_jacobian(s.x, e, tol.fd_step)), 0.0, s.x);
  }
  return ValidationReport{"base_derivative_at_identity", {acc.result()}};
}

GpbPoint apply_gpb_change(const GpbChange & change, const GpbPoint & p)
{
  GpbPoint out;
  out.x = change.base.forward(p.x);
  out.sigma = change.sigma.forward(p.x, p.sigma);
  out.g = change.group().multiply(change.phi(p.x, p.sigma), change.fiber.apply(p.x, p.g));
  return out;
}

PairPoint apply_pair_change(const GpbChange & change, const PairPoint & q)
{
  const GpbPoint head = apply_gpb_change(change, GpbPoint{q.x, q.sigma, q.g});
  return PairPoint{head.x, head.sigma, head.g, change.fiber.apply(q.x, q.h)};
}

JacobianBlocks jacobian_blocks(const GpbChange & change, const GpbPoint & p, double fd_step)
{
  JacobianBlocks b;
  b.base = change.base.jacobian(p.x, fd_step);
  b.base_inv = checked_inverse(b.base, "J^nu_mu");
  b.sigma = change.sigma.sigma_jacobian(p.x, p.sigma, fd_step);
  b.sigma_inv = checked_inverse(b.sigma, "J^Lambda_Xi");
  b.sigma_base = change.sigma.base_jacobian(p.x, p.sigma, fd_step);
  b.fiber = change.fiber.fiber_jacobian(p.x, p.g, fd_step);
  checked_inverse(b.fiber, "J^I_J");
  b.fiber_base = change.fiber.base_jacobian(p.x, p.g, fd_step);
  b.phi_base = change.phi_base_jacobian(p.x, p.sigma, fd_step);
  b.phi_sigma = change.phi_sigma_jacobian(p.x, p.sigma, fd_step);
  return b;
}

}  // namespace lgconn
