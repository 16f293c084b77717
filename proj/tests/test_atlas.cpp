#include <catch_amalgamated.hpp>

#include <cmath>

#include "lgconn/atlas.hpp"
#include "oracles.hpp"

using namespace lgconn;

namespace {

std::vector<BundleSample> samples_for(const GroupPtr & grp, Eigen::Index m, Eigen::Index k, std::size_t n,
                                      std::uint64_t seed)
{
  SamplingPlan plan{DomainBox::cube(m, -1, 1), std::nullopt, grp->sample_box(), n, seed};
  if (k > 0) {
    plan.sigma = DomainBox::cube(k, -1, 1);
  }
  return draw_samples(plan);
}

Vector pq_field(const Vector & x)
{
  Vector v(2);
  v << 0.4 * std::sin(x[0]) - 0.1, 0.3 * x[1] * x[0];
  return v;
}

Vector rates_field(const Vector & x)
{
  Vector v(2);
  v << 0.2 * x[0], -0.1 * std::cos(x[1]);
  return v;
}

Vector cd_field(const Vector & x)
{
  Vector v(2);
  v << std::exp(0.3 * x[1]), 0.2 * std::sin(x[0]) + 0.1;
  return v;
}

std::vector<FiberAutomorphismField> valid_automorphisms()
{
  const auto add2 = additive_group(2);
  MatrixMap a = [](const Vector & x) {
    Matrix m(2, 2);
    m << 1.0 + 0.2 * std::sin(x[0]), 0.3 * x[1], -0.1, 1.2;
    return m;
  };
  MatrixMap a_inv = [a](const Vector & x) { return Matrix(a(x).inverse()); };
  return {
    identity_automorphism(heisenberg_group()),
    heisenberg_inner_automorphism(pq_field),
    heisenberg_scaling_automorphism(rates_field),
    compose(heisenberg_inner_automorphism(pq_field), heisenberg_scaling_automorphism(rates_field)),
    aff1_inner_automorphism(cd_field),
    linear_automorphism(add2, a, a_inv),
    rotation_automorphism(add2, [](const Vector & x) { return 0.7 * x[0] - 0.2 * x[1]; }),
  };
}

}  // namespace

TEST_CASE("checked_inverse refuses singular and ill-conditioned blocks")
{
  Matrix singular(2, 2);
  singular << 1, 2, 2, 4;
  CHECK_THROWS_AS(checked_inverse(singular, "test"), SingularJacobian);
  Matrix ill(2, 2);
  ill << 1, 0, 0, 1e-10;
  CHECK_THROWS_AS(checked_inverse(ill, "test"), SingularJacobian);
  CHECK(checked_inverse(Matrix(0, 0), "empty").size() == 0);
  Matrix ok(2, 2);
  ok << 2, 1, 0, 3;
  CHECK((checked_inverse(ok, "ok") * ok - Matrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("base changes invert and carry correct Jacobians")
{
  oracle::Rng rng(2);
  for (const auto & c : {polynomial_base_change(), triangular_base_change(), identity_base_change()}) {
    const BaseChange inv = c.inverted();
    for (int i = 0; i < 50; ++i) {
      const Vector x = rng.vec(3, -1, 1);
      REQUIRE((c.inverse(c.forward(x)) - x).norm() < 1e-13);
      REQUIRE((c.jacobian(x) - oracle::jacobian5(c.forward, x)).cwiseAbs().maxCoeff() < 1e-9);
      // The inverted change's Jacobian is the inverse matrix at the image point.
      REQUIRE((inv.jacobian(c.forward(x)) * c.jacobian(x) - Matrix::Identity(3, 3)).norm() < 1e-12);
    }
  }
}

TEST_CASE("built-in fiber automorphisms are automorphisms with vanishing base derivative at e")
{
  for (const auto & f : valid_automorphisms()) {
    INFO(f.group->name());
    const auto samples = samples_for(f.group, 2, 0, 400, 5);
    const auto r = check_fiber_automorphism(f, samples, ToleranceConfig{1e-12, 1e-12, 1e-5});
    CHECK(r.passed());
    const auto d = check_base_derivative_at_identity(f, samples, ToleranceConfig{1e-8, 1e-12, 1e-5});
    CHECK(d.passed());
  }
}

TEST_CASE("fiber automorphism inverses and analytic Jacobians")
{
  for (const auto & f : valid_automorphisms()) {
    INFO(f.group->name());
    for (const auto & s : samples_for(f.group, 2, 0, 60, 6)) {
      const Vector gp = f.apply(s.x, s.g);
      REQUIRE((f.inverse(s.x, gp) - s.g).norm() < 1e-12);
      const Matrix jg = oracle::jacobian5([&](const Vector & g) { return f.apply(s.x, g); }, s.g);
      const Matrix jx = oracle::jacobian5([&](const Vector & x) { return f.apply(x, s.g); }, s.x);
      REQUIRE((f.fiber_jacobian(s.x, s.g) - jg).cwiseAbs().maxCoeff() < 1e-8);
      REQUIRE((f.base_jacobian(s.x, s.g) - jx).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("translations and non-homomorphic maps are rejected")
{
  const auto h3 = heisenberg_group();
  FiberAutomorphismField shift = identity_automorphism(h3);
  shift.apply = [](const Vector & x, const Vector & g) {
    Vector out = g;
    out[2] += 0.1 * x[0];
    return out;
  };
  shift.jac_fiber.reset();
  shift.jac_base.reset();
  const auto samples = samples_for(h3, 2, 0, 200, 7);
  CHECK_FALSE(check_fiber_automorphism(shift, samples, ToleranceConfig{}).passed());
  CHECK_FALSE(check_base_derivative_at_identity(shift, samples, ToleranceConfig{}).passed());

  FiberAutomorphismField square = identity_automorphism(h3);
  square.apply = [](const Vector &, const Vector & g) {
    Vector out = g;
    out[0] += 0.2 * g[0] * g[0];
    return out;
  };
  square.jac_fiber.reset();
  square.jac_base.reset();
  const auto r = check_fiber_automorphism(square, samples, ToleranceConfig{});
  CHECK(r.condition("identity_preserved").passed());
  CHECK_FALSE(r.condition("homomorphism").passed());
}

TEST_CASE("sigma changes invert and carry correct Jacobians")
{
  const SigmaChange c = shear_sigma_change();
  oracle::Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const Vector x = rng.vec(2, -1, 1);
    const Vector s = rng.vec(3, -1, 1);
    REQUIRE((c.inverse(x, c.forward(x, s)) - s).norm() < 1e-13);
    const Matrix js = oracle::jacobian5([&](const Vector & v) { return c.forward(x, v); }, s);
    const Matrix jx = oracle::jacobian5([&](const Vector & v) { return c.forward(v, s); }, x);
    REQUIRE((c.sigma_jacobian(x, s) - js).cwiseAbs().maxCoeff() < 1e-9);
    REQUIRE((c.base_jacobian(x, s) - jx).cwiseAbs().maxCoeff() < 1e-9);
  }
}

namespace {

GpbChange nontrivial_change()
{
  GpbChange c = lgfb_as_gpb_change(polynomial_base_change(), heisenberg_inner_automorphism(pq_field));
  c.sigma = shear_sigma_change();
  c.phi = [](const Vector & x, const Vector & s) {
    Vector out(3);
    out << 0.2 * std::sin(x[0] + s[0]), 0.1 * x[1] * s[1], 0.15 * std::cos(s[0]);
    return out;
  };
  c.phi_jac_base.reset();
  c.phi_jac_sigma.reset();
  return c;
}

}  // namespace

TEST_CASE("GPB change composed with its inverse is the identity")
{
  const GpbChange c = nontrivial_change();
  const GpbChange inv = c.inverted();
  for (const auto & s : samples_for(heisenberg_group(), 2, 2, 200, 8)) {
    const GpbPoint p{s.x, s.sigma, s.g};
    const GpbPoint q = apply_gpb_change(inv, apply_gpb_change(c, p));
    REQUIRE((q.x - p.x).norm() < 1e-12);
    REQUIRE((q.sigma - p.sigma).norm() < 1e-12);
    REQUIRE((q.g - p.g).norm() < 1e-12);
  }
}

TEST_CASE("pair change applies phi to g only")
{
  const GpbChange c = nontrivial_change();
  const auto grp = heisenberg_group();
  for (const auto & s : samples_for(grp, 2, 2, 50, 9)) {
    const PairPoint q = apply_pair_change(c, PairPoint{s.x, s.sigma, s.g, s.h});
    REQUIRE((q.h - c.fiber.apply(s.x, s.h)).norm() < 1e-15);
    REQUIRE((q.g - grp->multiply(c.phi(s.x, s.sigma), c.fiber.apply(s.x, s.g))).norm() < 1e-15);
  }
}

TEST_CASE("block-triangular inverse of the (x, sigma) Jacobian")
{
  const GpbChange c = nontrivial_change();
  for (const auto & s : samples_for(heisenberg_group(), 2, 2, 50, 10)) {
    const JacobianBlocks b = jacobian_blocks(c, GpbPoint{s.x, s.sigma, s.g});
    // Full Jacobian of (x, σ) ↦ (x', σ') by the oracle, then inverted densely.
    const Matrix full = oracle::jacobian5(
      [&](const Vector & z) -> Vector {
        const Vector x = z.head(2), sg = z.tail(2);
        const Vector xp = c.base.forward(x), sp = c.sigma.forward(x, sg);
        return concat({xp, sp});
      },
      concat({s.x, s.sigma}));
    const Matrix inv = full.inverse();
    const Matrix lower_left = -b.sigma_inv * b.sigma_base * b.base_inv;
    REQUIRE((inv.bottomLeftCorner(2, 2) - lower_left).cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE((inv.topLeftCorner(2, 2) - b.base_inv).cwiseAbs().maxCoeff() < 1e-8);
    REQUIRE((inv.bottomRightCorner(2, 2) - b.sigma_inv).cwiseAbs().maxCoeff() < 1e-8);
  }
}
