#include <catch_amalgamated.hpp>

#include <cmath>

#include "lgconn/genconn.hpp"
#include "oracles.hpp"

using namespace lgconn;

namespace {

constexpr Eigen::Index kM = 2;
constexpr Eigen::Index kK = 2;

SamplingPlan plan_for(const GroupPtr & grp, Eigen::Index k, std::size_t n, std::uint64_t seed)
{
  SamplingPlan plan{DomainBox::cube(kM, -1, 1), std::nullopt, grp->sample_box(), n, seed};
  if (k > 0) {
    plan.sigma = DomainBox::cube(k, -1, 1);
  }
  return plan;
}

BoundaryData random_boundary(Eigen::Index l, Eigen::Index k, std::uint64_t seed)
{
  const MatrixField mu = random_smooth_field(l, kM, kM + k, seed, 0.5);
  const MatrixField th = random_smooth_field(l, k, kM + k, seed + 1000, 0.5);
  BoundaryData b;
  b.a_mu_at_e = [mu](const Vector & x, const Vector & s) { return mu(concat({x, s})); };
  b.a_theta_at_e = [th](const Vector & x, const Vector & s) { return th(concat({x, s})); };
  return b;
}

LgfbConnectionField heisenberg_eta(std::uint64_t seed)
{
  return heisenberg_derivation_connection(random_smooth_field(6, kM, kM, seed, 0.5), kM);
}

GpbChange heisenberg_change()
{
  GpbChange c = lgfb_as_gpb_change(polynomial_base_change(), heisenberg_inner_automorphism([](const Vector & x) {
                                     Vector pq(2);
                                     pq << 0.3 * std::sin(x[0]), 0.2 * x[1] - 0.1;
                                     return pq;
                                   }));
  c.sigma = shear_sigma_change();
  c.phi = [](const Vector & x, const Vector & s) {
    Vector out(3);
    out << 0.2 * std::sin(x[0] + s[0]), 0.1 * x[1] * s[1], 0.15 * std::cos(s[0] - x[1]);
    return out;
  };
  c.phi_jac_base.reset();
  c.phi_jac_sigma.reset();
  return c;
}

ToleranceConfig tol8() { return ToleranceConfig{1e-8, 1e-14, 1e-5}; }

}  // namespace

TEST_CASE("fields built from boundary data satisfy both equivariance conditions")
{
  const auto h3 = heisenberg_group();
  const auto samples = draw_samples(plan_for(h3, kK, 400, 1));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto eta = heisenberg_eta(seed + 10);
    const auto a = build_from_boundary(random_boundary(3, kK, seed), eta, kK, samples, tol8());
    const auto r = check_gen_connection(a, eta, samples, tol8());
    CHECK(r.passed());
    CHECK(r.max_residual() < 1e-12);
  }
}

TEST_CASE("extract_boundary round-trips exactly at the identity")
{
  const auto h3 = heisenberg_group();
  const auto samples = draw_samples(plan_for(h3, kK, 100, 2));
  const auto eta = heisenberg_eta(5);
  const BoundaryData b = random_boundary(3, kK, 7);
  const auto a = build_from_boundary(b, eta, kK, samples, tol8());
  const BoundaryData back = extract_boundary(a);
  for (const auto & s : samples) {
    REQUIRE(back.a_mu_at_e(s.x, s.sigma) == b.a_mu_at_e(s.x, s.sigma));
    REQUIRE(back.a_theta_at_e(s.x, s.sigma) == b.a_theta_at_e(s.x, s.sigma));
  }
}

TEST_CASE("build_from_boundary refuses an eta that is not an LGFB connection")
{
  const auto add2 = additive_group(2);
  const auto samples = draw_samples(plan_for(add2, 1, 100, 3));
  const LgfbConnectionField quad(add2, kM, [](const Vector &, const Vector & v) -> Matrix {
    return v.cwiseProduct(v).replicate(1, kM);
  });
  CHECK_THROWS_AS(build_from_boundary(random_boundary(2, 1, 1), quad, 1, samples, tol8()), InvalidEta);
}

TEST_CASE("infer_eta recovers the eta a field was built from")
{
  const auto h3 = heisenberg_group();
  const auto plan = plan_for(h3, kK, 300, 4);
  const auto samples = draw_samples(plan);
  const auto eta = heisenberg_eta(21);
  const auto a = build_from_boundary(random_boundary(3, kK, 22), eta, kK, samples, tol8());
  const InferredEta inferred = infer_eta(a, plan.sigma, samples, tol8());
  CHECK(inferred.report.passed());
  CHECK(inferred.reference_sigma == plan.sigma->center());
  for (const auto & s : samples) {
    REQUIRE(max_abs_entry(inferred.eta(s.x, s.g) - eta(s.x, s.g)) < 1e-12);
  }
  CHECK(check_eta_forced_lgfb(a, plan.sigma, samples, tol8()).passed());
}

TEST_CASE("sigma-dependent eta part is detected")
{
  const auto h3 = heisenberg_group();
  const auto plan = plan_for(h3, kK, 300, 5);
  const auto samples = draw_samples(plan);
  const auto eta = heisenberg_eta(31);
  const auto good = build_from_boundary(random_boundary(3, kK, 32), eta, kK, samples, tol8());
  // At each fixed σ this satisfies the μ condition with (1 + σ₀)η, so the implied η drifts with σ.
  const GenConnectionField bad(
    h3, kM, kK,
    [good, eta](const Vector & x, const Vector & s, const Vector & g) {
      return Matrix(good.a_mu(x, s, g) + s[0] * eta(x, g));
    },
    [good](const Vector & x, const Vector & s, const Vector & g) { return good.a_theta(x, s, g); });
  const auto r = check_eta_forced_lgfb(bad, plan.sigma, samples, tol8());
  CHECK_FALSE(r.condition("sigma_independence").passed());
}

TEST_CASE("a field violating the mu condition forces a non-LGFB eta")
{
  const auto h3 = heisenberg_group();
  const auto plan = plan_for(h3, kK, 300, 6);
  const auto samples = draw_samples(plan);
  const auto eta = heisenberg_eta(41);
  const auto good = build_from_boundary(random_boundary(3, kK, 42), eta, kK, samples, tol8());
  const GenConnectionField bad(
    h3, kM, kK,
    [good](const Vector & x, const Vector & s, const Vector & g) {
      Matrix out = good.a_mu(x, s, g);
      out(2, 0) += 0.2 * g[0] * g[0];
      return out;
    },
    [good](const Vector & x, const Vector & s, const Vector & g) { return good.a_theta(x, s, g); });
  CHECK_FALSE(check_gen_connection(bad, eta, samples, tol8()).condition("mu_equivariance").passed());
  const auto forced = check_eta_forced_lgfb(bad, plan.sigma, samples, tol8());
  CHECK(forced.condition("sigma_independence").passed());
  CHECK_FALSE(forced.condition("inferred.multiplicativity_condition").passed());
}

TEST_CASE("transformed generalized connections satisfy the equivariance conditions in the new chart")
{
  const auto h3 = heisenberg_group();
  const auto samples = draw_samples(plan_for(h3, kK, 300, 7));
  const auto eta = heisenberg_eta(51);
  const auto a = build_from_boundary(random_boundary(3, kK, 52), eta, kK, samples, tol8());
  const auto r = check_gen_invariance(a, eta, heisenberg_change(), samples, ToleranceConfig{1e-5, 1e-9, 1e-5});
  CHECK(r.passed());
  CHECK(r.max_residual() < 1e-7);
}

TEST_CASE("transform followed by the inverse change recovers the field")
{
  const auto h3 = heisenberg_group();
  const auto samples = draw_samples(plan_for(h3, kK, 100, 8));
  const auto eta = heisenberg_eta(61);
  const auto a = build_from_boundary(random_boundary(3, kK, 62), eta, kK, samples, tol8());
  const GpbChange c = heisenberg_change();
  const auto back = transform_genconn(transform_genconn(a, c), c.inverted());
  for (const auto & s : samples) {
    REQUIRE(max_abs_entry(back.a_mu(s.x, s.sigma, s.g) - a.a_mu(s.x, s.sigma, s.g)) < 1e-6);
    REQUIRE(max_abs_entry(back.a_theta(s.x, s.sigma, s.g) - a.a_theta(s.x, s.sigma, s.g)) < 1e-6);
  }
}

TEST_CASE("pure LGFB changes act on the eta part exactly as transform_lgfb")
{
  // φ ≡ e and Σ = id: A' − ∂¹π(e, g')A'(·, e) must equal the transformed η.
  const auto h3 = heisenberg_group();
  const auto samples = draw_samples(plan_for(h3, 0, 200, 9));
  const auto eta = heisenberg_eta(71);
  const auto a = build_from_boundary(random_boundary(3, 0, 72), eta, 0, samples, tol8());
  const auto fiber = compose(heisenberg_inner_automorphism([](const Vector & x) {
                               Vector pq(2);
                               pq << x[0], -0.5 * x[1];
                               return pq;
                             }),
                             heisenberg_scaling_automorphism([](const Vector & x) {
                               Vector r(2);
                               r << 0.1 * x[1], 0.2 * std::sin(x[0]);
                               return r;
                             }));
  const GpbChange c = lgfb_as_gpb_change(triangular_base_change(), fiber);
  const auto a_prime = transform_genconn(a, c);
  const auto eta_prime = transform_lgfb(eta, c.base, fiber);
  const Vector none(0);
  for (const auto & s : push_pair_samples(c, samples)) {
    const Matrix implied = a_prime.a_mu(s.x, none, s.g)
                           - h3->d1_multiply(h3->identity(), s.g) * a_prime.a_mu(s.x, none, h3->identity());
    REQUIRE(max_abs_entry(implied - eta_prime(s.x, s.g)) < 1e-7);
  }
}

TEST_CASE("standard reduction agrees with the general check")
{
  const auto aff = aff1_group();
  const auto samples = draw_samples(plan_for(aff, 0, 400, 10));
  const ToleranceConfig tol = tol8();
  auto equivariant = [aff](std::uint64_t seed) -> StandardCoefficientMap {
    const MatrixField b = random_smooth_field(2, kM, kM, seed, 0.7);
    return [aff, b](const Vector & x, const Vector & g) {
      return Matrix(aff->d1_multiply(aff->identity(), g) * b(x));
    };
  };
  for (std::uint64_t seed : {1u, 2u}) {
    const auto r = check_standard_reduction(aff, kM, equivariant(seed), samples, tol);
    CHECK(r.passed());
  }
  const StandardCoefficientMap broken = [base = equivariant(3)](const Vector & x, const Vector & g) {
    Matrix out = base(x, g);
    out(1, 1) += 0.1 * g[1] * g[1];
    return out;
  };
  const auto r = check_standard_reduction(aff, kM, broken, samples, tol);
  CHECK_FALSE(r.condition("standard.right_equivariance").passed());
  CHECK_FALSE(r.condition("standard.general_with_trivial_eta").passed());
  CHECK(r.condition("standard.path_agreement").passed());
  CHECK(r.condition("standard.right_equivariance").stats.worst_point
        == r.condition("standard.general_with_trivial_eta").stats.worst_point);
}

TEST_CASE("affine connections: equivariance against N v, inferred eta and boundary")
{
  const auto add3 = additive_group(3);
  const auto samples = draw_samples(plan_for(add3, 0, 400, 11));
  const MatrixField sigma = random_smooth_field(3, kM, kM, 81, 0.5);
  const MatrixField n0 = random_smooth_field(3, 3, kM, 82, 0.5);
  const MatrixField n1 = random_smooth_field(3, 3, kM, 83, 0.5);
  const LinearCoefficients n = [n0, n1](const Vector & x) { return std::vector<Matrix>{n0(x), n1(x)}; };
  const auto a = affine_connection(sigma, n, add3, kM);
  const auto eta = linear_connection(n, add3, kM);
  const ToleranceConfig tol{1e-10, 1e-14, 1e-5};
  CHECK(check_gen_connection(a, eta, samples, tol).passed());

  const InferredEta inferred = infer_eta(a, std::nullopt, samples, tol);
  const BoundaryData b = extract_boundary(a);
  const Vector none(0);
  for (const auto & s : samples) {
    REQUIRE(max_abs_entry(inferred.eta(s.x, s.g) - eta(s.x, s.g)) < 1e-10);
    REQUIRE(max_abs_entry(b.a_mu_at_e(s.x, none) - sigma(s.x)) < 1e-10);
  }
}

TEST_CASE("sigma box must match the connection")
{
  const auto add2 = additive_group(2);
  const auto a = standard_as_generalized(add2, kM, [](const Vector &, const Vector &) -> Matrix {
    return Matrix::Zero(2, kM);
  });
  const auto samples = draw_samples(plan_for(add2, 0, 10, 12));
  CHECK_THROWS_AS(infer_eta(a, DomainBox::cube(1, 0, 1), samples, tol8()), ConfigError);
  CHECK_THROWS_AS(GenConnectionField(add2, kM, 1, nullptr, nullptr), ConfigError);
}
