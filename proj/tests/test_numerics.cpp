#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <thread>

#include "lgconn/numerics.hpp"
#include "oracles.hpp"

using namespace lgconn;

TEST_CASE("domain box rejects inverted bounds")
{
  CHECK_THROWS_AS(DomainBox(Vector::Constant(2, 1.0), Vector::Constant(2, 0.0)), ConfigError);
  const DomainBox box = DomainBox::cube(3, -1.0, 2.0);
  CHECK(box.contains(Vector::Constant(3, 0.5)));
  CHECK_FALSE(box.contains(Vector::Constant(3, 2.5)));
  CHECK(box.center().isApprox(Vector::Constant(3, 0.5)));
}

TEST_CASE("tolerance threshold is the larger of absolute and relative parts")
{
  ToleranceConfig tol{1e-6, 1e-3, 1e-5};
  CHECK(tol.threshold(0.0) == 1e-6);
  CHECK(tol.threshold(10.0) == Catch::Approx(1e-2));
  ToleranceConfig bad{-1.0, 1e-9, 1e-5};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("residual accumulation rejects NaN and tracks the worst point")
{
  ResidualStats s;
  s = accumulate_residual(s, 0.1, Vector::Constant(1, 1.0));
  s = accumulate_residual(s, 0.3, Vector::Constant(1, 2.0));
  s = accumulate_residual(s, 0.2, Vector::Constant(1, 3.0));
  CHECK(s.count == 3);
  CHECK(s.max_abs == 0.3);
  CHECK(s.worst_point[0] == 2.0);
  CHECK(s.mean_abs() == Catch::Approx(0.2));
  CHECK_THROWS_AS(accumulate_residual(s, std::nan(""), Vector::Zero(1)), NumericalFailure);
}

TEST_CASE("merge is associative on random partial folds")
{
  oracle::Rng rng(3);
  auto random_stats = [&rng]() {
    ResidualStats s;
    const int n = 1 + static_cast<int>(rng.uniform(0, 5));
    for (int i = 0; i < n; ++i) {
      s = accumulate_residual(s, rng.uniform(0, 1), rng.vec(2, -1, 1));
    }
    return s;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const ResidualStats a = random_stats(), b = random_stats(), c = random_stats();
    const ResidualStats left = merge(merge(a, b), c);
    const ResidualStats right = merge(a, merge(b, c));
    REQUIRE(left.max_abs == right.max_abs);
    REQUIRE(left.count == right.count);
    REQUIRE(left.sum_abs == Catch::Approx(right.sum_abs));
    REQUIRE(left.worst_point == right.worst_point);
  }
}

TEST_CASE("parallel fold over chunks equals the sequential fold")
{
  const DomainBox box = DomainBox::cube(2, -1, 1);
  const auto pts = sample_points(box, 4000, 17);
  auto residual = [](const Vector & p) { return std::abs(std::sin(3 * p[0]) * p[1]); };

  ResidualStats sequential;
  for (const auto & p : pts) {
    sequential = accumulate_residual(sequential, residual(p), p);
  }

  constexpr int kChunks = 4;
  std::vector<ResidualStats> partial(kChunks);
  std::vector<std::thread> workers;
  for (int c = 0; c < kChunks; ++c) {
    workers.emplace_back([&, c] {
      for (std::size_t i = c * pts.size() / kChunks; i < (c + 1) * pts.size() / kChunks; ++i) {
        partial[c] = accumulate_residual(partial[c], residual(pts[i]), pts[i]);
      }
    });
  }
  for (auto & w : workers) {
    w.join();
  }
  ResidualStats folded;
  for (const auto & p : partial) {
    folded = merge(folded, p);
  }
  CHECK(folded.max_abs == sequential.max_abs);
  CHECK(folded.count == sequential.count);
  CHECK(folded.worst_point == sequential.worst_point);
  CHECK(folded.sum_abs == Catch::Approx(sequential.sum_abs).epsilon(1e-12));
}

TEST_CASE("central differences match a fourth-order oracle")
{
  const VectorMap f = [](const Vector & x) {
    Vector y(2);
    y << std::exp(x[0]) * x[1], std::sin(x[0] * x[1]) + x[1] * x[1] * x[1];
    return y;
  };
  oracle::Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const Vector x = rng.vec(2, -1, 1);
    CHECK((fd_jacobian(f, x) - oracle::jacobian5(f, x)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("non-finite function values name the offending coordinate")
{
  const VectorMap f = [](const Vector & x) {
    Vector y = x;
    y[1] = x[1] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return y;
  };
  try {
    fd_jacobian(f, Vector::Zero(3));
    FAIL("expected NumericalFailure");
  } catch (const NumericalFailure & e) {
    CHECK(e.coordinate() == 1);
  }
}

TEST_CASE("splitmix64 reproduces the reference sequence")
{
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  SplitMix64 u(42);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform_open();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("sampling is deterministic, inside the box and slot-independent")
{
  const DomainBox base = DomainBox::cube(2, -1, 1);
  const DomainBox fiber = DomainBox::cube(3, 0.5, 2);
  SamplingPlan plan{base, DomainBox::cube(1, 0, 1), fiber, 300, 9};
  const auto a = draw_samples(plan);
  const auto b = draw_samples(plan);
  REQUIRE(a.size() == 300);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].tuple() == b[i].tuple());
    REQUIRE(base.contains(a[i].x));
    REQUIRE(fiber.contains(a[i].g));
    REQUIRE(fiber.contains(a[i].h));
    REQUIRE(a[i].sigma.size() == 1);
  }
  // g and h come from different streams
  CHECK(a[0].g != a[0].h);

  plan.sigma.reset();
  CHECK(draw_samples(plan)[0].sigma.size() == 0);
}

TEST_CASE("condition accumulator needs at least one evaluated point to pass")
{
  const ToleranceConfig tol;
  ConditionAccumulator empty("empty", tol);
  empty.skip();
  CHECK_FALSE(empty.result().passed());

  ConditionAccumulator acc("c", tol);
  acc.add(1e-8, 0.0, Vector::Zero(1));
  CHECK(acc.result().passed());
  acc.add(std::numeric_limits<double>::infinity(), 0.0, Vector::Ones(1));
  CHECK(acc.result().violations == 1);
  CHECK_FALSE(acc.result().passed());

  ConditionAccumulator rel("rel", ToleranceConfig{1e-6, 1e-3, 1e-5});
  rel.add(1e-2, 100.0, Vector::Zero(1));
  CHECK(rel.result().passed());
}

TEST_CASE("random smooth fields are deterministic in the seed")
{
  const auto f = random_smooth_field(2, 3, 2, 7);
  const auto g = random_smooth_field(2, 3, 2, 7);
  const auto h = random_smooth_field(2, 3, 2, 8);
  const Vector z = Vector::Constant(2, 0.3);
  CHECK(f(z) == g(z));
  CHECK(f(z) != h(z));
  CHECK(f(z).rows() == 2);
  CHECK(f(z).cols() == 3);
  CHECK_THROWS_AS(f(Vector::Zero(3)), NumericalFailure);
}
