#include "lgconn/liegroup.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace lgconn {

LieGroupModel::LieGroupModel(Definition def) : def_(std::move(def))
{
  if (def_.identity.size() < 1) {
    throw ConfigError("group", "dimension must be positive");
  }
  if (!def_.multiply || !def_.invert) {
    throw ConfigError("group", "multiply and invert are required");
  }
  if (def_.chart_box.dim() != dim() || def_.sample_box.dim() != dim()) {
    throw ConfigError("group", "chart/sample boxes must match the group dimension");
  }
}

void LieGroupModel::require_in_chart(const Vector & p, const char * what) const
{
  if (!def_.chart_box.contains(p)) {
    throw ChartExit(def_.name + ": " + what + " outside the global chart");
  }
}

Vector LieGroupModel::multiply(const Vector & g, const Vector & h) const
{
  require_in_chart(g, "left factor");
  require_in_chart(h, "right factor");
  Vector out = def_.multiply(g, h);
  require_in_chart(out, "product");
  return out;
}

Vector LieGroupModel::invert(const Vector & g) const
{
  require_in_chart(g, "argument of invert");
  Vector out = def_.invert(g);
  require_in_chart(out, "inverse");
  return out;
}

Matrix LieGroupModel::d1_multiply(const Vector & g, const Vector & h, double fd_step) const
{
  if (def_.d1_multiply) {
    return (*def_.d1_multiply)(g, h);
  }
  return fd_jacobian([&](const Vector & gg) { return def_.multiply(gg, h); }, g, fd_step);
}

Matrix LieGroupModel::d2_multiply(const Vector & g, const Vector & h, double fd_step) const
{
  if (def_.d2_multiply) {
    return (*def_.d2_multiply)(g, h);
  }
  return fd_jacobian([&](const Vector & hh) { return def_.multiply(g, hh); }, h, fd_step);
}

Matrix LieGroupModel::adjoint(const Vector & g, double fd_step) const
{
  // c_g(δ) = (g·δ)·g⁻¹, so at δ = e: ∂¹π(g, g⁻¹) ∂²π(g, e).
  const Vector ginv = invert(g);
  return d1_multiply(g, ginv, fd_step) * d2_multiply(g, identity(), fd_step);
}

LieGroupModel LieGroupModel::without_analytic_partials() const
{
  Definition def = def_;
  def.name += "[fd]";
  def.d1_multiply.reset();
  def.d2_multiply.reset();
  return LieGroupModel(std::move(def));
}

LieGroupModel LieGroupModel::with_multiply(std::string name, BinaryMap multiply) const
{
  Definition def = def_;
  def.name = std::move(name);
  def.multiply = std::move(multiply);
  def.d1_multiply.reset();
  def.d2_multiply.reset();
  return LieGroupModel(std::move(def));
}

// ---------------------------------------------------------------------------
// Built-in groups
// ---------------------------------------------------------------------------

namespace {

constexpr double kWideChart = 1e6;

}  // namespace

GroupPtr additive_group(Eigen::Index l)
{
  if (l < 1) {
    throw ConfigError("group", "additive group needs l >= 1");
  }
  LieGroupModel::Definition def;
  def.name = "additive:" + std::to_string(l);
  def.identity = Vector::Zero(l);
  def.multiply = [](const Vector & v, const Vector & w) -> Vector { return v + w; };
  def.invert = [](const Vector & v) -> Vector { return -v; };
  def.d1_multiply = [l](const Vector &, const Vector &) -> Matrix { return Matrix::Identity(l, l); };
  def.d2_multiply = [l](const Vector &, const Vector &) -> Matrix { return Matrix::Identity(l, l); };
  def.chart_box = DomainBox::cube(l, -kWideChart, kWideChart);
  def.sample_box = DomainBox::cube(l, -1.0, 1.0);
  return std::make_shared<const LieGroupModel>(std::move(def));
}

GroupPtr heisenberg_group()
{
  LieGroupModel::Definition def;
  def.name = "heisenberg";
  def.identity = Vector::Zero(3);
  def.multiply = [](const Vector & g, const Vector & h) -> Vector {
    return Vector{{g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]}};
  };
  def.invert = [](const Vector & g) -> Vector { return Vector{{-g[0], -g[1], -g[2] + g[0] * g[1]}}; };
  def.d1_multiply = [](const Vector &, const Vector & h) -> Matrix {
    Matrix d = Matrix::Identity(3, 3);
    d(2, 0) = h[1];
    return d;
  };
  def.d2_multiply = [](const Vector & g, const Vector &) -> Matrix {
    Matrix d = Matrix::Identity(3, 3);
    d(2, 1) = g[0];
    return d;
  };
  def.chart_box = DomainBox::cube(3, -kWideChart, kWideChart);
  def.sample_box = DomainBox::cube(3, -1.0, 1.0);
  return std::make_shared<const LieGroupModel>(std::move(def));
}

GroupPtr aff1_group()
{
  LieGroupModel::Definition def;
  def.name = "aff1";
  def.identity = Vector{{1.0, 0.0}};
  def.multiply = [](const Vector & g, const Vector & h) -> Vector {
    return Vector{{g[0] * h[0], g[0] * h[1] + g[1]}};
  };
  def.invert = [](const Vector & g) -> Vector { return Vector{{1.0 / g[0], -g[1] / g[0]}}; };
  def.d1_multiply = [](const Vector &, const Vector & h) -> Matrix {
    return Matrix{{h[0], 0.0}, {h[1], 1.0}};
  };
  def.d2_multiply = [](const Vector & g, const Vector &) -> Matrix {
    return Matrix{{g[0], 0.0}, {0.0, g[0]}};
  };
  // a > 0 is the whole group; the lower bound is the smallest positive double.
  def.chart_box = DomainBox(Vector{{std::numeric_limits<double>::min(), -kWideChart}}, Vector{{kWideChart, kWideChart}});
  def.sample_box = DomainBox(Vector{{0.5, -1.0}}, Vector{{2.0, 1.0}});
  return std::make_shared<const LieGroupModel>(std::move(def));
}

GroupPtr so2_group()
{
  LieGroupModel::Definition def;
  def.name = "so2";
  def.identity = Vector::Zero(1);
  def.multiply = [](const Vector & a, const Vector & b) -> Vector { return a + b; };
  def.invert = [](const Vector & a) -> Vector { return -a; };
  def.d1_multiply = [](const Vector &, const Vector &) -> Matrix { return Matrix::Identity(1, 1); };
  def.d2_multiply = [](const Vector &, const Vector &) -> Matrix { return Matrix::Identity(1, 1); };
  def.chart_box = DomainBox::cube(1, -std::numbers::pi, std::numbers::pi);
  def.sample_box = DomainBox::cube(1, -std::numbers::pi / 4.0, std::numbers::pi / 4.0);
  return std::make_shared<const LieGroupModel>(std::move(def));
}

GroupPtr group_by_name(std::string_view name)
{
  if (name == "heisenberg") {
    return heisenberg_group();
  }
  if (name == "aff1") {
    return aff1_group();
  }
  if (name == "so2") {
    return so2_group();
  }
  constexpr std::string_view prefix = "additive:";
  if (name.starts_with(prefix)) {
    const auto digits = name.substr(prefix.size());
    int l = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), l);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && l >= 1 && l <= 64) {
      return additive_group(l);
    }
  }
  throw ConfigError("group", "unknown group '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Axiom checks
// ---------------------------------------------------------------------------

ValidationReport GroupAxiomReport::as_report() const
{
  ValidationReport r;
  r.name = "group_axioms";
  r.conditions = {associativity,   identity_law,  inverse_law,           assoc_derivative_identity,
                  partials_vs_fd,  unit_partials, adjoint_representation};
  return r;
}

GroupAxiomReport check_group_axioms(const LieGroupModel & group,
                                    std::size_t sample_count,
                                    std::uint64_t seed,
                                    const ToleranceConfig & tol)
{
  if (sample_count == 0) {
    throw ConfigError("sampling.count", "must be at least 1");
  }
  const auto gs = sample_points(group.sample_box(), sample_count, seed);
  const auto hs = sample_points(group.sample_box(), sample_count, seed + 1);
  const auto ks = sample_points(group.sample_box(), sample_count, seed + 2);
  const Vector & e = group.identity();
  const Eigen::Index l = group.dim();
  const Matrix id = Matrix::Identity(l, l);

  ConditionAccumulator assoc("associativity", tol);
  ConditionAccumulator ident("identity_law", tol);
  ConditionAccumulator inv("inverse_law", tol);
  ConditionAccumulator dassoc("assoc_derivative_identity", tol);
  ConditionAccumulator pfd("partials_vs_fd", tol);
  ConditionAccumulator unit("unit_partials", tol);
  ConditionAccumulator adrep("adjoint_representation", tol);

  for (std::size_t n = 0; n < sample_count; ++n) {
    const Vector & g = gs[n];
    const Vector & h = hs[n];
    const Vector & k = ks[n];
    const Vector pt = concat({g, h, k});

    try {
      const Vector lhs = group.multiply(group.multiply(g, h), k);
      const Vector rhs = group.multiply(g, group.multiply(h, k));
      assoc.add((lhs - rhs).lpNorm<Eigen::Infinity>(), rhs.lpNorm<Eigen::Infinity>(), pt);
    } catch (const ChartExit &) {
      assoc.skip();
    }

    try {
      const Vector a = group.multiply(e, g);
      const Vector b = group.multiply(g, e);
      ident.add(std::max((a - g).lpNorm<Eigen::Infinity>(), (b - g).lpNorm<Eigen::Infinity>()),
                g.lpNorm<Eigen::Infinity>(), g);
    } catch (const ChartExit &) {
      ident.skip();
    }

    try {
      const Vector ginv = group.invert(g);
      const Vector a = group.multiply(g, ginv);
      const Vector b = group.multiply(ginv, g);
      inv.add(std::max((a - e).lpNorm<Eigen::Infinity>(), (b - e).lpNorm<Eigen::Infinity>()),
              e.lpNorm<Eigen::Infinity>(), g);
    } catch (const ChartExit &) {
      inv.skip();
    }

    try {
      const Vector gh = group.multiply(g, h);
      const Matrix lhs = group.d1_multiply(e, gh, tol.fd_step);
      const Matrix rhs = group.d1_multiply(g, h, tol.fd_step) * group.d1_multiply(e, g, tol.fd_step);
      dassoc.add(max_abs_entry(lhs - rhs), max_abs_entry(rhs), concat({g, h}));
    } catch (const ChartExit &) {
      dassoc.skip();
    }

    try {
      const Matrix fd1 = fd_jacobian([&](const Vector & gg) { return group.multiply(gg, h); }, g, tol.fd_step);
      const Matrix fd2 = fd_jacobian([&](const Vector & hh) { return group.multiply(g, hh); }, h, tol.fd_step);
      const Matrix d1 = group.d1_multiply(g, h, tol.fd_step);
      const Matrix d2 = group.d2_multiply(g, h, tol.fd_step);
      pfd.add(std::max(max_abs_entry(d1 - fd1), max_abs_entry(d2 - fd2)),
              std::max(max_abs_entry(fd1), max_abs_entry(fd2)), concat({g, h}));
    } catch (const ChartExit &) {
      pfd.skip();
    }

    try {
      const Matrix a = group.d2_multiply(e, h, tol.fd_step);
      const Matrix b = group.d1_multiply(g, e, tol.fd_step);
      unit.add(std::max(max_abs_entry(a - id), max_abs_entry(b - id)), 1.0, concat({g, h}));
    } catch (const ChartExit &) {
      unit.skip();
    }

    try {
      const Matrix lhs = group.adjoint(group.multiply(g, h), tol.fd_step);
      const Matrix rhs = group.adjoint(g, tol.fd_step) * group.adjoint(h, tol.fd_step);
      adrep.add(max_abs_entry(lhs - rhs), max_abs_entry(rhs), concat({g, h}));
    } catch (const ChartExit &) {
      adrep.skip();
    }
  }

  return GroupAxiomReport{assoc.result(), ident.result(), inv.result(), dassoc.result(),
                          pfd.result(),   unit.result(),  adrep.result()};
}

}  // namespace lgconn
