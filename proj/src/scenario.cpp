#include "lgconn/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lgconn/atlas.hpp"
#include "lgconn/genconn.hpp"
#include "lgconn/lgfb.hpp"
#include "lgconn/liegroup.hpp"
#include "lgconn/transport.hpp"

namespace lgconn {

using nlohmann::json;

namespace {

const json & require(const json & obj, const std::string & key, const std::string & path)
{
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(path + key, "missing required key");
  }
  return obj.at(key);
}

template <typename T>
T get_as(const json & value, const std::string & path)
{
  try {
    return value.get<T>();
  } catch (const json::exception & e) {
    throw ConfigError(path, std::string("wrong type: ") + e.what());
  }
}

template <typename T>
T value_or(const json & obj, const std::string & key, T fallback, const std::string & path)
{
  if (!obj.is_object() || !obj.contains(key)) {
    return fallback;
  }
  return get_as<T>(obj.at(key), path + key);
}

Vector parse_vector(const json & value, const std::string & path)
{
  const auto v = get_as<std::vector<double>>(value, path);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix parse_matrix(const json & value, Eigen::Index rows, Eigen::Index cols, const std::string & path)
{
  const auto v = get_as<std::vector<std::vector<double>>>(value, path);
  if (static_cast<Eigen::Index>(v.size()) != rows) {
    throw ConfigError(path, "expected " + std::to_string(rows) + " rows");
  }
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(v[static_cast<std::size_t>(i)].size()) != cols) {
      throw ConfigError(path, "expected " + std::to_string(cols) + " columns in every row");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      out(i, j) = v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

DomainBox parse_box(const json & value, Eigen::Index dim, const std::string & path)
{
  Vector lo = parse_vector(require(value, "lower", path + "."), path + ".lower");
  Vector hi = parse_vector(require(value, "upper", path + "."), path + ".upper");
  if (lo.size() != dim || hi.size() != dim) {
    throw ConfigError(path, "box has dimension " + std::to_string(lo.size()) + ", expected " + std::to_string(dim));
  }
  try {
    return DomainBox(std::move(lo), std::move(hi));
  } catch (const ConfigError & e) {
    throw ConfigError(path, e.what());
  }
}

void require_group(const GroupPtr & group, const std::string & prefix, const std::string & what)
{
  if (group->name().rfind(prefix, 0) != 0) {
    throw ConfigError(what, "requires a " + prefix + " group, scenario uses " + group->name());
  }
}

double first_or_zero(const Vector & x) { return x.size() > 0 ? x[0] : 0.0; }

struct Assembled
{
  std::string name;
  GroupPtr group;
  Eigen::Index m = 0;
  Eigen::Index l = 0;
  Eigen::Index k = 0;
  std::optional<DomainBox> sigma_box;
  std::optional<SamplingPlan> plan;
  ToleranceConfig tol;
  std::optional<LgfbConnectionField> eta;
  std::optional<LinearCoefficients> linear_n;
  std::optional<GenConnectionField> connection;
  std::optional<StandardCoefficientMap> standard;
  std::optional<FiberAutomorphismField> fiber_change;
  std::optional<GpbChange> gpb_change;
  std::optional<BaseCurve> curve;
  int steps = 64;
  std::size_t transport_samples = 16;
  std::string connection_error;  ///< construction refused η (InvalidEta)
};

// ---------------------------------------------------------------------------
// Field registries
// ---------------------------------------------------------------------------

MatrixField matrix_param(const json & node, Eigen::Index rows, Eigen::Index cols, Eigen::Index input_dim,
                         const std::string & key, const std::string & path)
{
  if (node.contains(key)) {
    const Matrix fixed = parse_matrix(node.at(key), rows, cols, path + key);
    return [fixed](const Vector &) { return fixed; };
  }
  const auto seed = value_or<std::uint64_t>(node, "seed", 1, path);
  const double scale = value_or<double>(node, "scale", 0.5, path);
  return random_smooth_field(rows, cols, input_dim, seed, scale);
}

void assemble_eta(Assembled & s, const json & node)
{
  const std::string path = "eta.";
  const auto name = get_as<std::string>(require(node, "name", path), path + "name");
  if (name == "trivial") {
    s.eta = trivial_connection(s.group, s.m);
  } else if (name == "linear") {
    require_group(s.group, "additive", "eta.name");
    const Eigen::Index l = s.l, m = s.m;
    LinearCoefficients n;
    if (node.contains("matrices")) {
      const auto & arr = node.at("matrices");
      if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != m) {
        throw ConfigError("eta.matrices", "expected one l x l matrix per base direction");
      }
      std::vector<Matrix> fixed;
      for (std::size_t mu = 0; mu < arr.size(); ++mu) {
        fixed.push_back(parse_matrix(arr[mu], l, l, "eta.matrices[" + std::to_string(mu) + "]"));
      }
      n = [fixed](const Vector &) { return fixed; };
    } else {
      const auto seed = value_or<std::uint64_t>(node, "seed", 1, path);
      const double scale = value_or<double>(node, "scale", 0.5, path);
      std::vector<MatrixField> fields;
      for (Eigen::Index mu = 0; mu < m; ++mu) {
        fields.push_back(random_smooth_field(l, l, m, seed + static_cast<std::uint64_t>(mu), scale));
      }
      n = [fields](const Vector & x) {
        std::vector<Matrix> out;
        for (const auto & f : fields) {
          out.push_back(f(x));
        }
        return out;
      };
    }
    s.linear_n = n;
    s.eta = linear_connection(n, s.group, m);
  } else if (name == "heisenberg-derivation") {
    require_group(s.group, "heisenberg", "eta.name");
    s.eta = heisenberg_derivation_connection(matrix_param(node, 6, s.m, s.m, "params", path), s.m);
  } else if (name == "aff1-derivation") {
    require_group(s.group, "aff1", "eta.name");
    s.eta = aff1_derivation_connection(matrix_param(node, 2, s.m, s.m, "params", path), s.m);
  } else if (name == "quadratic") {
    // Deliberately not an LGFB connection: every column is g∘g.
    const Eigen::Index m = s.m;
    s.eta = LgfbConnectionField(s.group, m, [m](const Vector &, const Vector & g) -> Matrix {
      return g.cwiseProduct(g).replicate(1, m);
    });
  } else {
    throw ConfigError("eta.name", "unknown field '" + name + "'");
  }
}

Matrix perturbation_term(const Vector & g, const Vector & e, Eigen::Index cols)
{
  const Vector d = g - e;
  return d.cwiseProduct(d).replicate(1, cols);
}

void assemble_connection(Assembled & s, const json & node, std::span<const BundleSample> samples)
{
  const std::string path = "connection.";
  const auto name = get_as<std::string>(require(node, "name", path), path + "name");
  const double eps = value_or<double>(node, "perturbation", 0.0, path);
  const Eigen::Index l = s.l, m = s.m, k = s.k;

  if (name == "from-boundary") {
    if (!s.eta) {
      throw ConfigError("connection.name", "from-boundary needs an eta entry");
    }
    const auto seed = value_or<std::uint64_t>(node, "seed", 1, path);
    const double scale = value_or<double>(node, "scale", 0.5, path);
    const MatrixField b_mu = random_smooth_field(l, m, m + k, seed, scale);
    const MatrixField b_theta = random_smooth_field(l, k, m + k, seed + 1, scale);
    BoundaryData b;
    b.a_mu_at_e = [b_mu](const Vector & x, const Vector & sg) { return b_mu(concat({x, sg})); };
    b.a_theta_at_e = [b_theta](const Vector & x, const Vector & sg) { return b_theta(concat({x, sg})); };
    try {
      GenConnectionField built = build_from_boundary(b, *s.eta, k, samples, s.tol);
      if (eps != 0.0) {
        const Vector e = s.group->identity();
        built = GenConnectionField(
          s.group, m, k,
          [built, eps, e, m](const Vector & x, const Vector & sg, const Vector & g) {
            return Matrix(built.a_mu(x, sg, g) + eps * perturbation_term(g, e, m));
          },
          [built](const Vector & x, const Vector & sg, const Vector & g) { return built.a_theta(x, sg, g); });
      }
      s.connection = std::move(built);
    } catch (const InvalidEta & e) {
      s.connection_error = e.what();
    }
  } else if (name == "affine") {
    if (!s.linear_n || k != 0) {
      throw ConfigError("connection.name", "affine needs a linear eta and n = l");
    }
    const MatrixField sigma = matrix_param(node, l, m, m, "sigma", path);
    s.connection = affine_connection(sigma, *s.linear_n, s.group, m);
  } else if (name == "standard") {
    if (k != 0) {
      throw ConfigError("connection.name", "standard connections need n = l");
    }
    const MatrixField b = matrix_param(node, l, m, m, "boundary", path);
    const GroupPtr grp = s.group;
    const double step = s.tol.fd_step;
    StandardCoefficientMap a_std = [grp, b, eps, m, step](const Vector & x, const Vector & g) {
      Matrix out = grp->d1_multiply(grp->identity(), g, step) * b(x);
      if (eps != 0.0) {
        out += eps * perturbation_term(g, grp->identity(), m);
      }
      return out;
    };
    s.standard = a_std;
    s.connection = standard_as_generalized(grp, m, a_std);
  } else {
    throw ConfigError("connection.name", "unknown connection '" + name + "'");
  }
}

// ---------------------------------------------------------------------------
// Change registries
// ---------------------------------------------------------------------------

BaseChange base_change_by_name(const std::string & name)
{
  if (name == "identity") {
    return identity_base_change();
  }
  if (name == "polynomial") {
    return polynomial_base_change();
  }
  if (name == "triangular") {
    return triangular_base_change();
  }
  throw ConfigError("change.base", "unknown base change '" + name + "'");
}

FiberAutomorphismField fiber_change_by_name(const Assembled & s, const std::string & name)
{
  if (name == "identity") {
    return identity_automorphism(s.group);
  }
  if (name == "heisenberg-inner") {
    require_group(s.group, "heisenberg", "change.fiber");
    return heisenberg_inner_automorphism([](const Vector & x) {
      Vector pq(2);
      pq << 0.3 * std::sin(first_or_zero(x)) + 0.1, 0.2 * std::cos(x.sum());
      return pq;
    });
  }
  if (name == "heisenberg-scaling") {
    require_group(s.group, "heisenberg", "change.fiber");
    return heisenberg_scaling_automorphism([](const Vector & x) {
      Vector r(2);
      r << 0.2 * std::sin(first_or_zero(x)), 0.1 * std::cos(x.sum()) - 0.05;
      return r;
    });
  }
  if (name == "aff1-inner") {
    require_group(s.group, "aff1", "change.fiber");
    return aff1_inner_automorphism([](const Vector & x) {
      Vector cd(2);
      cd << std::exp(0.2 * std::sin(first_or_zero(x))), 0.3 * std::cos(x.sum());
      return cd;
    });
  }
  if (name == "linear") {
    require_group(s.group, "additive", "change.fiber");
    const Eigen::Index l = s.l;
    // Entries of the perturbation stay below 0.2, so rows are diagonally dominant for l <= 4.
    const MatrixField p = random_smooth_field(l, l, s.m, 99, 0.1);
    MatrixMap a = [p, l](const Vector & x) { return Matrix(Matrix::Identity(l, l) + p(x)); };
    MatrixMap a_inv = [a](const Vector & x) { return Matrix(a(x).inverse()); };
    return linear_automorphism(s.group, a, a_inv);
  }
  if (name == "rotation") {
    if (s.group->name() != "additive:2") {
      throw ConfigError("change.fiber", "rotation requires additive:2");
    }
    return rotation_automorphism(s.group, [](const Vector & x) { return 0.5 * std::sin(first_or_zero(x)) + 0.2; });
  }
  throw ConfigError("change.fiber", "unknown fiber automorphism '" + name + "'");
}

FiberAutomorphismField parse_fiber_change(const Assembled & s, const json & node)
{
  if (node.is_string()) {
    return fiber_change_by_name(s, node.get<std::string>());
  }
  const auto names = get_as<std::vector<std::string>>(node, "change.fiber");
  if (names.empty()) {
    throw ConfigError("change.fiber", "empty composition");
  }
  FiberAutomorphismField out = fiber_change_by_name(s, names.front());
  for (std::size_t i = 1; i < names.size(); ++i) {
    out = compose(out, fiber_change_by_name(s, names[i]));
  }
  return out;
}

BinaryMap phi_by_name(const Assembled & s, const std::string & name)
{
  const Vector e = s.group->identity();
  if (name == "identity") {
    return [e](const Vector &, const Vector &) { return e; };
  }
  if (name == "smooth") {
    // Small enough to stay inside every built-in chart (Aff(1)⁺ needs a > 0).
    return [e](const Vector & x, const Vector & sg) {
      Vector out = e;
      const double base = x.sum();
      const double fib = sg.size() > 0 ? sg.sum() : 0.0;
      for (Eigen::Index i = 0; i < out.size(); ++i) {
        out[i] += 0.15 * std::sin(static_cast<double>(i + 1) + base + static_cast<double>(i + 1) * fib);
      }
      return out;
    };
  }
  throw ConfigError("change.phi", "unknown phi '" + name + "'");
}

void assemble_change(Assembled & s, const json & node)
{
  const std::string path = "change.";
  const BaseChange base = base_change_by_name(value_or<std::string>(node, "base", "identity", path));
  FiberAutomorphismField fiber =
    node.contains("fiber") ? parse_fiber_change(s, node.at("fiber")) : identity_automorphism(s.group);
  s.fiber_change = fiber;

  const auto sigma_name = value_or<std::string>(node, "sigma", "identity", path);
  SigmaChange sigma;
  if (sigma_name == "identity") {
    sigma = identity_sigma_change();
  } else if (sigma_name == "shear") {
    sigma = shear_sigma_change();
  } else {
    throw ConfigError("change.sigma", "unknown sigma change '" + sigma_name + "'");
  }
  GpbChange c = lgfb_as_gpb_change(base, std::move(fiber));
  c.sigma = std::move(sigma);
  c.phi = phi_by_name(s, value_or<std::string>(node, "phi", "identity", path));
  c.phi_jac_base.reset();
  c.phi_jac_sigma.reset();
  s.gpb_change = std::move(c);
}

void assemble_transport(Assembled & s, const json & node)
{
  const std::string path = "transport.";
  const json & curve = require(node, "curve", path);
  const auto base = get_as<std::vector<std::vector<double>>>(require(curve, "base", "transport.curve."),
                                                             "transport.curve.base");
  if (static_cast<Eigen::Index>(base.size()) != s.m) {
    throw ConfigError("transport.curve.base", "needs one coefficient list per base coordinate");
  }
  std::vector<std::vector<double>> sigma;
  if (curve.contains("sigma")) {
    sigma = get_as<std::vector<std::vector<double>>>(curve.at("sigma"), "transport.curve.sigma");
    if (static_cast<Eigen::Index>(sigma.size()) != s.k) {
      throw ConfigError("transport.curve.sigma", "needs one coefficient list per sigma coordinate");
    }
  }
  s.curve = polynomial_curve(base, sigma);
  s.steps = value_or<int>(node, "steps", 64, path);
  if (s.steps < 4) {
    throw ConfigError("transport.steps", "must be at least 4");
  }
  s.transport_samples = value_or<std::size_t>(node, "samples", 16, path);
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

const std::vector<std::string> kSuites = {
  "group-axioms",   "lgfb",          "lift-multiplication", "linearity",          "fiber-automorphism",
  "lgfb-invariance", "gen-connection", "forced-eta",          "gen-invariance",     "standard-reduction",
  "transport-homomorphism",
};

template <typename T>
const T & need(const std::optional<T> & v, const std::string & suite, const char * what)
{
  if (!v) {
    throw ConfigError("suites", "suite '" + suite + "' needs " + what);
  }
  return *v;
}

void check_suite_prerequisites(const Assembled & s, const std::string & suite)
{
  if (suite == "lgfb" || suite == "lift-multiplication" || suite == "linearity" || suite == "lgfb-invariance"
      || suite == "gen-connection" || suite == "gen-invariance" || suite == "transport-homomorphism") {
    need(s.eta, suite, "an eta entry");
  }
  if (suite == "linearity") {
    require_group(s.group, "additive", "suites");
  }
  if (suite == "fiber-automorphism" || suite == "lgfb-invariance" || suite == "gen-invariance") {
    need(s.gpb_change, suite, "a change entry");
  }
  if ((suite == "gen-connection" || suite == "forced-eta" || suite == "gen-invariance")
      && !s.connection && s.connection_error.empty()) {
    throw ConfigError("suites", "suite '" + suite + "' needs a connection entry");
  }
  if (suite == "standard-reduction") {
    need(s.standard, suite, "a standard connection");
  }
  if (suite == "transport-homomorphism") {
    need(s.curve, suite, "a transport entry");
  }
}

ValidationReport run_suite(const Assembled & s, const std::string & suite, std::span<const BundleSample> samples)
{
  if (suite == "group-axioms") {
    return check_group_axioms(*s.group, s.plan->count, s.plan->seed, s.tol).as_report();
  }
  if (suite == "lgfb") {
    return check_lgfb_connection(*s.eta, samples, s.tol);
  }
  if (suite == "lift-multiplication") {
    return check_lift_multiplication(*s.eta, samples, s.tol);
  }
  if (suite == "linearity") {
    return check_linearity_forced(*s.eta, samples, s.tol);
  }
  if (suite == "fiber-automorphism") {
    ValidationReport r = check_fiber_automorphism(*s.fiber_change, samples, s.tol);
    r.append(check_base_derivative_at_identity(*s.fiber_change, samples, s.tol));
    return r;
  }
  if (suite == "lgfb-invariance") {
    return check_lgfb_invariance(*s.eta, s.gpb_change->base, *s.fiber_change, samples, s.tol);
  }
  if (!s.connection_error.empty()
      && (suite == "gen-connection" || suite == "forced-eta" || suite == "gen-invariance")) {
    throw InvalidEta(s.connection_error);
  }
  if (suite == "gen-connection") {
    return check_gen_connection(*s.connection, *s.eta, samples, s.tol);
  }
  if (suite == "forced-eta") {
    return check_eta_forced_lgfb(*s.connection, s.sigma_box, samples, s.tol);
  }
  if (suite == "gen-invariance") {
    return check_gen_invariance(*s.connection, *s.eta, *s.gpb_change, samples, s.tol);
  }
  if (suite == "standard-reduction") {
    return check_standard_reduction(s.group, s.m, *s.standard, samples, s.tol);
  }
  if (suite == "transport-homomorphism") {
    const std::size_t n = std::min(s.transport_samples, samples.size());
    return check_transport_homomorphism(*s.eta, *s.curve, samples.first(n), s.steps, s.tol);
  }
  throw ConfigError("suites", "unknown suite '" + suite + "'");
}

json condition_json(const ConditionResult & c)
{
  json j;
  j["name"] = c.name;
  j["passed"] = c.passed();
  j["count"] = c.stats.count;
  j["skipped"] = c.skipped;
  j["violations"] = c.violations;
  j["max_abs"] = c.stats.max_abs;
  j["mean_abs"] = c.stats.mean_abs();
  j["abs_tol"] = c.abs_tol;
  j["rel_tol"] = c.rel_tol;
  j["worst_point"] = std::vector<double>(c.stats.worst_point.data(),
                                         c.stats.worst_point.data() + c.stats.worst_point.size());
  return j;
}

}  // namespace

const std::vector<std::string> & known_suites() { return kSuites; }

bool RunReport::passed() const
{
  if (suites.empty()) {
    return false;
  }
  for (const auto & s : suites) {
    if (!s.passed()) {
      return false;
    }
  }
  return true;
}

json RunReport::to_json() const
{
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["scenario"] = scenario;
  j["config"] = config;
  j["passed"] = passed();
  json arr = json::array();
  for (const auto & s : suites) {
    json sj;
    sj["suite"] = s.suite;
    sj["passed"] = s.passed();
    if (!s.error.empty()) {
      sj["error"] = s.error;
    }
    json conds = json::array();
    for (const auto & c : s.report.conditions) {
      conds.push_back(condition_json(c));
    }
    sj["conditions"] = std::move(conds);
    arr.push_back(std::move(sj));
  }
  j["suites"] = std::move(arr);
  return j;
}

std::string RunReport::render_table() const
{
  std::ostringstream os;
  char line[256];
  os << "scenario: " << scenario << "\n";
  std::snprintf(line, sizeof line, "%-24s %-36s %-5s %12s %10s %7s %7s\n", "suite", "condition", "ok", "max_abs",
                "abs_tol", "count", "skipped");
  os << line;
  for (const auto & s : suites) {
    if (!s.error.empty()) {
      std::snprintf(line, sizeof line, "%-24s %-36s %-5s  error: %s\n", s.suite.c_str(), "-", "FAIL",
                    s.error.c_str());
      os << line;
    }
    for (const auto & c : s.report.conditions) {
      std::snprintf(line, sizeof line, "%-24s %-36s %-5s %12.3e %10.1e %7zu %7zu\n", s.suite.c_str(),
                    c.name.c_str(), c.passed() ? "PASS" : "FAIL", c.stats.max_abs, c.abs_tol, c.stats.count,
                    c.skipped);
      os << line;
      if (!c.passed() && c.stats.worst_point.size() > 0) {
        std::ostringstream pt;
        pt << c.stats.worst_point.transpose();
        os << "    worst point: [" << pt.str() << "]\n";
      }
    }
  }
  std::snprintf(line, sizeof line, "overall: %s  (%.2f s)\n", passed() ? "PASS" : "FAIL", wall_seconds);
  os << line;
  return os.str();
}

json load_scenario(const std::string & path_or_name)
{
  std::string text;
  if (std::filesystem::exists(path_or_name)) {
    std::ifstream in(path_or_name);
    if (!in) {
      throw ConfigError("scenario", "cannot open " + path_or_name);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  } else {
    for (const auto & b : bundled_scenarios()) {
      if (b.name == path_or_name) {
        text = b.source;
      }
    }
    if (text.empty()) {
      throw ConfigError("scenario", "no such file or bundled scenario: " + path_or_name);
    }
  }
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) {
      throw ConfigError("scenario", "top level must be an object");
    }
    return doc;
  } catch (const json::parse_error & e) {
    throw ConfigError("scenario", std::string("parse error: ") + e.what());
  }
}

json apply_overrides(json doc, const RunOverrides & overrides)
{
  if (overrides.seed) {
    doc["sampling"]["seed"] = *overrides.seed;
  }
  if (overrides.samples) {
    doc["sampling"]["count"] = *overrides.samples;
  }
  if (overrides.abs_tol) {
    doc["tolerances"]["abs_tol"] = *overrides.abs_tol;
  }
  return doc;
}

RunReport run_scenario(const json & doc)
{
  const auto start = std::chrono::steady_clock::now();
  Assembled s;
  s.name = get_as<std::string>(require(doc, "name", ""), "name");
  s.group = group_by_name(get_as<std::string>(require(doc, "group", ""), "group"));

  const json & dims = require(doc, "dims", "");
  s.m = get_as<Eigen::Index>(require(dims, "m", "dims."), "dims.m");
  const auto n = get_as<Eigen::Index>(require(dims, "n", "dims."), "dims.n");
  s.l = value_or<Eigen::Index>(dims, "l", s.group->dim(), "dims.");
  if (s.l != s.group->dim()) {
    throw ConfigError("dims.l", "group " + s.group->name() + " has dimension " + std::to_string(s.group->dim()));
  }
  if (s.m < 1) {
    throw ConfigError("dims.m", "must be positive");
  }
  if (n < s.l) {
    throw ConfigError("dims.n", "must be at least l");
  }
  s.k = n - s.l;

  const json & domain = require(doc, "domain", "");
  const DomainBox base_box = parse_box(require(domain, "base", "domain."), s.m, "domain.base");
  if (s.k > 0) {
    s.sigma_box = parse_box(require(domain, "sigma", "domain."), s.k, "domain.sigma");
  } else if (domain.contains("sigma")) {
    throw ConfigError("domain.sigma", "given but n = l");
  }
  const DomainBox fiber_box =
    domain.contains("fiber") ? parse_box(domain.at("fiber"), s.l, "domain.fiber") : s.group->sample_box();

  const json sampling = doc.value("sampling", json::object());
  s.plan = SamplingPlan{base_box, s.sigma_box, fiber_box, value_or<std::size_t>(sampling, "count", 1000, "sampling."),
                        value_or<std::uint64_t>(sampling, "seed", 1, "sampling.")};
  if (s.plan->count == 0) {
    throw ConfigError("sampling.count", "must be positive");
  }

  const json tolerances = doc.value("tolerances", json::object());
  s.tol.abs_tol = value_or<double>(tolerances, "abs_tol", s.tol.abs_tol, "tolerances.");
  s.tol.rel_tol = value_or<double>(tolerances, "rel_tol", s.tol.rel_tol, "tolerances.");
  s.tol.fd_step = value_or<double>(tolerances, "fd_step", s.tol.fd_step, "tolerances.");
  try {
    s.tol.validate();
  } catch (const ConfigError & e) {
    throw ConfigError("tolerances", e.what());
  }

  const std::vector<BundleSample> samples = draw_samples(*s.plan);

  if (doc.contains("eta")) {
    assemble_eta(s, doc.at("eta"));
  }
  if (doc.contains("change")) {
    assemble_change(s, doc.at("change"));
  }
  if (doc.contains("connection")) {
    assemble_connection(s, doc.at("connection"), samples);
  }
  if (doc.contains("transport")) {
    assemble_transport(s, doc.at("transport"));
  }

  const auto suites = get_as<std::vector<std::string>>(require(doc, "suites", ""), "suites");
  if (suites.empty()) {
    throw ConfigError("suites", "at least one suite is required");
  }
  for (const auto & suite : suites) {
    if (std::find(kSuites.begin(), kSuites.end(), suite) == kSuites.end()) {
      throw ConfigError("suites", "unknown suite '" + suite + "'");
    }
    check_suite_prerequisites(s, suite);
  }

  RunReport report;
  report.scenario = s.name;
  report.config = doc;
  for (const auto & suite : suites) {
    SuiteOutcome out;
    out.suite = suite;
    out.report.name = suite;
    try {
      out.report = run_suite(s, suite, samples);
    } catch (const ConfigError &) {
      throw;
    } catch (const Error & e) {
      out.error = e.what();
    }
    report.suites.push_back(std::move(out));
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace lgconn
