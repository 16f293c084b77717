#include "lgconn/scenario.hpp"

namespace lgconn {

// Listing order is the order below; keep it stable, the CLI tests depend on it.
const std::vector<BundledScenario> & bundled_scenarios()
{
  static const std::vector<BundledScenario> kBundled = {
    {"vector-bundle-linear", "linear connection N(x)v on additive R^3: both LGFB conditions, lifts, forced linearity",
     false, R"({
  "name": "vector-bundle-linear",
  "group": "additive:3",
  "dims": {"m": 2, "n": 3},
  "domain": {"base": {"lower": [-1, -1], "upper": [1, 1]}},
  "eta": {"name": "linear", "seed": 11, "scale": 0.5},
  "transport": {"curve": {"base": [[0, 1, 0.5], [0.2, -0.5, 0.3]]}, "steps": 64, "samples": 16},
  "suites": ["lgfb", "lift-multiplication", "linearity", "transport-homomorphism"],
  "sampling": {"count": 1000, "seed": 1}
})"},
    {"affine-vector-bundle", "affine connection sigma(x) + N(x)v: equivariance against N v, forced eta", false, R"({
  "name": "affine-vector-bundle",
  "group": "additive:2",
  "dims": {"m": 2, "n": 2},
  "domain": {"base": {"lower": [-1, -1], "upper": [1, 1]}},
  "eta": {"name": "linear", "seed": 5, "scale": 0.5},
  "connection": {"name": "affine", "seed": 7, "scale": 0.5},
  "suites": ["lgfb", "gen-connection", "forced-eta"],
  "sampling": {"count": 1000, "seed": 2}
})"},
    {"heisenberg-genconn", "generalized connection on H3 built from boundary data, k = 2", false, R"({
  "name": "heisenberg-genconn",
  "group": "heisenberg",
  "dims": {"m": 2, "n": 5},
  "domain": {"base": {"lower": [-1, -1], "upper": [1, 1]}, "sigma": {"lower": [-1, -1], "upper": [1, 1]}},
  "eta": {"name": "heisenberg-derivation", "seed": 3, "scale": 0.5},
  "connection": {"name": "from-boundary", "seed": 21, "scale": 0.5},
  "suites": ["group-axioms", "lgfb", "gen-connection", "forced-eta"],
  "sampling": {"count": 1000, "seed": 3}
})"},
    {"standard-reduction", "n = l on Aff(1)+: right-equivariant A checked directly and as a generalized connection",
     false, R"({
  "name": "standard-reduction",
  "group": "aff1",
  "dims": {"m": 2, "n": 2},
  "domain": {"base": {"lower": [-1, -1], "upper": [1, 1]}},
  "eta": {"name": "trivial"},
  "connection": {"name": "standard", "seed": 4, "scale": 0.5},
  "suites": ["standard-reduction", "gen-connection"],
  "sampling": {"count": 1000, "seed": 4}
})"},
    {"lgfb-chart-invariance", "H3 connection pushed through a base change and composed fiber automorphisms", false,
     R"({
  "name": "lgfb-chart-invariance",
  "group": "heisenberg",
  "dims": {"m": 2, "n": 3},
  "domain": {"base": {"lower": [-1, -1], "upper": [1, 1]}},
  "eta": {"name": "heisenberg-derivation", "seed": 8, "scale": 0.5},
  "change": {"base": "triangular", "fiber": ["heisenberg-inner", "heisenberg-scaling"]},
  "suites": ["fiber-automorphism", "lgfb-invariance"],
  "tolerances": {"abs_tol": 1e-5},
  "sampling": {"count": 1000, "seed": 5}
})"},
    {"gpb-chart-invariance", "H3 generalized connection under a change with nontrivial phi and sigma shear", false,
     R"({
  "name": "gpb-chart-invariance",
  "group": "heisenberg",
  "dims": {"m": 2, "n": 5},
  "domain": {"base": {"lower": [-1, -1], "upper": [1, 1]}, "sigma": {"lower": [-1, -1], "upper": [1, 1]}},
  "eta": {"name": "heisenberg-derivation", "seed": 3, "scale": 0.5},
  "connection": {"name": "from-boundary", "seed": 21, "scale": 0.5},
  "change": {"base": "polynomial", "sigma": "shear", "phi": "smooth", "fiber": "heisenberg-inner"},
  "suites": ["gen-invariance"],
  "tolerances": {"abs_tol": 1e-5},
  "sampling": {"count": 1000, "seed": 6}
})"},
    {"transport-homomorphism", "parallel transport along a polynomial curve preserves products on H3", false, R"({
  "name": "transport-homomorphism",
  "group": "heisenberg",
  "dims": {"m": 2, "n": 3},
  "domain": {"base": {"lower": [-1, -1], "upper": [1, 1]}},
  "eta": {"name": "heisenberg-derivation", "seed": 13, "scale": 0.5},
  "transport": {"curve": {"base": [[-0.5, 1, 0.25], [0.3, -0.6, 0, 0.2]]}, "steps": 128, "samples": 24},
  "suites": ["lgfb", "transport-homomorphism"],
  "sampling": {"count": 200, "seed": 7}
})"},
    {"aff1-lgfb", "inner-derivation connection on Aff(1)+ with an inner fiber change", false, R"({
  "name": "aff1-lgfb",
  "group": "aff1",
  "dims": {"m": 1, "n": 2},
  "domain": {"base": {"lower": [-1], "upper": [1]}},
  "eta": {"name": "aff1-derivation", "seed": 9, "scale": 0.5},
  "change": {"base": "polynomial", "fiber": "aff1-inner"},
  "suites": ["group-axioms", "lgfb", "lift-multiplication", "fiber-automorphism", "lgfb-invariance"],
  "tolerances": {"abs_tol": 1e-5},
  "sampling": {"count": 1000, "seed": 8}
})"},
    {"negative-nonadditive", "eta(x, v) = v^2 on additive R^3 is not multiplicative", true, R"({
  "name": "negative-nonadditive",
  "group": "additive:3",
  "dims": {"m": 2, "n": 3},
  "domain": {"base": {"lower": [-1, -1], "upper": [1, 1]}},
  "eta": {"name": "quadratic"},
  "suites": ["lgfb"],
  "sampling": {"count": 1000, "seed": 9}
})"},
    {"negative-broken-genconn", "boundary-built H3 connection with a non-equivariant perturbation",
     true, R"({
  "name": "negative-broken-genconn",
  "group": "heisenberg",
  "dims": {"m": 2, "n": 5},
  "domain": {"base": {"lower": [-1, -1], "upper": [1, 1]}, "sigma": {"lower": [-1, -1], "upper": [1, 1]}},
  "eta": {"name": "heisenberg-derivation", "seed": 3, "scale": 0.5},
  "connection": {"name": "from-boundary", "seed": 21, "scale": 0.5, "perturbation": 0.05},
  "suites": ["gen-connection"],
  "sampling": {"count": 1000, "seed": 10}
})"},
  };
  return kBundled;
}

}  // namespace lgconn
