// Independent reference computations used only by tests. Nothing here calls
// into the library's own derivative or integration code.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// exp(A) by scaling and squaring with a degree-18 Taylor core.
inline Mat expm(const Mat & a)
{
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const Mat scaled = a / std::ldexp(1.0, squarings);
  Mat term = Mat::Identity(a.rows(), a.cols());
  Mat sum = term;
  for (int k = 1; k <= 18; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) {
    sum = sum * sum;
  }
  return sum;
}

/// Composite Simpson rule on [0, 1] with an even number of panels.
inline Vec simpson(const std::function<Vec(double)> & f, int panels = 2000)
{
  const double h = 1.0 / panels;
  Vec acc = f(0.0) + f(1.0);
  for (int i = 1; i < panels; ++i) {
    acc += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
  }
  return acc * h / 3.0;
}

/// Fourth-order central difference Jacobian, independent of the library's stencil.
inline Mat jacobian5(const std::function<Vec(const Vec &)> & f, const Vec & x, double h = 1e-3)
{
  const Vec f0 = f(x);
  Mat out(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    auto at = [&](double s) {
      Vec y = x;
      y[j] += s * h;
      return f(y);
    };
    out.col(j) = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
  }
  return out;
}

/// Small xorshift generator so test data does not depend on the library PRNG.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : s_(seed * 2654435761u + 0x9e3779b97f4a7c15ull) {}

  double uniform(double lo, double hi)
  {
    s_ ^= s_ << 13;
    s_ ^= s_ >> 7;
    s_ ^= s_ << 17;
    return lo + (hi - lo) * static_cast<double>(s_ >> 11) * 0x1.0p-53;
  }

  Vec vec(Eigen::Index n, double lo, double hi)
  {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v[i] = uniform(lo, hi);
    }
    return v;
  }

  Mat mat(Eigen::Index r, Eigen::Index c, double lo, double hi)
  {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) {
        m(i, j) = uniform(lo, hi);
      }
    }
    return m;
  }

private:
  std::uint64_t s_;
};

/// Least-squares slope of log(err) against log(h).
inline double loglog_slope(const std::vector<double> & h, const std::vector<double> & err)
{
  const auto n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
