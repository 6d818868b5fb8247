// Copyright 2026 The anodet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace anodet::numerics {
namespace {

constexpr double kLn10 = 2.302585092994045684;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(1 - e^v) for v <= 0.
double log1m_exp(double v) {
  if (v > -0.6931471805599453) return std::log(-std::expm1(v));
  return std::log1p(-std::exp(v));
}

double log_gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  return -x + a * std::log(x) - std::lgamma(a) + std::log(sum);
}

double log_gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return -x + a * std::log(x) - std::lgamma(a) + std::log(h);
}

double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double log_beta_front(double a, double b, double x) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
         a * std::log(x) + b * std::log1p(-x);
}

std::string describe(const char* what, double v) {
  std::ostringstream os;
  os << what << " (got " << v << ")";
  return os.str();
}

}  // namespace

double LogProb::linear() const { return std::pow(10.0, value); }

double log_gamma_q(double a, double x) {
  if (!(a > 0.0)) fail(ErrorKind::Domain, describe("incomplete gamma needs a > 0", a));
  if (!(x >= 0.0)) fail(ErrorKind::Domain, describe("incomplete gamma needs x >= 0", x));
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return kNegInf;
  if (x < a + 1.0) return log1m_exp(log_gamma_p_series(a, x));
  return log_gamma_q_fraction(a, x);
}

double log_beta_inc(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) fail(ErrorKind::Domain, "incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::Domain, describe("incomplete beta needs x in [0, 1]", x));
  if (x == 0.0) return kNegInf;
  if (x == 1.0) return 0.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return log_beta_front(a, b, x) + std::log(beta_fraction(a, b, x)) - std::log(a);
  }
  const double complement =
      log_beta_front(b, a, 1.0 - x) + std::log(beta_fraction(b, a, 1.0 - x)) - std::log(b);
  return log1m_exp(complement);
}

LogProb chi2_sf(double d, int dof) {
  if (dof < 1) fail(ErrorKind::Domain, describe("chi2 needs dof >= 1", dof));
  if (!(d >= 0.0)) fail(ErrorKind::Domain, describe("chi2 needs d >= 0", d));
  return {log_gamma_q(0.5 * dof, 0.5 * d) / kLn10};
}

double chi2_isf(double p, int dof) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::Domain, describe("chi2_isf needs p in (0, 1)", p));
  if (dof < 1) fail(ErrorKind::Domain, describe("chi2 needs dof >= 1", dof));
  const double target = std::log10(p);
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(dof));
  while (chi2_sf(hi, dof).value > target) {
    lo = hi;
    hi *= 2.0;
  }
  // Invariant: sf(lo) > target >= sf(hi).
  while (hi - lo > 1e-12 * std::min(1.0, hi)) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (chi2_sf(mid, dof).value > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

LogProb binomial_tail(std::int64_t n, std::int64_t k, double p) {
  if (n < 0) fail(ErrorKind::Domain, describe("binomial needs n >= 0", static_cast<double>(n)));
  if (k < 0 || k > n) {
    std::ostringstream os;
    os << "binomial tail needs 0 <= k <= n (k=" << k << ", n=" << n << ")";
    fail(ErrorKind::Domain, os.str());
  }
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::Domain, describe("binomial needs p in [0, 1]", p));
  if (k == 0 || p == 1.0) return {0.0};
  if (p == 0.0) return {kNegInf};

  if (n > 10000) {
    // P(X >= k) = I_p(k, n - k + 1)
    return {log_beta_inc(static_cast<double>(k), static_cast<double>(n - k + 1), p) / kLn10};
  }

  const double nn = static_cast<double>(n);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lfn = std::lgamma(nn + 1.0);
  auto log_pmf = [&](std::int64_t j) {
    const double jj = static_cast<double>(j);
    return lfn - std::lgamma(jj + 1.0) - std::lgamma(nn - jj + 1.0) + jj * lp + (nn - jj) * lq;
  };

  // Terms increase up to the mode and decrease after it; sum in log space
  // relative to the largest term.
  const double mode = std::floor((nn + 1.0) * p);
  const std::int64_t peak = std::max<std::int64_t>(k, std::min<std::int64_t>(n, static_cast<std::int64_t>(mode)));
  const double top = log_pmf(peak);
  double sum = 0.0;
  for (std::int64_t j = k; j <= n; ++j) {
    const double rel = log_pmf(j) - top;
    if (j > peak && rel < -80.0) break;
    sum += std::exp(rel);
  }
  return {(top + std::log(sum)) / kLn10};
}

SpectralDecomposition symmetric_eig(const Eigen::MatrixXd& c) {
  if (c.rows() != c.cols()) fail(ErrorKind::Contract, "symmetric_eig needs a square matrix");
  if (c.rows() == 0) fail(ErrorKind::Contract, "symmetric_eig needs a non-empty matrix");
  if (c.rows() > 4096) fail(ErrorKind::Contract, "symmetric_eig supports n <= 4096");
  if (!c.allFinite()) fail(ErrorKind::Contract, "symmetric_eig input has non-finite entries");
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  const double asym = (c - c.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    fail(ErrorKind::Contract, describe("symmetric_eig input is not symmetric", asym));
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success) fail(ErrorKind::Contract, "eigensolver did not converge");

  const Eigen::Index n = c.rows();
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < n; ++j) {
    auto col = out.eigenvectors.col(j);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::fabs(col(i)) > 1e-12) {
        if (col(i) < 0.0) col = -col;
        break;
      }
    }
  }
  return out;
}

double log10_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(b) && b < 0) return a;
  return a + std::log10(1.0 + std::pow(10.0, b - a));
}

}  // namespace anodet::numerics
