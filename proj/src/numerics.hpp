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

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace anodet::numerics {

/// log10 of a probability or of an NFA. Probabilities map to values <= 0;
/// an impossible event is -infinity.
struct LogProb {
  double value = 0.0;

  double linear() const;
  friend bool operator<(LogProb a, LogProb b) { return a.value < b.value; }
  friend bool operator==(LogProb a, LogProb b) = default;
};

/// Eigenpairs of a symmetric matrix, sorted by decreasing eigenvalue.
/// Column i of `eigenvectors` pairs with `eigenvalues[i]`; the first nonzero
/// component of every column is positive.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// Natural log of the upper regularized incomplete gamma Q(a, x).
/// Series for x < a + 1, Lentz continued fraction otherwise.
double log_gamma_q(double a, double x);

/// Natural log of the regularized incomplete beta I_x(a, b).
double log_beta_inc(double a, double b, double x);

/// log10 P(X > d) for X ~ chi2(dof).
LogProb chi2_sf(double d, int dof);

/// Smallest d with chi2_sf(d, dof) <= log10(p), found by bisection.
double chi2_isf(double p, int dof);

/// log10 P(X >= k) for X ~ Binomial(n, p).
LogProb binomial_tail(std::int64_t n, std::int64_t k, double p);

/// Full decomposition of a symmetric matrix. Throws Contract when the input
/// is not symmetric within 1e-10 relative to its largest entry.
SpectralDecomposition symmetric_eig(const Eigen::MatrixXd& c);

/// log10(10^a + 10^b) without overflow.
double log10_add(double a, double b);

}  // namespace anodet::numerics
