// Copyright 2026 The simplexrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "simplexrank/common.hpp"

namespace simplexrank {

// Stick-breaking map between R^{n-1} and the interior of the n-simplex, with
// the usual shift log(n-1-k) so the zero vector lands on the centroid.  The
// log-Jacobian accumulates log(stick) + log z + log(1-z) per break.

template <typename Scalar>
Scalar softplus(Scalar u) {
  return std::log1p(std::exp(-std::abs(u))) + (u > Scalar(0) ? u : Scalar(0));
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> simplex_from_unconstrained(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, Scalar* log_jacobian = nullptr) {
  const Eigen::Index n = y.size() + 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x(n);
  Scalar stick = Scalar(1);
  Scalar lj = Scalar(0);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    Scalar u = y[k] - std::log(static_cast<Scalar>(n - 1 - k));
    Scalar z = Scalar(1) / (Scalar(1) + std::exp(-u));
    x[k] = stick * z;
    lj += std::log(stick) - softplus(u) - softplus(-u);
    stick -= x[k];
  }
  x[n - 1] = stick;
  if (log_jacobian) *log_jacobian = lj;
  return x;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> unconstrained_from_simplex(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) {
  const Eigen::Index n = x.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(n - 1);
  Scalar stick = Scalar(1);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    Scalar z = x[k] / stick;
    y[k] = std::log(z) - std::log1p(-z) + std::log(static_cast<Scalar>(n - 1 - k));
    stick -= x[k];
  }
  return y;
}

// Pulls a gradient back through the stick-breaking map: given dL/dx, returns
// dL/dy, optionally adding the gradient of the log-Jacobian itself (used when
// the target density includes it).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> simplex_pullback(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& gx, bool with_jacobian) {
  const Eigen::Index n = y.size() + 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z(n - 1), stick(n);
  stick[0] = Scalar(1);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    Scalar u = y[k] - std::log(static_cast<Scalar>(n - 1 - k));
    z[k] = Scalar(1) / (Scalar(1) + std::exp(-u));
    stick[k + 1] = stick[k] * (Scalar(1) - z[k]);
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gy(n - 1);
  Scalar gs = gx[n - 1];  // gradient wrt the running stick after the last break
  for (Eigen::Index k = n - 2; k >= 0; --k) {
    Scalar gz = (gx[k] - gs) * stick[k];
    Scalar gs_next = gx[k] * z[k] + gs * (Scalar(1) - z[k]);
    if (with_jacobian) {
      gz += Scalar(1) / z[k] - Scalar(1) / (Scalar(1) - z[k]);
      if (k > 0) gs_next += Scalar(1) / stick[k];
    }
    gy[k] = gz * z[k] * (Scalar(1) - z[k]);
    gs = gs_next;
  }
  return gy;
}

template <typename Scalar>
Scalar unit_from_unconstrained(Scalar y, Scalar* log_jacobian = nullptr) {
  Scalar x = Scalar(1) / (Scalar(1) + std::exp(-y));
  if (log_jacobian) *log_jacobian = -softplus(y) - softplus(-y);
  return x;
}

template <typename Scalar>
Scalar unconstrained_from_unit(Scalar x) {
  return std::log(x) - std::log1p(-x);
}

template <typename Scalar>
Scalar unit_pullback(Scalar y, Scalar gx, bool with_jacobian) {
  Scalar x = Scalar(1) / (Scalar(1) + std::exp(-y));
  Scalar g = gx * x * (Scalar(1) - x);
  if (with_jacobian) g += Scalar(1) - Scalar(2) * x;
  return g;
}

}  // namespace simplexrank
