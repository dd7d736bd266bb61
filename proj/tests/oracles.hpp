// Copyright 2026 The gpformation Authors
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

// Independent reference implementations used only by the tests. They share
// no code with the library: explicit loops, LU solves and brute force.

#ifndef GPFORMATION_TESTS_ORACLES_HPP_
#define GPFORMATION_TESTS_ORACLES_HPP_

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double SeKernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sf2,
                       const Eigen::VectorXd& ls) {
  double r2 = 0.0;
  for (Eigen::Index l = 0; l < a.size(); ++l) {
    const double t = (a[l] - b[l]) / ls[l];
    r2 += t * t;
  }
  return sf2 * std::exp(-0.5 * r2);
}

inline Eigen::MatrixXd Gram(const Eigen::MatrixXd& x, double sf2, const Eigen::VectorXd& ls,
                            double noise) {
  const Eigen::Index m = x.rows();
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      k(a, b) = SeKernel(x.row(a).transpose(), x.row(b).transpose(), sf2, ls);
    }
    k(a, a) += noise;
  }
  return k;
}

struct Posterior {
  Eigen::VectorXd mean;
  double variance = 0.0;
};

// mu = k*^T (K + s2 I)^-1 Y, var = k** - k*^T (K + s2 I)^-1 k*, via full-pivot LU.
inline Posterior DensePosterior(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double sf2,
                                const Eigen::VectorXd& ls, double noise,
                                const Eigen::VectorXd& q) {
  const Eigen::MatrixXd k = Gram(x, sf2, ls, noise);
  Eigen::VectorXd ks(x.rows());
  for (Eigen::Index a = 0; a < x.rows(); ++a) ks[a] = SeKernel(x.row(a).transpose(), q, sf2, ls);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
  Posterior post;
  post.mean = (lu.solve(y)).transpose() * ks;
  post.variance = sf2 - ks.dot(lu.solve(ks));
  return post;
}

// Sum over outputs of the Gaussian log density, determinant from LU.
inline double DenseLml(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double sf2,
                       const Eigen::VectorXd& ls, double noise) {
  const Eigen::MatrixXd k = Gram(x, sf2, ls, noise);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
  const double logdet = std::log(lu.determinant());
  const double m = static_cast<double>(x.rows());
  double total = 0.0;
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    const Eigen::VectorXd col = y.col(c);
    total += -0.5 * col.dot(lu.solve(col)) - 0.5 * logdet - 0.5 * m * std::log(2.0 * M_PI);
  }
  return total;
}

// max over subsets S of size k of 1/2 log det(I + K_S / noise), exhaustively.
inline double ExactInformationGain(const Eigen::MatrixXd& grid, double sf2,
                                   const Eigen::VectorXd& ls, double noise, int k) {
  const int n = static_cast<int>(grid.rows());
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    Eigen::MatrixXd sub(k, grid.cols());
    int r = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) sub.row(r++) = grid.row(i);
    }
    const Eigen::MatrixXd a =
        Eigen::MatrixXd::Identity(k, k) + Gram(sub, sf2, ls, 0.0) / noise;
    best = std::max(best, 0.5 * std::log(a.determinant()));
  }
  return best;
}

// Squared edge lengths ell_G(p).
inline Eigen::VectorXd SquaredLengths(const std::vector<std::pair<int, int>>& edges,
                                      const Eigen::VectorXd& p, int dim) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double diff = p[edges[k].first * dim + a] - p[edges[k].second * dim + a];
      s += diff * diff;
    }
    out[static_cast<Eigen::Index>(k)] = s;
  }
  return out;
}

// Central-difference Jacobian of any vector function.
template <typename Fn>
Eigen::MatrixXd CentralJacobian(Fn&& f, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return jac;
}

inline int SvdRank(const Eigen::MatrixXd& m, double rel_tol) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s[i] > rel_tol * s[0];
  return rank;
}

}  // namespace oracle

#endif  // GPFORMATION_TESTS_ORACLES_HPP_
