// Copyright 2026 The chi-contract Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Test-side reference computations. Everything here works from the raw
// definitions with plain loops and never calls into the library, so it can
// serve as an independent oracle for the optimized code paths.

#ifndef CHICONTRACT_TESTS_ORACLES_H_
#define CHICONTRACT_TESTS_ORACLES_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace chicontract::oracle {

using Matrix = Eigen::MatrixXd;  // channels are m x k, column x is W(.|x)
using Vec = std::vector<double>;

// H(W)_{ij} = sum_y (W(y|2i-1) - W(y|2i)) (W(y|2j-1) - W(y|2j)) / sum_x W(y|x).
inline Matrix DirectH(const Matrix& w) {
  const int half = static_cast<int>(w.cols()) / 2;
  Vec mass(w.rows(), 0.0);
  for (int y = 0; y < w.rows(); ++y) {
    for (int x = 0; x < w.cols(); ++x) mass[y] += w(y, x);
  }
  Matrix h = Matrix::Zero(half, half);
  for (int i = 0; i < half; ++i) {
    for (int j = 0; j < half; ++j) {
      double sum = 0.0;
      for (int y = 0; y < w.rows(); ++y) {
        if (mass[y] == 0.0) continue;
        sum += (w(y, 2 * i) - w(y, 2 * i + 1)) * (w(y, 2 * j) - w(y, 2 * j + 1)) / mass[y];
      }
      h(i, j) = sum;
    }
  }
  return h;
}

inline double Nuclear(const Matrix& h) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().cwiseAbs().sum();
}

inline double FrobeniusSq(const Matrix& h) {
  double s = 0.0;
  for (int i = 0; i < h.rows(); ++i) {
    for (int j = 0; j < h.cols(); ++j) s += h(i, j) * h(i, j);
  }
  return s;
}

// All sign vectors of length d, in lexicographic order.
inline std::vector<std::vector<int>> AllSigns(int d) {
  std::vector<std::vector<int>> out;
  for (uint64_t mask = 0; mask < (uint64_t{1} << d); ++mask) {
    std::vector<int> z(d);
    for (int i = 0; i < d; ++i) z[i] = (mask >> i) & 1 ? 1 : -1;
    out.push_back(z);
  }
  return out;
}

// Parameter vectors z = V y for every sign vector y; V is dim x r.
inline std::vector<Vec> LinearAtoms(const Matrix& v) {
  std::vector<Vec> out;
  for (const auto& y : AllSigns(static_cast<int>(v.cols()))) {
    Vec z(v.rows(), 0.0);
    for (int i = 0; i < v.rows(); ++i) {
      for (int j = 0; j < v.cols(); ++j) z[i] += v(i, j) * y[j];
    }
    out.push_back(z);
  }
  return out;
}

// p_z(2i-1) = q(2i-1)(1 + s z_i), p_z(2i) = q(2i)(1 - s z_i).
template <typename Z>
Vec Member(const Vec& q, double s, const std::vector<Z>& z) {
  Vec p(q.size());
  for (size_t i = 0; i < z.size(); ++i) {
    p[2 * i] = q[2 * i] * (1.0 + s * z[i]);
    p[2 * i + 1] = q[2 * i + 1] * (1.0 - s * z[i]);
  }
  return p;
}

inline Vec Apply(const Matrix& w, const Vec& p) {
  Vec out(w.rows(), 0.0);
  for (int y = 0; y < w.rows(); ++y) {
    for (int x = 0; x < w.cols(); ++x) out[y] += w(y, x) * p[x];
  }
  return out;
}

struct Mixture {
  double chi2 = 0.0;
  double tv = 0.0;
};

// Enumerates every message sequence (y_1..y_n) with W_j applied to player j.
// An empty `channels` with n players means raw samples. The parameter is
// uniform over `atoms`, or over all sign vectors when none are given.
inline Mixture BruteMixture(const std::vector<Matrix>& channels, int n, const Vec& q,
                            double s, std::vector<Vec> atoms = {}) {
  const int k = static_cast<int>(q.size());
  std::vector<Matrix> ws = channels;
  if (ws.empty()) ws.assign(n, Matrix::Identity(k, k));
  if (atoms.empty()) atoms = LinearAtoms(Matrix::Identity(k / 2, k / 2));
  const std::vector<Vec>& zs = atoms;
  std::vector<Vec> null_msgs;
  std::vector<std::vector<Vec>> alt_msgs(zs.size());
  for (const Matrix& w : ws) null_msgs.push_back(Apply(w, q));
  for (size_t a = 0; a < zs.size(); ++a) {
    const Vec p = Member(q, s, zs[a]);
    for (const Matrix& w : ws) alt_msgs[a].push_back(Apply(w, p));
  }
  Mixture out;
  std::vector<int> y(ws.size(), 0);
  while (true) {
    double p0 = 1.0;
    for (size_t j = 0; j < ws.size(); ++j) p0 *= null_msgs[j][y[j]];
    double p1 = 0.0;
    for (size_t a = 0; a < zs.size(); ++a) {
      double term = 1.0;
      for (size_t j = 0; j < ws.size(); ++j) term *= alt_msgs[a][j][y[j]];
      p1 += term / zs.size();
    }
    out.tv += 0.5 * std::abs(p1 - p0);
    if (p0 > 0.0) out.chi2 += (p1 - p0) * (p1 - p0) / p0;
    size_t j = 0;
    while (j < ws.size() && ++y[j] == ws[j].rows()) y[j++] = 0;
    if (j == ws.size()) break;
  }
  return out;
}

// log E_{Z,Z'} exp(sum_j <W_j(p_Z - q), W_j(p_Z' - q)>_{1/W_j q}) over all
// pairs of sign vectors.
inline double BruteDecoupled(const std::vector<Matrix>& channels, const Vec& q, double s) {
  const auto zs = AllSigns(static_cast<int>(q.size()) / 2);
  std::vector<std::vector<Vec>> diffs(zs.size());
  std::vector<Vec> base;
  for (const Matrix& w : channels) base.push_back(Apply(w, q));
  for (size_t a = 0; a < zs.size(); ++a) {
    const Vec p = Member(q, s, zs[a]);
    for (size_t j = 0; j < channels.size(); ++j) {
      Vec d = Apply(channels[j], p);
      for (size_t y = 0; y < d.size(); ++y) d[y] -= base[j][y];
      diffs[a].push_back(d);
    }
  }
  double sum = 0.0;
  for (size_t a = 0; a < zs.size(); ++a) {
    for (size_t b = 0; b < zs.size(); ++b) {
      double e = 0.0;
      for (size_t j = 0; j < channels.size(); ++j) {
        for (size_t y = 0; y < base[j].size(); ++y) {
          if (base[j][y] > 0.0) e += diffs[a][j][y] * diffs[b][j][y] / base[j][y];
        }
      }
      sum += std::exp(e);
    }
  }
  return std::log(sum / (static_cast<double>(zs.size()) * zs.size()));
}

// log E exp(lambda Y^T M Y') with Y, Y' independent Rademacher vectors,
// integrating Y' analytically: E_{Y'} exp(lambda <M^T Y, Y'>) = prod cosh.
inline double ChaosLogMgf(const Matrix& m, double lambda) {
  const int d = static_cast<int>(m.rows());
  double sum = 0.0;
  for (const auto& y : AllSigns(d)) {
    double prod = 1.0;
    for (int j = 0; j < d; ++j) {
      double v = 0.0;
      for (int i = 0; i < d; ++i) v += m(i, j) * y[i];
      prod *= std::cosh(lambda * v);
    }
    sum += prod;
  }
  return std::log(sum / std::ldexp(1.0, d));
}

// Column-stochastic m x k matrix with independent exponential weights.
inline Matrix RandomStochastic(int m, int k, std::mt19937_64& gen) {
  std::exponential_distribution<double> exp1(1.0);
  Matrix w(m, k);
  for (int x = 0; x < k; ++x) {
    double total = 0.0;
    for (int y = 0; y < m; ++y) total += (w(y, x) = exp1(gen));
    for (int y = 0; y < m; ++y) w(y, x) /= total;
  }
  return w;
}

// A random rho-LDP channel: a convex mix of k-ary randomized response
// followed by random deterministic relabelings onto m outputs. Both steps
// preserve the likelihood-ratio bound.
inline Matrix RandomLdp(int k, int m, double rho, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> pick(0, m - 1);
  std::exponential_distribution<double> exp1(1.0);
  const double e = std::exp(rho);
  Matrix rr = Matrix::Constant(k, k, 1.0 / (e + k - 1));
  rr.diagonal().setConstant(e / (e + k - 1));
  Matrix w = Matrix::Zero(m, k);
  double total = 0.0;
  for (int part = 0; part < 3; ++part) {
    const double weight = exp1(gen);
    total += weight;
    Matrix relabel = Matrix::Zero(m, k);
    for (int x = 0; x < k; ++x) relabel(pick(gen), x) = 1.0;
    w += weight * relabel * rr;
  }
  return w / total;
}

}  // namespace chicontract::oracle

#endif  // CHICONTRACT_TESTS_ORACLES_H_
