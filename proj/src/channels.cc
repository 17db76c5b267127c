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

#include "chicontract/channels.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace chicontract {
namespace {

constexpr double kLdpRelativeSlack = 1e-12;

absl::Status CheckAlphabet(int k) {
  if (k < 2) return absl::InvalidArgumentError(absl::StrCat("invalid k=", k));
  return absl::OkStatus();
}

absl::Status CheckEven(int k) {
  if (absl::Status s = CheckAlphabet(k); !s.ok()) return s;
  if (k % 2 != 0) {
    return absl::InvalidArgumentError(absl::StrCat("k must be even, got ", k));
  }
  return absl::OkStatus();
}

Eigen::MatrixXd NormalizeColumns(Eigen::MatrixXd w) {
  for (Eigen::Index x = 0; x < w.cols(); ++x) w.col(x) /= w.col(x).sum();
  return w;
}

}  // namespace

std::string ConstraintSpec::ToString() const {
  if (kind == Kind::kCommunication) return absl::StrCat("comm(bits=", bits, ")");
  return absl::StrCat("ldp(rho=", rho, ")");
}

absl::Status ValidateConstraint(const ConstraintSpec& spec) {
  if (spec.kind == ConstraintSpec::Kind::kCommunication) {
    if (spec.bits < 1 || spec.bits > 30) {
      return absl::InvalidArgumentError(
          absl::StrCat("bits must be in [1, 30], got ", spec.bits));
    }
  } else if (!(spec.rho > 0.0) || !std::isfinite(spec.rho)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rho must be positive, got ", spec.rho));
  }
  return absl::OkStatus();
}

absl::StatusOr<Channel> IdentityChannel(int k) {
  if (absl::Status s = CheckAlphabet(k); !s.ok()) return s;
  return Channel::Create(Eigen::MatrixXd::Identity(k, k));
}

absl::StatusOr<Channel> ConstantChannel(int k, int m) {
  if (absl::Status s = CheckAlphabet(k); !s.ok()) return s;
  if (m < 1) return absl::InvalidArgumentError("constant channel needs m >= 1");
  return Channel::Create(Eigen::MatrixXd::Constant(m, k, 1.0 / m));
}

absl::StatusOr<Channel> ParityChannel(int k) {
  if (absl::Status s = CheckEven(k); !s.ok()) return s;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, k);
  for (int x = 0; x < k; ++x) w((x + 1) % 2, x) = 1.0;
  return Channel::Create(std::move(w));
}

absl::StatusOr<Channel> QuantizerChannel(int k, int bits) {
  if (absl::Status s = CheckAlphabet(k); !s.ok()) return s;
  if (bits < 1 || bits > 20) {
    return absl::InvalidArgumentError(absl::StrCat("invalid bits=", bits));
  }
  const int64_t m = int64_t{1} << bits;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, k);
  for (int x = 0; x < k; ++x) w(static_cast<Eigen::Index>(x * m / k), x) = 1.0;
  return Channel::Create(std::move(w));
}

absl::StatusOr<Channel> RandomizedResponseChannel(int k, double rho) {
  if (absl::Status s = CheckAlphabet(k); !s.ok()) return s;
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    return absl::InvalidArgumentError(absl::StrCat("invalid rho=", rho));
  }
  const double e = std::exp(rho);
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(k, k, 1.0 / (e + k - 1));
  w.diagonal().setConstant(e / (e + k - 1));
  return Channel::Create(std::move(w));
}

absl::StatusOr<Channel> PairPartitionChannel(std::span<const int> signs) {
  const int k = 2 * static_cast<int>(signs.size());
  if (absl::Status s = CheckEven(k); !s.ok()) return s;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, k);
  for (size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) {
      return absl::InvalidArgumentError(
          absl::StrCat("pair-partition signs must be +1 or -1, got ", signs[i]));
    }
    const int odd_output = signs[i] > 0 ? 1 : 0;
    w(odd_output, 2 * i) = 1.0;
    w(1 - odd_output, 2 * i + 1) = 1.0;
  }
  return Channel::Create(std::move(w));
}

absl::StatusOr<Channel> StandardChannel(std::string_view name, int k,
                                        double param) {
  if (name == "identity") return IdentityChannel(k);
  if (name == "constant") {
    return ConstantChannel(k, param >= 1.0 ? static_cast<int>(param) : 2);
  }
  if (name == "parity") return ParityChannel(k);
  if (name == "quantizer") return QuantizerChannel(k, static_cast<int>(param));
  if (name == "randomized_response" || name == "rr") {
    return RandomizedResponseChannel(k, param);
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown channel '", std::string(name), "'"));
}

LdpCheck CheckLdp(const Channel& w, double rho) {
  const Eigen::MatrixXd& mat = w.matrix();
  double worst = 1.0;
  for (Eigen::Index y = 0; y < mat.rows(); ++y) {
    const double hi = mat.row(y).maxCoeff();
    const double lo = mat.row(y).minCoeff();
    if (hi == 0.0) continue;  // 0/0 everywhere
    if (lo == 0.0) {
      worst = kInfinity;
      break;
    }
    worst = std::max(worst, hi / lo);
  }
  return {worst <= std::exp(rho) * (1.0 + kLdpRelativeSlack), worst};
}

bool CheckComm(const Channel& w, int bits) {
  if (bits >= 30) return true;
  return w.ReachableOutputs() <= (1 << bits);
}

bool SatisfiesConstraint(const Channel& w, const ConstraintSpec& spec) {
  if (spec.kind == ConstraintSpec::Kind::kCommunication) {
    return CheckComm(w, spec.bits);
  }
  return CheckLdp(w, spec.rho).satisfied;
}

absl::StatusOr<Channel> RandomChannel(int k, int m, CounterRng& rng) {
  if (absl::Status s = CheckAlphabet(k); !s.ok()) return s;
  if (m < 1) return absl::InvalidArgumentError("random channel needs m >= 1");
  // Temperatures from 0.05 (peaked) to 20 (flat), log-uniformly.
  const double temperature = std::exp(std::log(0.05) + rng.Uniform() * std::log(400.0));
  Eigen::MatrixXd w(m, k);
  for (int x = 0; x < k; ++x) {
    for (int y = 0; y < m; ++y) {
      // Exponential(1) scores sharpened by the temperature.
      const double score = -std::log1p(-rng.Uniform());
      w(y, x) = std::pow(score, 1.0 / temperature);
    }
  }
  return Channel::Create(NormalizeColumns(std::move(w)));
}

absl::StatusOr<Channel> RandomCommChannel(int k, int bits, CounterRng& rng) {
  if (bits < 1 || bits > 12) {
    return absl::InvalidArgumentError(absl::StrCat("invalid bits=", bits));
  }
  return RandomChannel(k, 1 << bits, rng);
}

absl::StatusOr<Channel> RandomLdpChannel(int k, int m, double rho,
                                         CounterRng& rng) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    return absl::InvalidArgumentError(absl::StrCat("invalid rho=", rho));
  }
  absl::StatusOr<Channel> base = RandomChannel(k, m, rng);
  if (!base.ok()) return base.status();
  Eigen::MatrixXd w = base->matrix();
  // Clip to a band just inside e^rho; products formed later can round upward.
  const double target = rho * (1.0 - 1e-9);
  const double band = std::exp(target);
  for (int iter = 0; iter < 100; ++iter) {
    for (Eigen::Index y = 0; y < w.rows(); ++y) {
      const double lo = std::max(w.row(y).minCoeff(), 1e-300);
      w.row(y) = w.row(y).cwiseMax(lo).cwiseMin(lo * band);
    }
    w = NormalizeColumns(std::move(w));
    absl::StatusOr<Channel> candidate = Channel::Create(w);
    if (!candidate.ok()) return candidate.status();
    if (CheckLdp(*candidate, target).satisfied) return candidate;
  }
  // Shrink towards the constant channel; theta = 0 always satisfies the
  // constraint.
  const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(m, k, 1.0 / m);
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    absl::StatusOr<Channel> candidate = Channel::Create(mid * w + (1.0 - mid) * flat);
    if (candidate.ok() && CheckLdp(*candidate, target).satisfied) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return Channel::Create(lo * w + (1.0 - lo) * flat);
}

}  // namespace chicontract
