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

#include "chicontract/c_api.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "chicontract/adversary.h"
#include "chicontract/bounds.h"
#include "chicontract/channels.h"
#include "chicontract/contraction.h"
#include "chicontract/fluctuation.h"
#include "chicontract/io.h"
#include "chicontract/perturbation.h"
#include "chicontract/rng.h"
#include "chicontract/simulation.h"
#include "chicontract/verify.h"

struct cc_channel {
  chicontract::Channel value;
};
struct cc_family {
  chicontract::PerturbedFamily value;
};
struct cc_hmatrix {
  chicontract::HMatrix value;
};

namespace {

using chicontract::Json;

thread_local std::string last_error;

cc_status_t Fail(const absl::Status& status) {
  last_error = std::string(status.message());
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
      return CC_INVALID_ARGUMENT;
    case absl::StatusCode::kOutOfRange:
      return CC_OUT_OF_RANGE;
    case absl::StatusCode::kFailedPrecondition:
      return CC_FAILED_PRECONDITION;
    case absl::StatusCode::kResourceExhausted:
      return CC_RESOURCE_EXHAUSTED;
    case absl::StatusCode::kUnimplemented:
      return CC_UNIMPLEMENTED;
    default:
      return CC_INTERNAL;
  }
}

cc_status_t Invalid(std::string message) {
  last_error = std::move(message);
  return CC_INVALID_ARGUMENT;
}

cc_status_t Ok() {
  last_error.clear();
  return CC_OK;
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cc_status_t Emit(const std::string& s, char** out) {
  if (out == nullptr) return Invalid("output pointer is NULL");
  *out = CopyString(s);
  if (*out == nullptr) {
    last_error = "out of memory";
    return CC_RESOURCE_EXHAUSTED;
  }
  return Ok();
}

cc_status_t EmitJson(const Json& j, char** out) { return Emit(j.dump(2), out); }

// Runs `body`, turning escaped exceptions into CC_INTERNAL.
template <typename F>
cc_status_t Guard(F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    last_error = absl::StrCat("internal error: ", e.what());
  } catch (...) {
    last_error = "internal error";
  }
  return CC_INTERNAL;
}

absl::StatusOr<std::vector<chicontract::Channel>> Gather(
    const cc_channel_t* const* channels, size_t count) {
  std::vector<chicontract::Channel> out;
  if (count > 0 && channels == nullptr) {
    return absl::InvalidArgumentError("channel array is NULL");
  }
  for (size_t i = 0; i < count; ++i) {
    if (channels[i] == nullptr) {
      return absl::InvalidArgumentError(absl::StrCat("channel ", i, " is NULL"));
    }
    out.push_back(channels[i]->value);
  }
  return out;
}

absl::StatusOr<Json> ParseOptional(const char* json) {
  if (json == nullptr || json[0] == '\0') return Json::object();
  absl::StatusOr<Json> j = chicontract::ParseJson(json);
  if (!j.ok()) return j.status();
  if (!j->is_object()) return absl::InvalidArgumentError("options must be a JSON object");
  return j;
}

absl::StatusOr<chicontract::FluctuationOptions> FluctuationOptionsFromJson(
    const Json& j) {
  chicontract::FluctuationOptions options;
  try {
    if (j.contains("mc_samples")) options.mc_samples = j.at("mc_samples").get<int64_t>();
    if (j.contains("seed")) options.seed = j.at("seed").get<uint64_t>();
    if (j.contains("method")) {
      const std::string m = j.at("method").get<std::string>();
      if (m == "closed_form") {
        options.method = chicontract::Method::kClosedForm;
      } else if (m == "exhaustive") {
        options.method = chicontract::Method::kExhaustive;
      } else if (m == "monte_carlo") {
        options.method = chicontract::Method::kMonteCarlo;
      } else {
        return absl::InvalidArgumentError(absl::StrCat("unknown method ", m));
      }
    }
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(e.what());
  }
  return options;
}

cc_status_t WrapChannel(absl::StatusOr<chicontract::Channel> w, cc_channel_t** out) {
  if (out == nullptr) return Invalid("output pointer is NULL");
  if (!w.ok()) return Fail(w.status());
  *out = new cc_channel{*std::move(w)};
  return Ok();
}

cc_status_t WrapFamily(absl::StatusOr<chicontract::PerturbedFamily> f, cc_family_t** out) {
  if (out == nullptr) return Invalid("output pointer is NULL");
  if (!f.ok()) return Fail(f.status());
  *out = new cc_family{*std::move(f)};
  return Ok();
}

cc_status_t WrapHMatrix(absl::StatusOr<chicontract::HMatrix> h, cc_hmatrix_t** out) {
  if (out == nullptr) return Invalid("output pointer is NULL");
  if (!h.ok()) return Fail(h.status());
  *out = new cc_hmatrix{*std::move(h)};
  return Ok();
}

}  // namespace

extern "C" {

const char* cc_last_error(void) { return last_error.c_str(); }

const char* cc_status_name(cc_status_t status) {
  switch (status) {
    case CC_OK:
      return "OK";
    case CC_INVALID_ARGUMENT:
      return "INVALID_ARGUMENT";
    case CC_OUT_OF_RANGE:
      return "OUT_OF_RANGE";
    case CC_FAILED_PRECONDITION:
      return "FAILED_PRECONDITION";
    case CC_RESOURCE_EXHAUSTED:
      return "RESOURCE_EXHAUSTED";
    case CC_UNIMPLEMENTED:
      return "UNIMPLEMENTED";
    case CC_INTERNAL:
      return "INTERNAL";
  }
  return "UNKNOWN";
}

void cc_free_string(char* s) { std::free(s); }

const char* cc_version(void) { return "0.1.0"; }

cc_status_t cc_channel_from_json(const char* json, cc_channel_t** out) {
  return Guard([&] {
    if (json == nullptr) return Invalid("json is NULL");
    absl::StatusOr<Json> j = chicontract::ParseJson(json);
    if (!j.ok()) return Fail(j.status());
    return WrapChannel(chicontract::ChannelFromJson(*j), out);
  });
}

cc_status_t cc_channel_to_json(const cc_channel_t* w, char** out) {
  return Guard([&] {
    if (w == nullptr) return Invalid("channel is NULL");
    return EmitJson(chicontract::ToJson(w->value), out);
  });
}

cc_status_t cc_channel_standard(const char* name, int k, double param,
                                cc_channel_t** out) {
  return Guard([&] {
    if (name == nullptr) return Invalid("name is NULL");
    return WrapChannel(chicontract::StandardChannel(name, k, param), out);
  });
}

cc_status_t cc_channel_pair_partition(const int* signs, size_t count,
                                      cc_channel_t** out) {
  return Guard([&] {
    if (signs == nullptr && count > 0) return Invalid("signs is NULL");
    return WrapChannel(chicontract::PairPartitionChannel({signs, count}), out);
  });
}

cc_status_t cc_channel_random_comm(int k, int bits, uint64_t seed, cc_channel_t** out) {
  return Guard([&] {
    chicontract::CounterRng rng = chicontract::CounterRng::ForTrial(
        seed, 0, 0, chicontract::StreamPurpose::kChannelSampler);
    return WrapChannel(chicontract::RandomCommChannel(k, bits, rng), out);
  });
}

cc_status_t cc_channel_random_ldp(int k, int m, double rho, uint64_t seed,
                                  cc_channel_t** out) {
  return Guard([&] {
    chicontract::CounterRng rng = chicontract::CounterRng::ForTrial(
        seed, 0, 0, chicontract::StreamPurpose::kChannelSampler);
    return WrapChannel(chicontract::RandomLdpChannel(k, m, rho, rng), out);
  });
}

int cc_channel_k(const cc_channel_t* w) { return w == nullptr ? -1 : w->value.k(); }
int cc_channel_m(const cc_channel_t* w) { return w == nullptr ? -1 : w->value.m(); }

cc_status_t cc_channel_check(const cc_channel_t* w, int bits, double rho,
                             int* satisfied, char** report_json) {
  return Guard([&] {
    if (w == nullptr || satisfied == nullptr) return Invalid("NULL argument");
    if ((bits > 0) == (rho > 0.0)) {
      return Invalid("give exactly one of a bit budget or a privacy level");
    }
    const chicontract::ConstraintSpec spec =
        bits > 0 ? chicontract::ConstraintSpec::Communication(bits)
                 : chicontract::ConstraintSpec::Privacy(rho);
    if (absl::Status s = chicontract::ValidateConstraint(spec); !s.ok()) return Fail(s);
    const bool ok = chicontract::SatisfiesConstraint(w->value, spec);
    *satisfied = ok ? 1 : 0;
    Json report{{"constraint", spec.ToString()}, {"satisfied", ok}};
    if (spec.kind == chicontract::ConstraintSpec::Kind::kPrivacy) {
      report["ldp"] = chicontract::ToJson(chicontract::CheckLdp(w->value, rho));
    } else {
      report["reachable_outputs"] = w->value.ReachableOutputs();
    }
    if (ok && w->value.k() % 2 == 0) {
      absl::StatusOr<chicontract::NormBoundCheck> norms =
          chicontract::VerifyNormBounds(w->value, spec);
      if (!norms.ok()) return Fail(norms.status());
      report["norm_bounds"] = chicontract::ToJson(*norms);
    }
    if (report_json == nullptr) return Ok();
    return EmitJson(report, report_json);
  });
}

void cc_channel_free(cc_channel_t* w) { delete w; }

cc_status_t cc_hmatrix_compute(const cc_channel_t* w, cc_hmatrix_t** out) {
  return Guard([&] {
    if (w == nullptr) return Invalid("channel is NULL");
    return WrapHMatrix(chicontract::ComputeHMatrix(w->value), out);
  });
}

cc_status_t cc_hmatrix_average(const cc_channel_t* const* channels, size_t count,
                               cc_hmatrix_t** out) {
  return Guard([&] {
    absl::StatusOr<std::vector<chicontract::Channel>> ws = Gather(channels, count);
    if (!ws.ok()) return Fail(ws.status());
    return WrapHMatrix(chicontract::AverageHMatrix(*ws), out);
  });
}

double cc_hmatrix_nuclear(const cc_hmatrix_t* h) {
  return h == nullptr ? std::nan("") : h->value.nuclear();
}
double cc_hmatrix_frobenius_sq(const cc_hmatrix_t* h) {
  return h == nullptr ? std::nan("") : h->value.frobenius_sq();
}
double cc_hmatrix_spectral_radius(const cc_hmatrix_t* h) {
  return h == nullptr ? std::nan("") : h->value.spectral_radius();
}

cc_status_t cc_hmatrix_to_json(const cc_hmatrix_t* h, char** out) {
  return Guard([&] {
    if (h == nullptr) return Invalid("matrix is NULL");
    return EmitJson(chicontract::ToJson(h->value), out);
  });
}

cc_status_t cc_chaos_mgf(const cc_hmatrix_t* h, double lambda, double* exact_log_mgf,
                         double* bound, int* valid) {
  return Guard([&] {
    if (h == nullptr || exact_log_mgf == nullptr || bound == nullptr || valid == nullptr) {
      return Invalid("NULL argument");
    }
    absl::StatusOr<chicontract::ChaosMgf> mgf = chicontract::ChaosMgfBound(h->value, lambda);
    if (!mgf.ok()) return Fail(mgf.status());
    *exact_log_mgf = mgf->exact_log_mgf.value_or(std::nan(""));
    *bound = mgf->bound;
    *valid = mgf->valid ? 1 : 0;
    return Ok();
  });
}

void cc_hmatrix_free(cc_hmatrix_t* h) { delete h; }

cc_status_t cc_family_paninski(int k, double eps, cc_family_t** out) {
  return Guard([&] {
    absl::StatusOr<chicontract::PerturbedFamily> f = chicontract::PaninskiFamily(k, eps);
    if (f.ok()) f->set_id(absl::StrCat("paninski(k=", k, ",eps=", eps, ")"));
    return WrapFamily(std::move(f), out);
  });
}

cc_status_t cc_family_from_json(const char* json, cc_family_t** out) {
  return Guard([&] {
    if (json == nullptr) return Invalid("json is NULL");
    absl::StatusOr<Json> j = chicontract::ParseJson(json);
    if (!j.ok()) return Fail(j.status());
    return WrapFamily(chicontract::FamilyFromJson(*j), out);
  });
}

cc_status_t cc_family_to_json(const cc_family_t* f, char** out) {
  return Guard([&] {
    if (f == nullptr) return Invalid("family is NULL");
    absl::StatusOr<Json> j = chicontract::ToJson(f->value);
    if (!j.ok()) return Fail(j.status());
    return EmitJson(*j, out);
  });
}

int cc_family_k(const cc_family_t* f) { return f == nullptr ? -1 : f->value.k(); }

void cc_family_free(cc_family_t* f) { delete f; }

cc_status_t cc_fluctuation(const cc_family_t* f, const cc_channel_t* const* channels,
                           size_t count, int n, const char* kind,
                           const char* options_json, char** report_json) {
  return Guard([&] {
    if (f == nullptr || kind == nullptr) return Invalid("NULL argument");
    absl::StatusOr<std::vector<chicontract::Channel>> ws = Gather(channels, count);
    if (!ws.ok()) return Fail(ws.status());
    absl::StatusOr<Json> opts = ParseOptional(options_json);
    if (!opts.ok()) return Fail(opts.status());
    absl::StatusOr<chicontract::FluctuationOptions> options =
        FluctuationOptionsFromJson(*opts);
    if (!options.ok()) return Fail(options.status());
    for (size_t i = 0; i < count; ++i) options->channel_ids.push_back(absl::StrCat("W", i + 1));
    const std::string k(kind);
    if (k == "ingster") {
      absl::StatusOr<chicontract::Estimate> e =
          count > 0 ? chicontract::IngsterChi2(*ws, f->value, *options)
                    : chicontract::IngsterChi2(f->value, n, *options);
      if (!e.ok()) return Fail(e.status());
      Json out = chicontract::ToJson(*e);
      out["kind"] = "ingster_chi2";
      out["n"] = count > 0 ? static_cast<int>(count) : n;
      return EmitJson(out, report_json);
    }
    absl::StatusOr<chicontract::FluctuationReport> r;
    if (k == "chi2") {
      r = chicontract::Chi2Fluctuation(f->value, *options);
    } else if (k == "decoupled") {
      r = chicontract::DecoupledFluctuation(f->value, n, *options);
    } else if (k == "induced_chi2") {
      if (count == 0) return Invalid("induced_chi2 needs a channel");
      r = chicontract::InducedChi2Fluctuation((*ws)[0], f->value, *options);
    } else if (k == "induced_decoupled") {
      if (count == 0) return Invalid("induced_decoupled needs channels");
      r = chicontract::InducedDecoupledFluctuation(*ws, f->value, *options);
    } else {
      return Invalid(absl::StrCat("unknown fluctuation kind ", k));
    }
    if (!r.ok()) return Fail(r.status());
    return EmitJson(chicontract::ToJson(*r), report_json);
  });
}

cc_status_t cc_mixture_stats(const cc_family_t* f, const cc_channel_t* const* channels,
                             size_t count, int n, char** report_json) {
  return Guard([&] {
    if (f == nullptr) return Invalid("family is NULL");
    absl::StatusOr<std::vector<chicontract::Channel>> ws = Gather(channels, count);
    if (!ws.ok()) return Fail(ws.status());
    absl::StatusOr<chicontract::MixtureStats> stats =
        count > 0 ? chicontract::BruteForceMixtureStats(*ws, f->value,
                                                        static_cast<int>(count))
                  : chicontract::BruteForceMixtureStats(std::nullopt, f->value, n);
    if (!stats.ok()) return Fail(stats.status());
    Json out = chicontract::ToJson(*stats);
    out["bayes_error"] = 0.5 * (1.0 - stats->tv);
    return EmitJson(out, report_json);
  });
}

cc_status_t cc_adversary(const cc_channel_t* const* channels, size_t count, double eps,
                         const char* options_json, cc_family_t** family_out,
                         char** report_json) {
  return Guard([&] {
    absl::StatusOr<std::vector<chicontract::Channel>> ws = Gather(channels, count);
    if (!ws.ok()) return Fail(ws.status());
    absl::StatusOr<Json> opts = ParseOptional(options_json);
    if (!opts.ok()) return Fail(opts.status());
    chicontract::AdversaryOptions options;
    try {
      if (opts->contains("c")) options.c = opts->at("c").get<double>();
      if (opts->contains("C")) options.validity_constant = opts->at("C").get<double>();
      if (opts->contains("trials")) options.certificate_trials = opts->at("trials").get<int64_t>();
      if (opts->contains("seed")) options.seed = opts->at("seed").get<uint64_t>();
    } catch (const Json::exception& e) {
      return Invalid(e.what());
    }
    absl::StatusOr<chicontract::AdversaryResult> result =
        chicontract::AdversarialPerturbation(*ws, eps, options);
    if (!result.ok()) return Fail(result.status());
    Json report = chicontract::ToJson(result->report);
    report["basis"] = chicontract::ToJson(result->basis);
    if (report_json != nullptr) {
      if (cc_status_t s = EmitJson(report, report_json); s != CC_OK) return s;
    }
    if (family_out != nullptr) *family_out = new cc_family{std::move(result->family)};
    return Ok();
  });
}

cc_status_t cc_maxmin_gap(const cc_channel_t* const* channels, size_t count, double eps,
                          char** report_json) {
  return Guard([&] {
    absl::StatusOr<std::vector<chicontract::Channel>> ws = Gather(channels, count);
    if (!ws.ok()) return Fail(ws.status());
    absl::StatusOr<chicontract::MaxminGap> gap = chicontract::ComputeMaxminGap(*ws, eps);
    if (!gap.ok()) return Fail(gap.status());
    return EmitJson(chicontract::ToJson(*gap), report_json);
  });
}

cc_status_t cc_bound_table(int k, double eps, int bits, double rho, const char* format,
                           char** out) {
  return Guard([&] {
    const std::string fmt = format == nullptr ? "json" : format;
    if (fmt != "json" && fmt != "csv") return Invalid(absl::StrCat("unknown format ", fmt));
    absl::StatusOr<std::vector<chicontract::BoundReport>> cells = chicontract::LbTable(
        k, eps, bits > 0 ? std::optional<int>(bits) : std::nullopt,
        rho > 0.0 ? std::optional<double>(rho) : std::nullopt);
    if (!cells.ok()) return Fail(cells.status());
    if (fmt == "csv") return Emit(chicontract::BoundsToCsv(*cells), out);
    Json arr = Json::array();
    for (const chicontract::BoundReport& c : *cells) arr.push_back(chicontract::ToJson(c));
    return EmitJson(arr, out);
  });
}

cc_status_t cc_bound_general(const char* task, int k, double eps, double sup_nuclear,
                             double sup_frobenius, char** report_json) {
  return Guard([&] {
    if (task == nullptr) return Invalid("task is NULL");
    const std::string t(task);
    chicontract::BoundTask bt;
    if (t == "learning") {
      bt = chicontract::BoundTask::kLearning;
    } else if (t == "testing_public") {
      bt = chicontract::BoundTask::kTestingPublic;
    } else if (t == "testing_private") {
      bt = chicontract::BoundTask::kTestingPrivate;
    } else {
      return Invalid(absl::StrCat("unknown task ", t));
    }
    absl::StatusOr<chicontract::BoundReport> r =
        chicontract::LbGeneral(bt, k, eps, sup_nuclear, sup_frobenius);
    if (!r.ok()) return Fail(r.status());
    return EmitJson(chicontract::ToJson(*r), report_json);
  });
}

cc_status_t cc_hamming_ball_log2(int m, int t, double* out) {
  return Guard([&] {
    if (out == nullptr) return Invalid("output pointer is NULL");
    absl::StatusOr<double> v = chicontract::HammingBallLog2(m, t);
    if (!v.ok()) return Fail(v.status());
    *out = *v;
    return Ok();
  });
}

cc_status_t cc_simulate(const char* config_json, int64_t seed, int64_t trials,
                        char** report_json, char** counts_csv) {
  return Guard([&] {
    if (config_json == nullptr) return Invalid("config is NULL");
    absl::StatusOr<Json> j = chicontract::ParseJson(config_json);
    if (!j.ok()) return Fail(j.status());
    absl::StatusOr<chicontract::ProtocolConfig> cfg = chicontract::ProtocolFromJson(*j);
    if (!cfg.ok()) return Fail(cfg.status());
    if (!j->contains("family")) return Invalid("config needs a \"family\"");
    absl::StatusOr<chicontract::PerturbedFamily> family =
        chicontract::FamilyFromJson(j->at("family"));
    if (!family.ok()) return Fail(family.status());
    chicontract::Distribution null_dist = family->nominal();
    if (j->contains("null")) {
      absl::StatusOr<chicontract::Distribution> d =
          chicontract::DistributionFromJson(j->at("null"));
      if (!d.ok()) return Fail(d.status());
      null_dist = *std::move(d);
    }
    if (seed >= 0) cfg->seed = static_cast<uint64_t>(seed);
    int64_t count = trials;
    if (count < 0) {
      if (!j->contains("trials") || !j->at("trials").is_number_integer()) {
        return Invalid("give a trial count");
      }
      count = j->at("trials").get<int64_t>();
    }
    absl::StatusOr<chicontract::TrialReport> report =
        chicontract::SimulateSmp(*cfg, null_dist, *family, count);
    if (!report.ok()) return Fail(report.status());
    if (counts_csv != nullptr) {
      if (cc_status_t s = Emit(chicontract::TrialCountsToCsv(*report), counts_csv);
          s != CC_OK) {
        return s;
      }
    }
    return EmitJson(chicontract::ToJson(*report), report_json);
  });
}

cc_status_t cc_separation_demo(int k, int n, double eps, char** report_json) {
  return Guard([&] {
    absl::StatusOr<chicontract::SeparationDemo> demo =
        chicontract::RunSeparationDemo(k, n, eps);
    if (!demo.ok()) return Fail(demo.status());
    return EmitJson(chicontract::ToJson(*demo), report_json);
  });
}

cc_status_t cc_verify(int quick, uint64_t seed, int* all_pass, char** report_json) {
  return Guard([&] {
    if (all_pass == nullptr) return Invalid("all_pass is NULL");
    const chicontract::VerifyResult result = chicontract::RunVerification(quick != 0, seed);
    *all_pass = result.all_pass ? 1 : 0;
    Json checks = Json::array();
    for (const chicontract::VerifyCheck& c : result.checks) {
      checks.push_back(Json{{"name", c.name},
                            {"pass", c.pass},
                            {"cases", c.cases},
                            {"detail", c.detail}});
    }
    Json report{{"quick", quick != 0}, {"all_pass", result.all_pass}, {"checks", checks}};
    if (report_json == nullptr) return Ok();
    return EmitJson(report, report_json);
  });
}

}  // extern "C"
