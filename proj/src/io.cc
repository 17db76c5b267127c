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

#include "chicontract/io.h"

#include <cmath>
#include <sstream>

#include "absl/strings/str_cat.h"

namespace chicontract {
namespace {

Json Vector(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(Number(v(i)));
  return out;
}

Json Rows(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(Vector(m.row(r).transpose()));
  return out;
}

absl::StatusOr<std::vector<double>> ParseVector(const Json& j, absl::string_view what) {
  if (!j.is_array()) return absl::InvalidArgumentError(absl::StrCat(what, " must be an array"));
  std::vector<double> out;
  out.reserve(j.size());
  for (const Json& e : j) {
    absl::StatusOr<double> v = ParseNumber(e);
    if (!v.ok()) return v.status();
    out.push_back(*v);
  }
  return out;
}

absl::StatusOr<Eigen::MatrixXd> ParseRows(const Json& j, absl::string_view what) {
  if (!j.is_array() || j.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(what, " must be a nonempty array of rows"));
  }
  Eigen::MatrixXd m;
  for (size_t r = 0; r < j.size(); ++r) {
    absl::StatusOr<std::vector<double>> row = ParseVector(j[r], what);
    if (!row.ok()) return row.status();
    if (r == 0) m.resize(j.size(), row->size());
    if (static_cast<Eigen::Index>(row->size()) != m.cols()) {
      return absl::InvalidArgumentError(absl::StrCat(what, " rows differ in length"));
    }
    for (size_t c = 0; c < row->size(); ++c) m(r, c) = (*row)[c];
  }
  return m;
}

template <typename T>
absl::StatusOr<T> Field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    return absl::InvalidArgumentError(absl::StrCat("missing field \"", name, "\""));
  }
  try {
    return j.at(name).get<T>();
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("field \"", name, "\": ", e.what()));
  }
}

Json OptionalNumber(const std::optional<double>& v) {
  return v.has_value() ? Number(*v) : Json(nullptr);
}

}  // namespace

Json Number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

absl::StatusOr<double> ParseNumber(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s == "nan") return std::nan("");
  }
  return absl::InvalidArgumentError(absl::StrCat("not a number: ", j.dump()));
}

absl::StatusOr<Json> ParseJson(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed JSON: ", e.what()));
  }
}

Json ToJson(const Distribution& p) {
  Json probs = Json::array();
  for (double v : p.probs()) probs.push_back(v);
  return Json{{"k", p.k()}, {"probs", std::move(probs)}};
}

absl::StatusOr<Distribution> DistributionFromJson(const Json& j) {
  const Json& probs = j.is_object() && j.contains("probs") ? j.at("probs") : j;
  absl::StatusOr<std::vector<double>> v = ParseVector(probs, "probs");
  if (!v.ok()) return v.status();
  if (j.is_object() && j.contains("k")) {
    absl::StatusOr<int> k = Field<int>(j, "k");
    if (!k.ok()) return k.status();
    if (*k != static_cast<int>(v->size())) {
      return absl::InvalidArgumentError("\"k\" does not match the length of \"probs\"");
    }
  }
  return Distribution::Create(*std::move(v));
}

Json ToJson(const Channel& w) {
  return Json{{"k", w.k()}, {"m", w.m()}, {"W", Rows(w.matrix())}};
}

absl::StatusOr<Channel> ChannelFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("W")) {
    return absl::InvalidArgumentError("channel JSON needs a \"W\" field");
  }
  absl::StatusOr<Eigen::MatrixXd> m = ParseRows(j.at("W"), "W");
  if (!m.ok()) return m.status();
  if (j.contains("k")) {
    absl::StatusOr<int> k = Field<int>(j, "k");
    if (!k.ok()) return k.status();
    if (*k != m->cols()) return absl::InvalidArgumentError("\"k\" does not match \"W\"");
  }
  if (j.contains("m")) {
    absl::StatusOr<int> rows = Field<int>(j, "m");
    if (!rows.ok()) return rows.status();
    if (*rows != m->rows()) return absl::InvalidArgumentError("\"m\" does not match \"W\"");
  }
  return Channel::Create(*std::move(m));
}

absl::StatusOr<Json> ToJson(const PerturbedFamily& f) {
  Json out;
  Json q = Json::array();
  for (double v : f.nominal().probs()) q.push_back(v);
  out["q"] = std::move(q);
  out["scale"] = f.scale();
  if (f.zeta().is_rademacher()) {
    out["zeta"] = "rademacher";
  } else if (f.zeta().is_linear()) {
    out["zeta"] = Json{{"matrix_V", Rows(f.zeta().mixing())}};
  } else {
    return absl::UnimplementedError("sampled parameter laws have no JSON form");
  }
  if (!f.id().empty()) out["id"] = f.id();
  return out;
}

absl::StatusOr<PerturbedFamily> FamilyFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("q") || !j.contains("scale") || !j.contains("zeta")) {
    return absl::InvalidArgumentError("family JSON needs \"q\", \"scale\" and \"zeta\"");
  }
  absl::StatusOr<Distribution> q = DistributionFromJson(j.at("q"));
  if (!q.ok()) return q.status();
  absl::StatusOr<double> scale = ParseNumber(j.at("scale"));
  if (!scale.ok()) return scale.status();
  const Json& zeta = j.at("zeta");
  std::optional<ZetaLaw> law;
  if (zeta.is_string() && zeta.get<std::string>() == "rademacher") {
    law = ZetaLaw::Rademacher(q->k() / 2);
  } else if (zeta.is_object() && zeta.contains("matrix_V")) {
    absl::StatusOr<Eigen::MatrixXd> v = ParseRows(zeta.at("matrix_V"), "matrix_V");
    if (!v.ok()) return v.status();
    law = ZetaLaw::Linear(*std::move(v));
  } else {
    return absl::InvalidArgumentError(
        "\"zeta\" must be \"rademacher\" or {\"matrix_V\": [...]}");
  }
  absl::StatusOr<PerturbedFamily> family =
      PerturbedFamily::Create(*std::move(q), *scale, *std::move(law));
  if (!family.ok()) return family.status();
  if (j.contains("id") && j.at("id").is_string()) family->set_id(j.at("id").get<std::string>());
  return family;
}

Json ToJson(const HMatrix& h) {
  return Json{{"dim", h.dim()},
              {"entries", Rows(h.entries())},
              {"eigenvalues", Vector(h.eigenvalues())},
              {"nuclear", Number(h.nuclear())},
              {"frobenius", Number(h.frobenius())},
              {"frobenius_sq", Number(h.frobenius_sq())},
              {"spectral_radius", Number(h.spectral_radius())},
              {"trace", Number(h.trace())},
              {"rank", h.rank()}};
}

Json ToJson(const NormBoundCheck& check) {
  return Json{{"constraint", check.spec.ToString()},
              {"nuclear", Number(check.nuclear)},
              {"frobenius_sq", Number(check.frobenius_sq)},
              {"bound_nuclear", Number(check.bound_nuclear)},
              {"bound_frobenius_sq", Number(check.bound_frobenius_sq)},
              {"pass", check.pass},
              {"outside_regime", check.outside_regime}};
}

Json ToJson(const LdpCheck& check) {
  return Json{{"satisfied", check.satisfied}, {"worst_ratio", Number(check.worst_ratio)}};
}

Json ToJson(const Estimate& e) {
  return Json{{"value", Number(e.value)},
              {"method", MethodName(e.method)},
              {"mc_stderr", OptionalNumber(e.mc_stderr)}};
}

Json ToJson(const FluctuationReport& r) {
  return Json{{"kind", FluctuationKindName(r.kind)},
              {"value", Number(r.value)},
              {"method", MethodName(r.method)},
              {"mc_stderr", OptionalNumber(r.mc_stderr)},
              {"n", r.n},
              {"family_id", r.family_id},
              {"channel_ids", r.channel_ids}};
}

Json ToJson(const MixtureStats& s) {
  return Json{{"chi2", Number(s.chi2)}, {"tv", Number(s.tv)}};
}

Json ToJson(const ChaosMgf& c) {
  return Json{{"exact_log_mgf", OptionalNumber(c.exact_log_mgf)},
              {"bound", Number(c.bound)},
              {"valid", c.valid}};
}

Json ToJson(const AlmostPerturbationCheck& c) {
  return Json{{"trials", c.trials},
              {"hits", c.hits},
              {"invalid_members", c.invalid_members},
              {"alpha_hat", Number(c.alpha_hat)},
              {"alpha_lower", Number(c.alpha_lower)},
              {"pass", c.pass}};
}

Json ToJson(const AdversaryBasis& b) {
  return Json{{"V", Rows(b.v)}, {"eigenvalues", Vector(b.eigenvalues)}, {"c", b.c}};
}

Json ToJson(const AdversaryReport& r) {
  return Json{
      {"achieved", ToJson(r.achieved)},
      {"certificate", r.certificate.has_value() ? ToJson(*r.certificate) : Json(nullptr)},
      {"invalid_rate", Number(r.invalid_rate)},
      {"invalid_rate_exact", r.invalid_rate_exact},
      {"ceiling", Number(r.ceiling)},
      {"max_nuclear", Number(r.max_nuclear)},
      {"validity_constant", Number(r.validity_constant)},
      {"within_validity_regime", r.within_validity_regime},
      {"compressed_frobenius_sq", Number(r.compressed_frobenius_sq)},
      {"norm_relation_bound", Number(r.norm_relation_bound)}};
}

Json ToJson(const MaxminGap& g) {
  return Json{{"paninski_value", Number(g.paninski_value)},
              {"adversarial_value", Number(g.adversarial_value)},
              {"ratio", Number(g.ratio)}};
}

Json ToJson(const BoundReport& r) {
  return Json{{"task", BoundTaskName(r.task)},
              {"constraint", r.constraint},
              {"k", r.k},
              {"eps", r.eps},
              {"sup_nuclear", Number(r.sup_nuclear)},
              {"sup_frobenius", Number(r.sup_frobenius)},
              {"value", Number(r.value)},
              {"formula", r.formula},
              {"caveats", r.caveats}};
}

Json ToJson(const TrialReport& r) {
  Json states = Json::array();
  for (size_t s = 0; s < r.null_counts.size(); ++s) {
    if (r.null_counts[s] == 0 && r.alt_counts[s] == 0) continue;
    states.push_back(Json::array({s, r.null_counts[s], r.alt_counts[s]}));
  }
  return Json{{"schema", r.schema},
              {"trials", r.trials},
              {"seed", r.seed},
              {"coin_mode", CoinModeName(r.coin_mode)},
              {"statistic", StatisticName(r.statistic)},
              {"n", r.n},
              {"state_count", r.state_count},
              {"empirical_message_stats",
               Json{{"columns", {"state", "null_count", "alt_count"}},
                    {"rows", std::move(states)}}},
              {"empirical_tv", Number(r.empirical_tv)},
              {"empirical_tv_stderr", Number(r.empirical_tv_stderr)},
              {"exact_tv", OptionalNumber(r.exact_tv)},
              {"bayes_error", OptionalNumber(r.bayes_error)},
              {"rejected_parameters", r.rejected_parameters}};
}

Json ToJson(const BayesError& b) {
  return Json{{"tv", Number(b.tv)}, {"bayes_error", Number(b.bayes_error)}};
}

Json ToJson(const SeparationDemo& d) {
  return Json{{"k", d.k},
              {"n", d.n},
              {"eps", d.eps},
              {"assignments", d.assignments},
              {"private_best_tv", Number(d.private_best_tv)},
              {"private_best_assignment", d.private_best_assignment},
              {"public_tv", Number(d.public_tv)},
              {"separated", d.separated}};
}

std::string BoundsToCsv(std::span<const BoundReport> reports) {
  std::ostringstream out;
  out.precision(12);
  out << "task,constraint,k,eps,value,formula\n";
  for (const BoundReport& r : reports) {
    std::string formula = r.formula;
    size_t pos = 0;
    while ((pos = formula.find('"', pos)) != std::string::npos) {
      formula.insert(pos, "\"");
      pos += 2;
    }
    out << BoundTaskName(r.task) << ',' << r.constraint << ',' << r.k << ',' << r.eps
        << ',' << r.value << ",\"" << formula << "\"\n";
  }
  return out.str();
}

std::string TrialCountsToCsv(const TrialReport& r) {
  std::ostringstream out;
  out << "state,null_count,alt_count\n";
  for (size_t s = 0; s < r.null_counts.size(); ++s) {
    out << s << ',' << r.null_counts[s] << ',' << r.alt_counts[s] << '\n';
  }
  return out.str();
}

absl::StatusOr<ProtocolConfig> ProtocolFromJson(const Json& j) {
  ProtocolConfig cfg;
  absl::StatusOr<int> n = Field<int>(j, "n");
  if (!n.ok()) return n.status();
  cfg.n = *n;
  if (j.contains("coin_mode")) {
    absl::StatusOr<std::string> mode = Field<std::string>(j, "coin_mode");
    if (!mode.ok()) return mode.status();
    if (*mode == "public") {
      cfg.coin_mode = CoinMode::kPublic;
    } else if (*mode != "private") {
      return absl::InvalidArgumentError(absl::StrCat("unknown coin_mode ", *mode));
    }
  }
  if (j.contains("statistic")) {
    absl::StatusOr<std::string> stat = Field<std::string>(j, "statistic");
    if (!stat.ok()) return stat.status();
    if (*stat == "sum") {
      cfg.statistic = Statistic::kSum;
    } else if (*stat != "joint") {
      return absl::InvalidArgumentError(absl::StrCat("unknown statistic ", *stat));
    }
  }
  if (j.contains("seed")) {
    absl::StatusOr<uint64_t> seed = Field<uint64_t>(j, "seed");
    if (!seed.ok()) return seed.status();
    cfg.seed = *seed;
  }
  if (!j.contains("assignments") || !j.at("assignments").is_array()) {
    return absl::InvalidArgumentError("protocol JSON needs an \"assignments\" array");
  }
  for (const Json& a : j.at("assignments")) {
    ChannelAssignment assignment;
    if (a.contains("weight")) {
      absl::StatusOr<double> w = ParseNumber(a.at("weight"));
      if (!w.ok()) return w.status();
      assignment.weight = *w;
    }
    if (!a.contains("channels") || !a.at("channels").is_array()) {
      return absl::InvalidArgumentError("assignment needs a \"channels\" array");
    }
    for (const Json& c : a.at("channels")) {
      absl::StatusOr<Channel> w = ChannelFromJson(c);
      if (!w.ok()) return w.status();
      assignment.channels.push_back(*std::move(w));
    }
    cfg.rule.assignments.push_back(std::move(assignment));
  }
  return cfg;
}

}  // namespace chicontract
