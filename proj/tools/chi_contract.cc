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

// chi-contract: command-line front end over the C API.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chicontract/c_api.h"
#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConstraintViolated = 3;

// Carries a C API failure up to main().
struct ApiError {
  cc_status_t status;
  std::string message;
};

void Check(cc_status_t status) {
  if (status != CC_OK) throw ApiError{status, cc_last_error()};
}

std::string TakeString(char* s) {
  std::string out = s == nullptr ? "" : s;
  cc_free_string(s);
  return out;
}

struct ChannelDeleter {
  void operator()(cc_channel_t* w) const { cc_channel_free(w); }
};
struct FamilyDeleter {
  void operator()(cc_family_t* f) const { cc_family_free(f); }
};
struct HMatrixDeleter {
  void operator()(cc_hmatrix_t* h) const { cc_hmatrix_free(h); }
};
using ChannelPtr = std::unique_ptr<cc_channel_t, ChannelDeleter>;
using FamilyPtr = std::unique_ptr<cc_family_t, FamilyDeleter>;
using HMatrixPtr = std::unique_ptr<cc_hmatrix_t, HMatrixDeleter>;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ApiError{CC_INVALID_ARGUMENT, "cannot read " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ApiError{CC_INVALID_ARGUMENT, "cannot write " + path};
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

// Writes the document to --out and echoes `summary`, or prints the document
// when no output path was given.
void Deliver(const std::string& out_path, const std::string& document,
             const std::string& summary) {
  if (out_path.empty()) {
    std::cout << document << (document.empty() || document.back() == '\n' ? "" : "\n");
    return;
  }
  WriteFile(out_path, document);
  std::cout << summary << "\n";
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "std:NAME:K[:PARAM]" names a standard channel; anything else is a path.
ChannelPtr LoadChannel(const std::string& ref) {
  cc_channel_t* w = nullptr;
  if (ref.rfind("std:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream in(ref.substr(4));
    std::string part;
    while (std::getline(in, part, ':')) parts.push_back(part);
    if (parts.size() < 2 || parts.size() > 3) {
      throw ApiError{CC_INVALID_ARGUMENT, "expected std:NAME:K[:PARAM], got " + ref};
    }
    const double param = parts.size() == 3 ? std::stod(parts[2]) : 0.0;
    Check(cc_channel_standard(parts[0].c_str(), std::stoi(parts[1]), param, &w));
  } else {
    Check(cc_channel_from_json(ReadFile(ref).c_str(), &w));
  }
  return ChannelPtr(w);
}

std::vector<ChannelPtr> LoadChannels(const std::string& list) {
  std::vector<ChannelPtr> out;
  for (const std::string& ref : SplitList(list)) out.push_back(LoadChannel(ref));
  return out;
}

std::vector<const cc_channel_t*> Raw(const std::vector<ChannelPtr>& channels) {
  std::vector<const cc_channel_t*> out;
  for (const ChannelPtr& w : channels) out.push_back(w.get());
  return out;
}

// "paninski:K:EPS" or a path to family JSON.
FamilyPtr LoadFamily(const std::string& ref) {
  cc_family_t* f = nullptr;
  if (ref.rfind("paninski:", 0) == 0) {
    const std::string rest = ref.substr(9);
    const size_t colon = rest.find(':');
    if (colon == std::string::npos) {
      throw ApiError{CC_INVALID_ARGUMENT, "expected paninski:K:EPS, got " + ref};
    }
    Check(cc_family_paninski(std::stoi(rest.substr(0, colon)),
                             std::stod(rest.substr(colon + 1)), &f));
  } else {
    Check(cc_family_from_json(ReadFile(ref).c_str(), &f));
  }
  return FamilyPtr(f);
}

std::string Fmt(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

std::string FmtJson(const Json& v) {
  return v.is_number() ? Fmt(v.get<double>()) : v.dump();
}

struct ChannelMakeArgs {
  std::string kind;
  int k = 0;
  int bits = 0;
  double rho = 0.0;
  int m = 2;
  uint64_t seed = 0;
  std::string signs;
  std::string out;
};

int RunChannelMake(const ChannelMakeArgs& a) {
  cc_channel_t* raw = nullptr;
  if (a.kind == "random_comm") {
    Check(cc_channel_random_comm(a.k, a.bits, a.seed, &raw));
  } else if (a.kind == "random_ldp") {
    Check(cc_channel_random_ldp(a.k, a.m, a.rho, a.seed, &raw));
  } else if (a.kind == "pair_partition") {
    std::vector<int> signs;
    for (const std::string& s : SplitList(a.signs)) signs.push_back(std::stoi(s));
    Check(cc_channel_pair_partition(signs.data(), signs.size(), &raw));
  } else {
    double param = 0.0;
    if (a.kind == "quantizer") param = a.bits;
    if (a.kind == "randomized_response" || a.kind == "rr") param = a.rho;
    if (a.kind == "constant") param = a.m;
    Check(cc_channel_standard(a.kind.c_str(), a.k, param, &raw));
  }
  ChannelPtr w(raw);
  char* json = nullptr;
  Check(cc_channel_to_json(w.get(), &json));
  Deliver(a.out, TakeString(json),
          "channel " + a.kind + " k=" + std::to_string(cc_channel_k(w.get())) +
              " m=" + std::to_string(cc_channel_m(w.get())) + " -> " + a.out);
  return 0;
}

struct ChannelCheckArgs {
  std::string channel;
  int bits = 0;
  double rho = 0.0;
  std::string out;
};

int RunChannelCheck(const ChannelCheckArgs& a) {
  ChannelPtr w = LoadChannel(a.channel);
  int satisfied = 0;
  char* report = nullptr;
  Check(cc_channel_check(w.get(), a.bits, a.rho, &satisfied, &report));
  const std::string doc = TakeString(report);
  const Json j = Json::parse(doc);
  std::string summary = j["constraint"].get<std::string>() +
                        (satisfied ? ": satisfied" : ": violated");
  if (j.contains("norm_bounds")) {
    summary += " nuclear=" + FmtJson(j["norm_bounds"]["nuclear"]) +
               " frobenius_sq=" + FmtJson(j["norm_bounds"]["frobenius_sq"]) +
               (j["norm_bounds"]["pass"].get<bool>() ? " bounds ok" : " bounds FAILED");
  }
  Deliver(a.out, doc, summary);
  return satisfied ? 0 : kExitConstraintViolated;
}

int RunHMatrix(const std::string& channels, const std::string& out) {
  std::vector<ChannelPtr> ws = LoadChannels(channels);
  if (ws.empty()) throw ApiError{CC_INVALID_ARGUMENT, "no channels given"};
  std::vector<const cc_channel_t*> raw = Raw(ws);
  cc_hmatrix_t* h = nullptr;
  Check(cc_hmatrix_average(raw.data(), raw.size(), &h));
  HMatrixPtr hp(h);
  char* json = nullptr;
  Check(cc_hmatrix_to_json(hp.get(), &json));
  Deliver(out, TakeString(json),
          "H nuclear=" + Fmt(cc_hmatrix_nuclear(hp.get())) +
              " frobenius_sq=" + Fmt(cc_hmatrix_frobenius_sq(hp.get())) +
              " spectral_radius=" + Fmt(cc_hmatrix_spectral_radius(hp.get())));
  return 0;
}

struct FluctuationArgs {
  std::string family;
  std::string channels;
  int n = 1;
  std::string kind = "chi2";
  std::string method;
  int64_t mc_samples = 1 << 16;
  uint64_t seed = 0;
  std::string out;
};

int RunFluctuation(const FluctuationArgs& a) {
  FamilyPtr f = LoadFamily(a.family);
  std::vector<ChannelPtr> ws = LoadChannels(a.channels);
  std::vector<const cc_channel_t*> raw = Raw(ws);
  char* report = nullptr;
  if (a.kind == "brute_force") {
    Check(cc_mixture_stats(f.get(), raw.data(), raw.size(), a.n, &report));
    const std::string doc = TakeString(report);
    const Json j = Json::parse(doc);
    Deliver(a.out, doc,
            "mixture chi2=" + FmtJson(j["chi2"]) + " tv=" + FmtJson(j["tv"]) +
                " bayes_error=" + FmtJson(j["bayes_error"]));
    return 0;
  }
  Json options{{"mc_samples", a.mc_samples}, {"seed", a.seed}};
  if (!a.method.empty()) options["method"] = a.method;
  const std::string opts = options.dump();
  Check(cc_fluctuation(f.get(), raw.data(), raw.size(), a.n, a.kind.c_str(), opts.c_str(),
                       &report));
  const std::string doc = TakeString(report);
  const Json j = Json::parse(doc);
  Deliver(a.out, doc,
          j["kind"].get<std::string>() + " = " + FmtJson(j["value"]) + " (" +
              j["method"].get<std::string>() + ")");
  return 0;
}

struct AdversaryArgs {
  std::string channels;
  double eps = 0.0;
  std::optional<double> c;
  std::optional<double> validity;
  int64_t trials = 10000;
  uint64_t seed = 0;
  bool gap = false;
  std::string out;
  std::string report;
};

int RunAdversary(const AdversaryArgs& a) {
  std::vector<ChannelPtr> ws = LoadChannels(a.channels);
  std::vector<const cc_channel_t*> raw = Raw(ws);
  if (a.gap) {
    char* report = nullptr;
    Check(cc_maxmin_gap(raw.data(), raw.size(), a.eps, &report));
    const std::string doc = TakeString(report);
    const Json j = Json::parse(doc);
    Deliver(a.report.empty() ? a.out : a.report, doc,
            "paninski=" + FmtJson(j["paninski_value"]) +
                " adversarial=" + FmtJson(j["adversarial_value"]) +
                " ratio=" + FmtJson(j["ratio"]));
    return 0;
  }
  Json options{{"trials", a.trials}, {"seed", a.seed}};
  if (a.c.has_value()) options["c"] = *a.c;
  if (a.validity.has_value()) options["C"] = *a.validity;
  const std::string opts = options.dump();
  cc_family_t* family = nullptr;
  char* report = nullptr;
  Check(cc_adversary(raw.data(), raw.size(), a.eps, opts.c_str(), &family, &report));
  FamilyPtr f(family);
  const std::string doc = TakeString(report);
  char* family_json = nullptr;
  Check(cc_family_to_json(f.get(), &family_json));
  const std::string fam = TakeString(family_json);
  const Json j = Json::parse(doc);
  std::string summary = "adversarial fluctuation=" + FmtJson(j["achieved"]["value"]) +
                        " ceiling=" + FmtJson(j["ceiling"]) +
                        " invalid_rate=" + FmtJson(j["invalid_rate"]) +
                        (j["within_validity_regime"].get<bool>() ? "" : " (outside regime)");
  if (!a.report.empty()) WriteFile(a.report, doc);
  if (a.out.empty() && a.report.empty()) {
    std::cout << Json{{"family", Json::parse(fam)}, {"report", j}}.dump(2) << "\n";
    return 0;
  }
  if (!a.out.empty()) WriteFile(a.out, fam);
  std::cout << summary << "\n";
  return 0;
}

struct BoundArgs {
  int k = 0;
  double eps = 0.0;
  int bits = 0;
  double rho = 0.0;
  std::string format = "csv";
  std::string task;
  double sup_nuclear = 0.0;
  double sup_frobenius = 0.0;
  std::string out;
};

int RunBound(const BoundArgs& a) {
  char* doc = nullptr;
  if (!a.task.empty()) {
    Check(cc_bound_general(a.task.c_str(), a.k, a.eps, a.sup_nuclear, a.sup_frobenius,
                           &doc));
    const std::string text = TakeString(doc);
    const Json j = Json::parse(text);
    Deliver(a.out, text, a.task + " >= " + FmtJson(j["value"]));
    return 0;
  }
  Check(cc_bound_table(a.k, a.eps, a.bits, a.rho, a.format.c_str(), &doc));
  const std::string text = TakeString(doc);
  size_t rows = 0;
  for (char ch : text) rows += ch == '\n';
  Deliver(a.out, text,
          "bounds k=" + std::to_string(a.k) + " eps=" + Fmt(a.eps) + " -> " + a.out +
              (a.format == "csv" ? " (" + std::to_string(rows - 1) + " cells)" : ""));
  return 0;
}

// Replaces string references to channels and families inside a protocol
// config with their JSON documents.
std::string ResolveConfig(const std::string& text) {
  Json config = Json::parse(text);
  if (config.contains("assignments") && config["assignments"].is_array()) {
    for (Json& assignment : config["assignments"]) {
      if (!assignment.contains("channels")) continue;
      for (Json& ref : assignment["channels"]) {
        if (!ref.is_string()) continue;
        char* json = nullptr;
        Check(cc_channel_to_json(LoadChannel(ref.get<std::string>()).get(), &json));
        ref = Json::parse(TakeString(json));
      }
    }
  }
  if (config.contains("family") && config["family"].is_string()) {
    char* json = nullptr;
    Check(cc_family_to_json(LoadFamily(config["family"].get<std::string>()).get(), &json));
    config["family"] = Json::parse(TakeString(json));
  }
  return config.dump();
}

struct SimulateArgs {
  std::string config;
  int64_t seed = -1;
  int64_t trials = -1;
  std::string out;
  std::string csv;
  std::string demo;
  int k = 8;
  int n = 2;
  double eps = 0.03;
};

int RunSimulate(const SimulateArgs& a) {
  char* report = nullptr;
  if (!a.demo.empty()) {
    if (a.demo != "separation") {
      throw ApiError{CC_INVALID_ARGUMENT, "unknown demo " + a.demo};
    }
    Check(cc_separation_demo(a.k, a.n, a.eps, &report));
    const std::string doc = TakeString(report);
    const Json j = Json::parse(doc);
    Deliver(a.out, doc,
            "private best tv=" + FmtJson(j["private_best_tv"]) +
                " public tv=" + FmtJson(j["public_tv"]) +
                (j["separated"].get<bool>() ? " separated" : " NOT separated"));
    return 0;
  }
  if (a.config.empty()) throw ApiError{CC_INVALID_ARGUMENT, "--config is required"};
  char* csv = nullptr;
  const std::string config = ResolveConfig(ReadFile(a.config));
  Check(cc_simulate(config.c_str(), a.seed, a.trials, &report,
                    a.csv.empty() ? nullptr : &csv));
  const std::string doc = TakeString(report);
  if (!a.csv.empty()) WriteFile(a.csv, TakeString(csv));
  const Json j = Json::parse(doc);
  std::string summary = "trials=" + std::to_string(j["trials"].get<int64_t>()) +
                        " empirical_tv=" + FmtJson(j["empirical_tv"]) + " +- " +
                        FmtJson(j["empirical_tv_stderr"]);
  if (!j["exact_tv"].is_null()) summary += " exact_tv=" + FmtJson(j["exact_tv"]);
  Deliver(a.out, doc, summary);
  return 0;
}

int RunVerify(bool quick, uint64_t seed, const std::string& out) {
  int all_pass = 0;
  char* report = nullptr;
  Check(cc_verify(quick ? 1 : 0, seed, &all_pass, &report));
  const std::string doc = TakeString(report);
  const Json j = Json::parse(doc);
  for (const Json& c : j["checks"]) {
    std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>()
              << " (" << c["cases"].get<int64_t>() << " cases)";
    if (!c["detail"].get<std::string>().empty()) {
      std::cout << ": " << c["detail"].get<std::string>();
    }
    std::cout << "\n";
  }
  if (!out.empty()) WriteFile(out, doc);
  std::cout << (all_pass ? "verify: all checks passed" : "verify: FAILED") << "\n";
  return all_pass ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chi-square contraction toolkit"};
  app.require_subcommand(1);

  CLI::App* channel = app.add_subcommand("channel", "Build or check channels");
  channel->require_subcommand(1);
  ChannelMakeArgs make;
  CLI::App* make_cmd = channel->add_subcommand("make", "Write a channel as JSON");
  make_cmd
      ->add_option("--kind", make.kind,
                   "identity, constant, parity, quantizer, randomized_response, "
                   "pair_partition, random_comm, random_ldp")
      ->required();
  make_cmd->add_option("--k", make.k, "Input alphabet size");
  make_cmd->add_option("--bits", make.bits, "Bits for quantizer and random_comm");
  make_cmd->add_option("--rho", make.rho, "Privacy level for randomized_response and random_ldp");
  make_cmd->add_option("--m", make.m, "Outputs for constant and random_ldp");
  make_cmd->add_option("--seed", make.seed, "Seed for random channels");
  make_cmd->add_option("--signs", make.signs, "Comma-separated +1/-1 per pair");
  make_cmd->add_option("--out", make.out, "Output path");
  ChannelCheckArgs check;
  CLI::App* check_cmd = channel->add_subcommand("check", "Check a channel constraint");
  check_cmd->add_option("--channel", check.channel, "Channel JSON or std:NAME:K[:P]")
      ->required();
  CLI::Option* check_bits = check_cmd->add_option("--bits", check.bits, "Bit budget");
  CLI::Option* check_rho = check_cmd->add_option("--rho", check.rho, "Privacy level");
  check_bits->excludes(check_rho);
  check_cmd->add_option("--out", check.out, "Report path");

  std::string h_channels;
  std::string h_out;
  CLI::App* hmatrix = app.add_subcommand("hmatrix", "H(W) and its norms");
  hmatrix->add_option("--channels,--channel", h_channels, "Comma-separated channels")
      ->required();
  hmatrix->add_option("--out", h_out, "Output path");

  FluctuationArgs fl;
  CLI::App* fluct = app.add_subcommand("fluctuation", "Chi-square fluctuations");
  fluct->add_option("--family", fl.family, "Family JSON or paninski:K:EPS")->required();
  fluct->add_option("--channels", fl.channels, "Comma-separated channels");
  fluct->add_option("--n", fl.n, "Number of players");
  fluct->add_option("--kind", fl.kind,
                    "chi2, decoupled, induced_chi2, induced_decoupled, ingster, brute_force");
  fluct->add_option("--method", fl.method, "closed_form, exhaustive or monte_carlo");
  fluct->add_option("--mc-samples", fl.mc_samples, "Monte Carlo samples");
  fluct->add_option("--seed", fl.seed, "Monte Carlo seed");
  fluct->add_option("--out", fl.out, "Report path");

  AdversaryArgs adv;
  CLI::App* adversary = app.add_subcommand("adversary", "Maxmin adversarial family");
  adversary->add_option("--channels", adv.channels, "Comma-separated channels")->required();
  adversary->add_option("--eps", adv.eps, "Distance parameter")->required();
  adversary->add_option("--c", adv.c, "Scale constant");
  adversary->add_option("--C", adv.validity, "Validity-regime constant");
  adversary->add_option("--trials", adv.trials, "Certificate samples");
  adversary->add_option("--seed", adv.seed, "Certificate seed");
  adversary->add_flag("--gap", adv.gap, "Compare with the Paninski family instead");
  adversary->add_option("--out", adv.out, "Family path");
  adversary->add_option("--report", adv.report, "Report path");

  BoundArgs bound;
  CLI::App* bound_cmd = app.add_subcommand("bound", "Sample-complexity lower bounds");
  bound_cmd->add_option("--k", bound.k, "Alphabet size")->required();
  bound_cmd->add_option("--eps", bound.eps, "Distance parameter")->required();
  bound_cmd->add_option("--bits", bound.bits, "Bit budget");
  bound_cmd->add_option("--rho", bound.rho, "Privacy level");
  bound_cmd->add_option("--format", bound.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  bound_cmd->add_option("--task", bound.task,
                        "learning, testing_public or testing_private (general form)");
  bound_cmd->add_option("--sup-nuclear", bound.sup_nuclear, "Nuclear-norm supremum");
  bound_cmd->add_option("--sup-frobenius", bound.sup_frobenius, "Frobenius-norm supremum");
  bound_cmd->add_option("--out", bound.out, "Output path");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate an SMP protocol");
  simulate->add_option("--config", sim.config, "Protocol JSON");
  simulate->add_option("--seed", sim.seed, "Seed (overrides the config)");
  simulate->add_option("--trials", sim.trials, "Trials (overrides the config)");
  simulate->add_option("--out", sim.out, "Report path");
  simulate->add_option("--csv", sim.csv, "Per-state counts as CSV");
  simulate->add_option("--demo", sim.demo, "separation");
  simulate->add_option("--k", sim.k, "Demo alphabet size");
  simulate->add_option("--n", sim.n, "Demo player count");
  simulate->add_option("--eps", sim.eps, "Demo distance parameter");

  bool quick = false;
  uint64_t verify_seed = 20260101;
  std::string verify_out;
  CLI::App* verify = app.add_subcommand("verify", "Run the invariant suite");
  verify->add_flag("--quick", quick, "Smaller instance counts");
  verify->add_option("--seed", verify_seed, "Suite seed");
  verify->add_option("--out", verify_out, "Report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (make_cmd->parsed()) return RunChannelMake(make);
    if (check_cmd->parsed()) return RunChannelCheck(check);
    if (hmatrix->parsed()) return RunHMatrix(h_channels, h_out);
    if (fluct->parsed()) return RunFluctuation(fl);
    if (adversary->parsed()) return RunAdversary(adv);
    if (bound_cmd->parsed()) return RunBound(bound);
    if (simulate->parsed()) return RunSimulate(sim);
    if (verify->parsed()) return RunVerify(quick, verify_seed, verify_out);
  } catch (const ApiError& e) {
    std::cerr << Json{{"error", {{"code", cc_status_name(e.status)}, {"message", e.message}}}}
                     .dump()
              << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", {{"code", "INVALID_ARGUMENT"}, {"message", e.what()}}}}.dump()
              << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
