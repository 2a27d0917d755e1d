// Copyright 2026 The onabc Authors.
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

// onabc: command-line front end.
//
//   onabc run        --election FILE --policy NAME [--score F] [--audit AX]
//   onabc dp         --rule mav|cc|thiele --m M --n N --k K --p P [--dump]
//   onabc simulate   --m M --n N --k K --p P --policy NAME... [--trials T]
//   onabc adversary  --k K [--epsilon E] [--out FILE] [--manifest FILE]
//   onabc oracle     --election FILE [--f F]
//   onabc audit      --election FILE --committee 1,3 --axiom ejr [--alpha A]
//
// Exit status: 0 success, 2 bad input or configuration, 1 internal failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "onabc/onabc.hpp"

namespace {

using Json = nlohmann::ordered_json;
using onabc::Rational;

// Raised for bad user input that is only detected after CLI parsing.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  bool json = false;
  std::uint64_t seed = 0;
  int threads = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

onabc::Election load_election(const std::string& path) {
  try {
    return onabc::parse_election(read_file(path));
  } catch (const onabc::ParseError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::optional<onabc::ApprovalPrior> prior_from(const std::string& p,
                                               const std::string& prior) {
  if (!p.empty() && !prior.empty())
    throw ConfigError("give either --p or --prior, not both");
  if (!p.empty()) return onabc::ApprovalPrior::uniform(onabc::parse_rational(p));
  if (!prior.empty()) return onabc::parse_prior(prior);
  return std::nullopt;
}

onabc::Committee parse_committee(const std::string& text) {
  std::vector<int> members;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      int t = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      members.push_back(t);
    } catch (const std::exception&) {
      throw ConfigError("invalid committee member '" + item + "'");
    }
  }
  return onabc::Committee(members);
}

Json members_json(const onabc::Committee& w) {
  Json out = Json::array();
  for (int t : w) out.push_back(t);
  return out;
}

Json witness_json(const onabc::Witness& x) {
  Json out;
  out["ell"] = x.ell;
  out["candidates"] = x.candidates;
  out["group"] = x.group;
  if (!x.covered.empty()) out["covered"] = x.covered;
  return out;
}

Json report_json(const onabc::AuditReport& r) {
  Json out;
  out["axiom"] = onabc::to_string(r.axiom);
  out["alpha"] = onabc::to_string(r.alpha);
  out["verdict"] = r.pass ? "pass" : "fail";
  if (r.witness) out["witness"] = witness_json(*r.witness);
  return out;
}

std::string join(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(xs[i]);
  }
  return s;
}

void print_report(const onabc::AuditReport& r) {
  std::cout << "audit " << onabc::to_string(r.axiom) << " alpha="
            << onabc::to_string(r.alpha) << ": " << (r.pass ? "pass" : "fail")
            << "\n";
  if (r.witness) {
    const auto& x = *r.witness;
    std::cout << "  witness ell=" << x.ell << " T={" << join(x.candidates)
              << "} |S|=" << x.group.size() << " S={" << join(x.group) << "}";
    if (!x.covered.empty()) std::cout << " Y={" << join(x.covered) << "}";
    std::cout << "\n";
  }
}

// "ejr", "ejr@3/2", "pjr@1".
onabc::sim::AuditRequest parse_audit_request(const std::string& text,
                                             const Rational& fallback) {
  auto at = text.find('@');
  onabc::sim::AuditRequest req;
  req.axiom = onabc::parse_axiom(text.substr(0, at));
  req.alpha = at == std::string::npos ? fallback
                                      : onabc::parse_rational(text.substr(at + 1));
  return req;
}

// ---------------------------------------------------------------- run

struct RunArgs {
  std::string election, policy, score = "mav", f, p, prior, alpha = "1";
  std::vector<std::string> audits;
};

int cmd_run(const Globals& g, const RunArgs& a) {
  auto e = load_election(a.election);
  onabc::PolicyConfig config;
  config.f = onabc::ThieleFunction::parse(a.f.empty() ? a.score : a.f);
  config.prior = prior_from(a.p, a.prior);
  auto factory = onabc::make_policy_factory(a.policy, config);
  if (a.policy == "secretary" && !onabc::is_submodular(config.f))
    std::cerr << "warning: " << config.f.spec()
              << " is not submodular; the secretary guarantee does not apply\n";
  auto policy = factory();
  onabc::Committee w = onabc::replay(e, *policy);
  auto f = onabc::ThieleFunction::parse(a.score);
  Rational value = onabc::score(e, w, f);
  Rational alpha = onabc::parse_rational(a.alpha);
  std::vector<onabc::AuditReport> reports;
  for (const auto& ax : a.audits) {
    auto req = parse_audit_request(ax, alpha);
    reports.push_back(onabc::check_axiom(e, w, req.axiom, req.alpha));
  }
  if (g.json) {
    Json out;
    out["policy"] = a.policy;
    out["committee"] = members_json(w);
    out["score"] = {{"function", f.spec()}, {"value", onabc::to_string(value)}};
    Json audits = Json::array();
    for (const auto& r : reports) audits.push_back(report_json(r));
    out["audits"] = audits;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "policy " << a.policy << "\n";
    std::cout << "committee " << onabc::to_string(w) << "\n";
    std::cout << "score " << f.spec() << " " << onabc::to_string(value) << "\n";
    for (const auto& r : reports) print_report(r);
  }
  return 0;
}

// ---------------------------------------------------------------- dp

struct DpArgs {
  std::string rule, f = "pav", p, prior;
  int m = 0, n = 0, k = 0;
  bool dump = false;
  std::uint64_t budget = onabc::kDefaultStateBudget;
  int voter_cap = onabc::kDefaultUnboundedVoterCap;
};

template <typename Table>
Json table_summary(const Table& t, const onabc::BellmanAudit& audit,
                   std::size_t ties) {
  Json out;
  out["states"] = t.size();
  out["V_init"] = onabc::format_fraction(t.initial_value());
  out["V_init_approx"] = onabc::to_double(t.initial_value());
  out["ties"] = ties;
  out["bellman"] = {{"states", audit.states},
                    {"decisions", audit.decisions},
                    {"mismatches", audit.mismatches}};
  return out;
}

int cmd_dp(const Globals& g, const DpArgs& a) {
  auto prior = prior_from(a.p, a.prior);
  if (!prior) throw ConfigError("dp needs --p or --prior");
  Json summary;
  std::ostringstream dump;
  if (a.rule == "mav") {
    auto t = onabc::build_mav_table(a.m, a.n, a.k, *prior);
    summary = table_summary(t, onabc::audit_bellman(t), t.ties().size());
    if (a.dump) t.dump(dump);
  } else if (a.rule == "cc") {
    auto t = onabc::build_cc_table(a.m, a.n, a.k, *prior);
    summary = table_summary(t, onabc::audit_bellman(t), t.ties().size());
    if (a.dump) t.dump(dump);
  } else if (a.rule == "thiele") {
    onabc::ThieleTableOptions options{a.budget, a.voter_cap};
    auto t = onabc::build_thiele_table(
        a.m, a.n, a.k, onabc::ThieleFunction::parse(a.f), *prior, options);
    summary = table_summary(t, onabc::audit_bellman(t), t.ties());
    summary["f"] = t.function().spec();
    if (a.dump) t.dump(dump);
  } else {
    throw ConfigError("unknown rule '" + a.rule + "' (mav, cc, thiele)");
  }
  Json out;
  out["rule"] = a.rule;
  out["m"] = a.m;
  out["n"] = a.n;
  out["k"] = a.k;
  out["prior"] = prior->describe();
  out.update(summary);
  if (g.json) {
    if (a.dump) out["dump"] = dump.str();
    std::cout << out.dump(2) << "\n";
  } else if (a.dump) {
    std::cout << dump.str();
  } else {
    std::cout << "rule " << a.rule << " m=" << a.m << " n=" << a.n
              << " k=" << a.k << " prior=" << prior->describe() << "\n";
    std::cout << "states " << out["states"].get<std::size_t>() << "\n";
    std::cout << "V_init " << out["V_init"].get<std::string>() << " (~"
              << out["V_init_approx"].get<double>() << ")\n";
    std::cout << "ties " << out["ties"].get<std::size_t>() << "\n";
    std::cout << "bellman mismatches "
              << out["bellman"]["mismatches"].get<std::size_t>() << "\n";
  }
  if (out["bellman"]["mismatches"].get<std::size_t>() != 0) return 1;
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimArgs {
  int m = 0, n = 0, k = 0, trials = 100;
  std::string p, prior, f = "mav", alpha = "1";
  std::vector<std::string> policies, audits;
  bool no_ratio = false;
};

int cmd_simulate(const Globals& g, const SimArgs& a) {
  onabc::sim::GenSpec spec;
  spec.m = a.m;
  spec.n = a.n;
  spec.k = a.k;
  auto prior = prior_from(a.p, a.prior);
  if (!prior) throw ConfigError("simulate needs --p or --prior");
  spec.prior = *prior;
  spec.seed = g.seed;
  spec.trials = a.trials;
  onabc::PolicyConfig config;
  config.f = onabc::ThieleFunction::parse(a.f);
  config.prior = prior;
  std::vector<onabc::sim::NamedPolicy> policies;
  for (const auto& name : a.policies)
    policies.push_back({name, onabc::make_policy_factory(name, config)});
  onabc::sim::EvalOptions options;
  options.threads = g.threads;
  options.ratios = !a.no_ratio;
  Rational alpha = onabc::parse_rational(a.alpha);
  for (const auto& ax : a.audits)
    options.audits.push_back(parse_audit_request(ax, alpha));
  auto summary = onabc::sim::evaluate(spec, policies, config.f, options);

  if (g.json) {
    Json out;
    out["m"] = a.m;
    out["n"] = a.n;
    out["k"] = a.k;
    out["prior"] = prior->describe();
    out["seed"] = g.seed;
    out["function"] = summary.function;
    if (options.ratios) out["optimum_mean"] = summary.optimum_mean;
    Json list = Json::array();
    for (const auto& s : summary.policies) {
      Json item;
      item["policy"] = s.policy;
      item["trials"] = s.trials;
      item["mean"] = s.mean;
      item["stderr"] = s.stderr_mean;
      if (s.has_ratio) {
        item["ratio_mean"] = s.ratio_mean;
        item["ratio_stderr"] = s.ratio_stderr;
      }
      Json audits = Json::object();
      for (const auto& r : s.audits) audits[r.label] = r.pass_rate;
      item["audits"] = audits;
      list.push_back(item);
    }
    out["policies"] = list;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "trials " << a.trials << " seed " << g.seed << " f "
              << summary.function << "\n";
    if (options.ratios)
      std::cout << "optimum mean " << summary.optimum_mean << "\n";
    for (const auto& s : summary.policies) {
      std::cout << s.policy << ": mean " << s.mean << " +- " << s.stderr_mean;
      if (s.has_ratio)
        std::cout << ", ratio " << s.ratio_mean << " +- " << s.ratio_stderr;
      for (const auto& r : s.audits)
        std::cout << ", " << r.label << " " << r.pass_rate;
      std::cout << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------- adversary

struct AdvArgs {
  int k = 0;
  std::string epsilon = "1/4";
  long long n = 0, m = 0;
  std::string out, manifest;
  int find_k = 0;
  std::vector<std::string> stress;
  long long max_volume = 50'000'000;
};

Json stress_json(const onabc::sim::StressReport& r) {
  Json out;
  out["policy"] = r.policy;
  out["must_accept_taken"] = r.must_accept_taken;
  out["first_rejected"] =
      r.first_rejected ? Json(*r.first_rejected) : Json(nullptr);
  out["full_at"] = r.full_at ? Json(*r.full_at) : Json(nullptr);
  out["impossible"] = r.impossible;
  out["committee"] = members_json(r.committee);
  Json audits = Json::array();
  for (const auto& a : r.audits) {
    Json item;
    item["label"] = a.label;
    item["alpha"] = onabc::to_string(a.alpha);
    item["verdict"] = a.pass ? (*a.pass ? "pass" : "fail") : "budget";
    if (a.witness) item["witness"] = witness_json(*a.witness);
    audits.push_back(item);
  }
  out["audits"] = audits;
  return out;
}

int cmd_adversary(const Globals& g, const AdvArgs& a) {
  Rational eps = onabc::parse_rational(a.epsilon);
  Json out;
  if (a.find_k > 0) {
    auto point = onabc::sim::smallest_overflow_k(eps, a.find_k);
    out["overflow_k"] = point.k ? Json(point.k) : Json(nullptr);
    out["must_accept_at_overflow"] = point.total;
    if (a.k == 0) {
      if (g.json)
        std::cout << out.dump(2) << "\n";
      else if (point.k)
        std::cout << "smallest k with sum m_i > k: " << point.k
                  << " (sum m_i = " << point.total << ")\n";
      else
        std::cout << "no overflow up to k=" << a.find_k << "\n";
      return 0;
    }
  }
  if (a.k < 1) throw ConfigError("adversary needs --k (or --find-k)");
  onabc::sim::AdversarySpec spec{a.k, eps, a.n, a.m};
  auto stream = onabc::sim::adversary_stream(spec);
  out["k"] = a.k;
  out["epsilon"] = onabc::to_string(eps);
  out["n"] = stream.n();
  out["m"] = stream.m();
  out["must_accept_total"] = stream.must_accept_total();
  out["exceeds_k"] = stream.overflows();
  Json rounds = Json::array();
  for (const auto& r : stream.rounds())
    rounds.push_back({{"round", r.index},
                      {"count", r.count},
                      {"group_size", r.group_size},
                      {"first", r.first}});
  out["rounds"] = rounds;

  bool need_material = !a.out.empty() || !a.stress.empty();
  if (need_material && stream.approval_volume() > a.max_volume)
    throw ConfigError("stream has " + std::to_string(stream.approval_volume()) +
                      " approvals, above --max-volume " +
                      std::to_string(a.max_volume));
  if (!a.out.empty())
    write_file(a.out, onabc::serialize_election(stream.materialize()));
  if (!a.manifest.empty()) {
    Json manifest = out;
    manifest["must_accept"] = {{"first", 1}, {"last", stream.must_accept_total()}};
    write_file(a.manifest, manifest.dump(2) + "\n");
  }
  Json stresses = Json::array();
  for (const auto& name : a.stress) {
    auto policy = onabc::make_policy(name);
    stresses.push_back(stress_json(onabc::sim::stress(*policy, stream)));
  }
  if (!a.stress.empty()) out["stress"] = stresses;

  if (g.json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "k=" << a.k << " epsilon=" << onabc::to_string(eps)
              << " n=" << stream.n() << " m=" << stream.m() << "\n";
    std::cout << "rounds " << stream.rounds().size() << ", must-accept "
              << stream.must_accept_total()
              << (stream.overflows() ? " > k" : " <= k") << "\n";
    for (const auto& s : stresses) {
      std::cout << s["policy"].get<std::string>() << ": took "
                << s["must_accept_taken"].get<long long>() << " must-accepts";
      if (!s["first_rejected"].is_null())
        std::cout << ", first rejected at t="
                  << s["first_rejected"].get<long long>();
      for (const auto& au : s["audits"])
        std::cout << ", " << au["label"].get<std::string>() << " "
                  << au["verdict"].get<std::string>();
      std::cout << "\n";
    }
  }
  return 0;
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  std::string election, f = "mav";
  std::uint64_t budget = onabc::kDefaultEnumerationBudget;
};

int cmd_oracle(const Globals& g, const OracleArgs& a) {
  auto e = load_election(a.election);
  auto f = onabc::ThieleFunction::parse(a.f);
  auto best = onabc::offline_optimum(e, f, a.budget);
  if (g.json) {
    Json out;
    out["function"] = f.spec();
    out["committee"] = members_json(best.committee);
    out["score"] = onabc::to_string(best.score);
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "optimum " << onabc::to_string(best.committee) << " score "
              << onabc::to_string(best.score) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- audit

struct AuditArgs {
  std::string election, committee, axiom = "ejr", alpha = "1";
  std::uint64_t budget = onabc::kDefaultAuditBudget;
};

int cmd_audit(const Globals& g, const AuditArgs& a) {
  auto e = load_election(a.election);
  auto w = parse_committee(a.committee);
  onabc::check_committee(e, w);
  onabc::AuditOptions options;
  options.node_budget = a.budget;
  auto r = onabc::check_axiom(e, w, onabc::parse_axiom(a.axiom),
                              onabc::parse_rational(a.alpha), options);
  if (g.json)
    std::cout << report_json(r).dump(2) << "\n";
  else
    print_report(r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online approval-based committee elections"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "Machine-readable JSON output");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Replay a policy on an election");
  run_cmd->fallthrough();
  run_cmd->add_option("--election", run.election, "Election file")->required();
  run_cmd->add_option("--policy", run.policy, "Policy name")->required();
  run_cmd->add_option("--score", run.score, "Thiele function for scoring");
  run_cmd->add_option("--f", run.f, "Thiele function for the policy");
  run_cmd->add_option("--p", run.p, "Uniform approval probability");
  run_cmd->add_option("--prior", run.prior, "Prior (uniform:p, typed:s@p,...)");
  run_cmd->add_option("--audit", run.audits, "Axiom to audit (jr, pjr, ejr)");
  run_cmd->add_option("--alpha", run.alpha, "Audit alpha");

  DpArgs dp;
  auto* dp_cmd = app.add_subcommand("dp", "Build an optimal policy table");
  dp_cmd->fallthrough();
  dp_cmd->add_option("--rule", dp.rule, "mav, cc or thiele")->required();
  dp_cmd->add_option("--m", dp.m)->required();
  dp_cmd->add_option("--n", dp.n)->required();
  dp_cmd->add_option("--k", dp.k)->required();
  dp_cmd->add_option("--p", dp.p, "Uniform approval probability");
  dp_cmd->add_option("--prior", dp.prior, "Prior (uniform:p, typed:s@p,...)");
  dp_cmd->add_option("--f", dp.f, "Thiele function (thiele rule)");
  dp_cmd->add_flag("--dump", dp.dump, "Print every state");
  dp_cmd->add_option("--budget", dp.budget, "State budget (thiele rule)");
  dp_cmd->add_option("--voter-cap", dp.voter_cap,
                     "Largest n for f without bounded support");

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo evaluation");
  sim_cmd->fallthrough();
  sim_cmd->add_option("--m", sim.m)->required();
  sim_cmd->add_option("--n", sim.n)->required();
  sim_cmd->add_option("--k", sim.k)->required();
  sim_cmd->add_option("--p", sim.p, "Uniform approval probability");
  sim_cmd->add_option("--prior", sim.prior);
  sim_cmd->add_option("--trials", sim.trials)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--policy", sim.policies, "Policy names")
      ->required()
      ->delimiter(',');
  sim_cmd->add_option("--f", sim.f, "Thiele function");
  sim_cmd->add_option("--audit", sim.audits, "axiom or axiom@alpha")
      ->delimiter(',');
  sim_cmd->add_option("--alpha", sim.alpha, "Default audit alpha");
  sim_cmd->add_flag("--no-ratio", sim.no_ratio, "Skip the offline optimum");

  AdvArgs adv;
  auto* adv_cmd = app.add_subcommand("adversary", "Lower-bound stream");
  adv_cmd->fallthrough();
  adv_cmd->add_option("--k", adv.k);
  adv_cmd->add_option("--epsilon", adv.epsilon);
  adv_cmd->add_option("--n", adv.n, "Electorate size (0 = automatic)");
  adv_cmd->add_option("--m", adv.m, "Pad the stream with dummies up to m");
  adv_cmd->add_option("--out", adv.out, "Write the stream (election file)");
  adv_cmd->add_option("--manifest", adv.manifest, "Write the must-accept manifest");
  adv_cmd->add_option("--find-k", adv.find_k,
                      "Report the smallest k <= K with sum m_i > k");
  adv_cmd->add_option("--stress", adv.stress, "Replay policies on the stream")
      ->delimiter(',');
  adv_cmd->add_option("--max-volume", adv.max_volume,
                      "Largest number of approvals to materialize");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Offline optimum");
  oracle_cmd->fallthrough();
  oracle_cmd->add_option("--election", oracle.election)->required();
  oracle_cmd->add_option("--f", oracle.f);
  oracle_cmd->add_option("--budget", oracle.budget, "Committee budget");

  AuditArgs audit;
  auto* audit_cmd = app.add_subcommand("audit", "Check JR, PJR or EJR");
  audit_cmd->fallthrough();
  audit_cmd->add_option("--election", audit.election)->required();
  audit_cmd->add_option("--committee", audit.committee, "e.g. 1,3")->required();
  audit_cmd->add_option("--axiom", audit.axiom);
  audit_cmd->add_option("--alpha", audit.alpha);
  audit_cmd->add_option("--budget", audit.budget, "Search node budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return cmd_run(g, run);
    if (*dp_cmd) return cmd_dp(g, dp);
    if (*sim_cmd) return cmd_simulate(g, sim);
    if (*adv_cmd) return cmd_adversary(g, adv);
    if (*oracle_cmd) return cmd_oracle(g, oracle);
    if (*audit_cmd) return cmd_audit(g, audit);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const onabc::BudgetExceeded& e) {
    std::cerr << "error: budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
