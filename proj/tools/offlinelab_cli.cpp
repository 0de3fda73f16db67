// SPDX-License-Identifier: Apache-2.0
//
// offlinelab_cli: build | verify | divergence | experiment | report.
//
// Exit codes: 0 ok, 1 I/O failure, 2 validation or usage error,
// 3 invariant failure, 4 brute-force size guard.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "offlinelab/divergence.hpp"
#include "offlinelab/instance_io.hpp"
#include "offlinelab/offline.hpp"
#include "offlinelab/theorem1.hpp"
#include "offlinelab/theorem2.hpp"
#include "offlinelab/verify.hpp"

using namespace olab;
namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kIo = 1, kUsage = 2, kInvariant = 3, kSizeGuard = 4 };

struct Global {
  std::string out = ".";
  int parallel = 1;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
};

struct BuildArgs {
  std::string construction = "theorem1";
  std::int64_t S = 0;
  double gamma = 0.9;
  int family = 1;
  int L = 2;
  std::string scheme;
  bool with_mdp = false;
  int policies = 5;
};

struct VerifyArgs {
  std::string instance;
  BuildArgs inline_args;
  int policies = 20;
  int cert_instances = 2;
};

struct DivergenceArgs {
  std::string construction = "theorem1";
  std::int64_t S = 0;
  double gamma = 0.9;
  int n = 5;
  int L = 3;
  int partitions = 1;
  double c = 0.1;
  bool brute_force = false;
  bool full_range = false;
};

struct ExperimentArgs {
  std::int64_t S = 1000005;
  double gamma = 0.9;
  std::int64_t n = 5;
  int trials = 200;
  std::string algorithms = "brm,fqi,bayes";
  int fqi_iterations = 50;
};

struct ReportArgs {
  std::string in;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void flatten(const Json& j, const std::string& prefix, std::ostringstream& os) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(*it, prefix.empty() ? it.key() : prefix + "." + it.key(), os);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), os);
  } else {
    os << csv_field(prefix) << ',' << csv_field(j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

std::string out_path(const Global& g, const std::string& name) { return (fs::path(g.out) / name).string(); }

// Primary report in the requested format.
void emit(const Global& g, const std::string& stem, const Json& j) {
  if (g.format == "csv") {
    std::ostringstream os;
    os << "key,value\n";
    flatten(j, "", os);
    write_file_atomic(out_path(g, stem + ".csv"), os.str());
  } else {
    write_file_atomic(out_path(g, stem + ".json"), pretty(j));
  }
}

std::uint64_t require_seed(const Global& g, const std::string& cmd) {
  if (!g.seed) throw ValidationError(cmd + " needs --seed; there is no implicit time seed");
  return *g.seed;
}

SchemeTuple parse_scheme(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  if (v.size() != 7) throw ValidationError("--scheme needs seven comma-separated numbers");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

void check_common(const BuildArgs& a) {
  if (a.construction != "theorem1" && a.construction != "theorem2") {
    throw ValidationError("--construction must be theorem1 or theorem2");
  }
  if (a.family != 1 && a.family != 2) throw ValidationError("--family must be 1 or 2");
  if (!(a.gamma > 0.0 && a.gamma < 1.0)) throw ValidationError("--gamma must lie in (0, 1)");
  if (a.S <= 0) throw ValidationError("--S is required and must be positive");
}

Json build_config(const BuildArgs& a, std::uint64_t seed) {
  Json j = {{"construction", a.construction}, {"S", a.S}, {"gamma", a.gamma}, {"family", a.family}, {"seed", seed}};
  if (a.construction == "theorem2") j["L"] = a.L;
  if (!a.scheme.empty()) j["scheme"] = a.scheme;
  return j;
}

Json make_instance_doc(const BuildArgs& a, std::uint64_t seed, bool with_mdp) {
  check_common(a);
  Rng rng = make_stream(seed, 1);
  if (a.construction == "theorem1") {
    const auto spec = a.scheme.empty() ? make_t1_spec(a.S, a.gamma) : make_t1_spec(a.S, a.gamma, parse_scheme(a.scheme));
    const auto inst = sample_t1_instance(spec, a.family, rng);
    Json doc = instance_json(spec, inst, seed);
    if (with_mdp) doc["mdp"] = mdp_json(build_t1(spec, inst));
    return doc;
  }
  if (a.L < 1) throw ValidationError("--L must be at least 1");
  const auto p = make_t2_params(a.L, a.S, a.gamma);
  const auto inst = sample_t2_instance(p, a.family, rng);
  Json doc = instance_json(p, inst, seed);
  if (with_mdp) doc["mdp"] = mdp_json(build_t2(p, inst));
  return doc;
}

Json verify_json(const VerifyReport& rep) {
  Json checks = Json::array();
  for (const auto& c : rep.checks) checks.push_back(to_json(c));
  Json failed = Json::array();
  for (const auto& c : rep.checks) {
    if (!c.passed) failed.push_back(c.name);
  }
  return {{"checks", checks}, {"failed", failed}, {"all_passed", rep.all_passed()},
          {"details", rep.extra.is_null() ? Json::object() : rep.extra}};
}

void print_failures(const VerifyReport& rep) {
  for (const auto& c : rep.checks) {
    if (!c.passed) std::cerr << "invariant failed: " << c.name << " (value " << num(c.value) << ")\n";
  }
}

int cmd_build(const Global& g, const BuildArgs& a) {
  const std::uint64_t seed = require_seed(g, "build");
  const Json doc = make_instance_doc(a, seed, a.with_mdp);
  const LoadedInstance li = load_instance(doc);
  write_file_atomic(out_path(g, "instance.json"), pretty(doc));

  VerifyOptions vo;
  vo.seed = seed;
  vo.policies = a.policies;
  const VerifyReport rep = verify_instance(li, vo);
  Json summary = verify_json(rep);
  summary["config"] = build_config(a, seed);
  summary["config"]["policies"] = a.policies;
  summary["instance_hash"] = li.hash;
  summary["S"] = doc.at("S");
  emit(g, "build_summary", summary);
  std::cout << "instance_hash " << li.hash << "\n";
  for (const auto& c : rep.checks) std::cout << c.name << " " << num(c.value) << (c.passed ? " ok" : " FAIL") << "\n";
  if (!rep.all_passed()) {
    print_failures(rep);
    return kInvariant;
  }
  return kOk;
}

int cmd_verify(const Global& g, const VerifyArgs& a) {
  Json doc;
  Json config;
  std::uint64_t seed = g.seed.value_or(0);
  if (!a.instance.empty()) {
    try {
      doc = Json::parse(read_file(a.instance));
    } catch (const Json::parse_error& e) {
      throw ValidationError(std::string("instance file is not valid JSON: ") + e.what());
    }
    config = {{"instance", a.instance}, {"seed", seed}};
  } else {
    seed = require_seed(g, "verify without --instance");
    doc = make_instance_doc(a.inline_args, seed, false);
    config = build_config(a.inline_args, seed);
  }
  const LoadedInstance li = load_instance(doc);
  VerifyOptions vo;
  vo.seed = seed;
  vo.policies = a.policies;
  vo.cert_instances = a.cert_instances;
  const VerifyReport rep = verify_instance(li, vo);
  Json report = verify_json(rep);
  config["policies"] = a.policies;
  config["cert_instances"] = a.cert_instances;
  report["config"] = config;
  report["instance_hash"] = li.hash;
  report["construction"] = li.construction;
  emit(g, "verify_report", report);
  for (const auto& c : rep.checks) std::cout << c.name << " " << num(c.value) << (c.passed ? " ok" : " FAIL") << "\n";
  if (!rep.all_passed()) {
    print_failures(rep);
    return kInvariant;
  }
  return kOk;
}

Json chi2_json(const Chi2Result& c, const TruncatedBound& t) {
  return {{"value", c.value}, {"terms", c.terms}, {"partitions", c.partitions}, {"pmf_mass", c.pmf_mass},
          {"g_monotone", c.g_monotone},
          {"truncated", {{"eps", t.eps}, {"first", t.first}, {"second", t.second}, {"bound", t.bound},
                         {"relaxed", t.relaxed}, {"kind", "upper bound"}}}};
}

int cmd_divergence(const Global& g, const DivergenceArgs& a) {
  if (a.n < 0) throw ValidationError("--n must be non-negative");
  if (!(a.gamma > 0.0 && a.gamma < 1.0)) throw ValidationError("--gamma must lie in (0, 1)");
  if (a.partitions < 1) throw ValidationError("--partitions must be at least 1");
  Json rep;
  std::ostringstream trace;
  if (a.construction == "theorem1") {
    if (a.S <= 0) throw ValidationError("--S is required for theorem1");
    const auto spec = make_t1_spec(a.S, a.gamma);
    SumOptions so;
    so.partitions = a.partitions;
    so.threads = g.parallel;
    so.keep_trace = true;
    so.windowed = !a.full_range;
    auto r = tv_upper_t1(spec, a.n, so);
    rep = {{"construction", "theorem1"}, {"S", spec.S}, {"S1", spec.S1}, {"n", a.n}, {"gamma", a.gamma},
           {"tv_upper", r.tv_upper}, {"regime_n_max", r.regime_n_max}, {"in_regime", r.in_regime},
           {"tv_le_half", r.le_half}, {"tv_le_three_quarters", r.le_three_quarters},
           {"regret_lower_bound", regret_lower_bound_t1(a.gamma, std::min(1.0, r.tv_upper))}};
    rep["family"] = Json::array({chi2_json(r.chi2[0], r.truncated[0]), chi2_json(r.chi2[1], r.truncated[1])});
    if (a.brute_force) {
      rep["tv_bruteforce"] = tv_bruteforce_t1(spec, a.n);
      rep["chi2_bruteforce"] = {chi2_bruteforce_t1(spec, 1, a.n), chi2_bruteforce_t1(spec, 2, a.n)};
    }
    trace << "family,t,pmf,g,contribution\n";
    for (int f = 0; f < 2; ++f) {
      for (const auto& row : r.chi2[f].trace) {
        trace << f + 1 << ',' << row.t << ',' << num(row.pmf) << ',' << num(row.g) << ',' << num(row.contribution)
              << '\n';
      }
    }
  } else if (a.construction == "theorem2") {
    if (a.L < 1) throw ValidationError("--L must be at least 1");
    const std::int64_t S = a.S > 0 ? a.S : pipeline_regime_S(a.L, a.n);
    const auto p = make_t2_params(a.L, S, a.gamma);
    const auto r = tv_pipeline_t2(p, a.n, a.c);
    Json fam = Json::array();
    trace << "family,l,S_l,planted,theta,alpha_l,phi,coef,eps,window_terms\n";
    for (const auto& fb : r.family) {
      fam.push_back({{"family", fb.family}, {"expectation", fb.expectation},
                     {"chi2_expectation", fb.chi2_expectation}, {"first", fb.first}, {"tail", fb.tail},
                     {"chi2_witheps", fb.chi2_witheps}});
      for (const auto& t : fb.layers) {
        trace << fb.family << ',' << t.l << ',' << t.S_l << ',' << t.planted << ',' << num(t.theta) << ','
              << num(t.alpha_l) << ',' << num(t.phi) << ',' << num(t.coef) << ',' << num(t.eps) << ','
              << t.window_terms << '\n';
      }
    }
    rep = {{"construction", "theorem2"}, {"S", p.S}, {"L", a.L}, {"n", a.n}, {"gamma", a.gamma}, {"c", a.c},
           {"family", fam}, {"ref_term", r.ref_term}, {"ref_exact", r.ref_exact}, {"tv_bound", r.tv_bound},
           {"tv_bound_expectation", r.tv_bound_expectation}, {"target", r.target}, {"in_regime", r.in_regime},
           {"certified", r.certified},
           {"regret_lower_bound", regret_lower_bound_t2(a.L, a.gamma, std::min(1.0, r.tv_bound))},
           {"regret_lower_bound_chain", regret_lower_bound_t2_chain(a.L, a.gamma, std::min(1.0, r.tv_bound))}};
    if (a.brute_force) {
      rep["tv_reference_bruteforce"] = tv_reference_t2_bruteforce(p, a.n);
      rep["tv_bruteforce"] = tv_bruteforce_t2(p, a.n);
    }
  } else {
    throw ValidationError("--construction must be theorem1 or theorem2");
  }
  rep["config"] = {{"construction", a.construction}, {"S", a.S}, {"n", a.n}, {"gamma", a.gamma}, {"L", a.L},
                   {"partitions", a.partitions}, {"parallel", g.parallel}, {"brute_force", a.brute_force},
                   {"full_range", a.full_range}, {"c", a.c}};
  emit(g, "divergence_report", rep);
  write_file_atomic(out_path(g, "divergence_trace.csv"), trace.str());
  if (rep.contains("tv_upper")) std::cout << "tv_upper " << num(rep["tv_upper"].get<double>()) << "\n";
  if (rep.contains("tv_bound")) std::cout << "tv_bound " << num(rep["tv_bound"].get<double>()) << "\n";
  if (rep.contains("tv_bruteforce")) std::cout << "tv_bruteforce " << num(rep["tv_bruteforce"].get<double>()) << "\n";
  return kOk;
}

int cmd_experiment(const Global& g, const ExperimentArgs& a) {
  ExperimentConfig cfg;
  cfg.seed = require_seed(g, "experiment");
  cfg.S = a.S;
  cfg.gamma = a.gamma;
  cfg.n = a.n;
  cfg.trials = a.trials;
  cfg.threads = g.parallel;
  cfg.fqi_iterations = a.fqi_iterations;
  cfg.algorithms.clear();
  std::stringstream ss(a.algorithms);
  std::string item;
  while (std::getline(ss, item, ',')) cfg.algorithms.push_back(algorithm_from_name(item));
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw ValidationError("--gamma must lie in (0, 1)");

  const ExperimentResult res = run_distinguishing_experiment(cfg);
  const auto spec = make_t1_spec(cfg.S, cfg.gamma);
  double tv = 1.0;
  if (cfg.n <= 1000) tv = std::min(1.0, tv_upper_t1(spec, static_cast<int>(cfg.n), {1, 1, false, true}).tv_upper);

  Json summary = Json::array();
  for (const auto& s : res.summary) {
    summary.push_back({{"algorithm", algorithm_name(s.algorithm)}, {"trials", s.trials},
                       {"mean_regret", s.mean_regret}, {"regret_ci", s.regret_ci}, {"error_rate", s.error_rate},
                       {"error_ci", s.error_ci}});
  }
  Json algs = Json::array();
  for (auto x : cfg.algorithms) algs.push_back(algorithm_name(x));
  const double g2 = cfg.gamma * cfg.gamma / (1.0 - cfg.gamma);
  Json out = {
      {"config", {{"S", cfg.S}, {"gamma", cfg.gamma}, {"n", cfg.n}, {"trials", cfg.trials}, {"seed", cfg.seed},
                  {"algorithms", algs}, {"parallel", cfg.threads}, {"fqi_iterations", cfg.fqi_iterations}}},
      {"S", res.S},
      {"gap", res.gap},
      {"regret_structure_ok", res.regret_structure_ok},
      {"summary", summary},
      {"tv_upper", tv},
      {"regret_floor_mixture", g2 / 32.0 * (1.0 - tv)},
      {"regret_floor_half", g2 / 64.0},
      {"note", "brm and fqi are plug-in instantiations over the class {f1, f2}; bayes is the exact mixture test"}};
  emit(g, "experiment_result", out);

  std::ostringstream csv;
  csv << "trial,family,instance_hash,algorithm,action,regret,correct,log_odds,fqi_fixpoint,fqi_oscillation\n";
  for (const auto& r : res.rows) {
    csv << r.trial << ',' << r.family << ',' << r.instance_hash << ',' << algorithm_name(r.algorithm) << ','
        << r.action << ',' << num(r.regret) << ',' << (r.correct ? 1 : 0) << ',' << num(r.log_odds) << ','
        << (r.fqi_fixpoint ? 1 : 0) << ',' << (r.fqi_oscillation ? 1 : 0) << '\n';
  }
  write_file_atomic(out_path(g, "experiment_trials.csv"), csv.str());
  for (const auto& s : res.summary) {
    std::cout << algorithm_name(s.algorithm) << " mean_regret " << num(s.mean_regret) << " +- " << num(s.regret_ci)
              << " error " << num(s.error_rate) << "\n";
  }
  return res.regret_structure_ok ? kOk : kInvariant;
}

std::optional<Json> try_load(const fs::path& p) {
  if (!fs::exists(p)) return std::nullopt;
  try {
    return Json::parse(read_file(p.string()));
  } catch (const Json::parse_error& e) {
    throw ValidationError(p.string() + " is not valid JSON");
  }
}

std::string fmt(const Json& v) {
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
  }
  return v.is_string() ? v.get<std::string>() : v.dump();
}

int cmd_report(const Global& g, const ReportArgs& a) {
  const fs::path dir = a.in.empty() ? fs::path(g.out) : fs::path(a.in);
  std::ostringstream md;
  md << "# offlinelab report\n\n";
  bool any = false;
  for (const char* stem : {"build_summary", "verify_report"}) {
    if (auto j = try_load(dir / (std::string(stem) + ".json"))) {
      any = true;
      md << "## " << stem << "\n\n";
      md << "instance `" << fmt(j->value("instance_hash", Json("?"))) << "`\n\n";
      md << "| check | value | bound | result |\n|---|---|---|---|\n";
      for (const auto& c : j->at("checks")) {
        md << "| " << fmt(c["name"]) << " | " << fmt(c["value"]) << " | " << fmt(c["bound"]) << " | "
           << (c["passed"].get<bool>() ? "pass" : "FAIL") << " |\n";
      }
      md << "\n";
    }
  }
  if (auto j = try_load(dir / "divergence_report.json")) {
    any = true;
    md << "## divergence\n\n";
    for (const char* k : {"construction", "S", "n", "tv_upper", "tv_le_half", "tv_le_three_quarters", "in_regime",
                          "tv_bruteforce", "tv_bound", "target", "certified", "ref_exact", "regret_lower_bound"}) {
      if (j->contains(k)) md << "- " << k << ": " << fmt((*j)[k]) << "\n";
    }
    md << "\n";
  }
  if (auto j = try_load(dir / "experiment_result.json")) {
    any = true;
    md << "## experiment\n\n";
    md << "S " << fmt((*j)["S"]) << ", n " << fmt((*j)["config"]["n"]) << ", trials " << fmt((*j)["config"]["trials"])
       << ", gap " << fmt((*j)["gap"]) << ", regret structure ok: " << fmt((*j)["regret_structure_ok"]) << "\n\n";
    md << "| algorithm | mean regret | 95% half-width | error rate |\n|---|---|---|---|\n";
    for (const auto& s : j->at("summary")) {
      md << "| " << fmt(s["algorithm"]) << " | " << fmt(s["mean_regret"]) << " | " << fmt(s["regret_ci"]) << " | "
         << fmt(s["error_rate"]) << " |\n";
    }
    md << "\nhalf-bound floor " << fmt((*j)["regret_floor_half"]) << "\n\n";
  }
  if (!any) throw IoError("no result files found in " + dir.string());
  write_file_atomic(out_path(g, "report.md"), md.str());
  return kOk;
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"offline RL lower-bound laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  std::uint64_t seed = 0;
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--parallel", g.parallel, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--format", g.format, "primary report format")->check(CLI::IsMember({"json", "csv"}));
  auto* seed_opt = app.add_option("--seed", seed, "master seed");

  BuildArgs ba;
  auto* build = app.add_subcommand("build", "sample an instance and summarize it");
  build->add_option("--construction", ba.construction)->check(CLI::IsMember({"theorem1", "theorem2"}));
  build->add_option("--S", ba.S, "number of states (rounded up)")->required();
  build->add_option("--gamma", ba.gamma);
  build->add_option("--family", ba.family)->check(CLI::IsMember({1, 2}));
  build->add_option("--L", ba.L, "layers (theorem2)");
  build->add_option("--scheme", ba.scheme, "theta1,alpha1,beta1,theta2,alpha2,beta2,w (theorem1)");
  build->add_flag("--with-mdp", ba.with_mdp, "embed the tabular MDP in instance.json");
  build->add_option("--policies", ba.policies, "random policies for the realizability check");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--instance", va.instance, "instance JSON; otherwise built inline");
  verify->add_option("--construction", va.inline_args.construction)->check(CLI::IsMember({"theorem1", "theorem2"}));
  verify->add_option("--S", va.inline_args.S);
  verify->add_option("--gamma", va.inline_args.gamma);
  verify->add_option("--family", va.inline_args.family)->check(CLI::IsMember({1, 2}));
  verify->add_option("--L", va.inline_args.L);
  verify->add_option("--scheme", va.inline_args.scheme);
  verify->add_option("--policies", va.policies);
  verify->add_option("--cert-instances", va.cert_instances);

  DivergenceArgs da;
  auto* div = app.add_subcommand("divergence", "chi-square and TV bounds");
  div->add_option("--construction", da.construction)->check(CLI::IsMember({"theorem1", "theorem2"}));
  div->add_option("--S", da.S);
  div->add_option("--gamma", da.gamma);
  div->add_option("--n", da.n);
  div->add_option("--L", da.L);
  div->add_option("--partitions", da.partitions);
  div->add_option("--c", da.c, "split constant for the eps bounds");
  div->add_flag("--brute-force", da.brute_force, "add enumeration oracles (small sizes only)");
  div->add_flag("--full-range", da.full_range, "sum the whole hypergeometric support");

  ExperimentArgs ea;
  auto* exp = app.add_subcommand("experiment", "seeded regret experiment");
  exp->add_option("--S", ea.S);
  exp->add_option("--gamma", ea.gamma);
  exp->add_option("--n", ea.n);
  exp->add_option("--trials", ea.trials)->check(CLI::PositiveNumber);
  exp->add_option("--algorithms", ea.algorithms, "comma-separated subset of brm,fqi,bayes");
  exp->add_option("--fqi-iterations", ea.fqi_iterations)->check(CLI::PositiveNumber);

  ReportArgs ra;
  auto* rep = app.add_subcommand("report", "markdown summary of result files");
  rep->add_option("--in", ra.in, "directory with result JSON (default --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (*seed_opt) g.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  int code = kOk;
  std::string error;
  try {
    std::error_code ec;
    fs::create_directories(g.out, ec);
    if (*build) code = cmd_build(g, ba);
    else if (*verify) code = cmd_verify(g, va);
    else if (*div) code = cmd_divergence(g, da);
    else if (*exp) code = cmd_experiment(g, ea);
    else if (*rep) code = cmd_report(g, ra);
  } catch (const IoError& e) {
    error = e.what();
    code = kIo;
  } catch (const ValidationError& e) {
    error = e.what();
    code = kUsage;
  } catch (const SizeGuardError& e) {
    error = e.what();
    code = kSizeGuard;
  } catch (const InvariantError& e) {
    error = e.what();
    code = kInvariant;
  } catch (const fs::filesystem_error& e) {
    error = e.what();
    code = kIo;
  } catch (const std::invalid_argument& e) {
    error = std::string("bad numeric argument: ") + e.what();
    code = kUsage;
  } catch (const std::exception& e) {
    error = e.what();
    code = kInvariant;
  }
  if (!error.empty()) std::cerr << "error: " << error << "\n";

  // Wall-clock data goes only to this sidecar so results stay byte-stable.
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream log;
  log << "time " << timestamp() << "\nargv";
  for (int i = 0; i < argc; ++i) log << ' ' << argv[i];
  log << "\nruntime_seconds " << num(secs) << "\nexit " << code << "\n";
  if (!error.empty()) log << "error " << error << "\n";
  try {
    write_file_atomic(out_path(g, "run.log"), log.str());
  } catch (const IoError&) {
    if (code == kOk) code = kIo;
  }
  return code;
}
