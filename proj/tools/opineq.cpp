// Command-line front end: gen, verify, bounds, sobolev.
// Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or input error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "opineq/harness.hpp"

namespace {

using namespace opineq;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw InputError("failed writing '" + path + "'");
}

int cmd_gen(const std::string& spec_path, const std::string& out_path) {
  const InstanceSpec spec = spec_from_json(read_json(spec_path));
  EnvelopeCheck chk;
  const InequalityInstance inst = build_instance(spec, &chk);
  write_json(out_path, to_json(inst));
  std::cout << "wrote instance (n=" << inst.arity() << ", dim=" << inst.grid.dim_in()
            << ", envelope checked at " << chk.nodes << " nodes)\n";
  return kPass;
}

struct VerifyArgs {
  std::string suite;
  long long trials = -1;
  std::uint64_t seed = 42;
  double tol = 1e-8;
  std::string report;
  long long replay = -1;
};

int cmd_verify(const VerifyArgs& a) {
  std::vector<std::string> suites;
  if (a.suite == "all") {
    suites = suite_names();
  } else if (is_suite(a.suite)) {
    suites = {a.suite};
  } else {
    throw InputError("unknown suite '" + a.suite + "'");
  }
  if (!(a.tol > 0.0)) throw InputError("--tol must be positive");

  if (a.replay >= 0) {
    if (suites.size() != 1) throw InputError("--replay needs a single suite");
    std::map<std::string, double> metrics;
    const TrialRecord rec = run_trial(suites[0], a.seed, std::size_t(a.replay), a.tol, &metrics);
    SuiteReport one;
    one.suite = suites[0];
    one.seed = a.seed;
    one.tolerance = a.tol;
    one.trials = 1;
    (rec.pass ? one.passes : one.fails) = 1;
    if (!rec.pass) one.failure_seeds.push_back(rec.seed);
    one.worst_relative_margin = rec.relative_margin;
    one.metrics = metrics;
    one.records.push_back(rec);
    const Json j = to_json(one);
    std::cout << j["records"][0].dump(2) << '\n';
    if (!a.report.empty()) write_json(a.report, j);
    return rec.pass ? kPass : kFail;
  }

  const unsigned threads = thread_count_from_env();
  const auto start = std::chrono::steady_clock::now();
  Json out{{"opineq-schema", kSchemaVersion},
           {"seed", a.seed},
           {"tolerance", a.tol},
           {"threads", threads},
           {"passes", 0},
           {"fails", 0},
           {"suites", Json::array()}};
  std::size_t passes = 0, fails = 0;
  for (const auto& s : suites) {
    const std::size_t n = a.trials >= 0 ? std::size_t(a.trials) : default_trials(s);
    const SuiteReport r = run_suite(s, n, a.seed, a.tol, threads);
    passes += r.passes;
    fails += r.fails;
    std::printf("%-13s %5zu/%-5zu pass  worst relative margin %+.3e  %.2fs\n", s.c_str(), r.passes,
                r.trials, r.worst_relative_margin, r.wall_time_s);
    for (const auto& rec : r.records) {
      if (!rec.pass) {
        std::printf("  FAIL trial %zu (replay: --suite %s --seed %llu --replay %zu): %s\n", rec.index,
                    s.c_str(), static_cast<unsigned long long>(a.seed), rec.index,
                    rec.message.c_str());
      }
    }
    out["suites"].push_back(to_json(r));
  }
  out["passes"] = passes;
  out["fails"] = fails;
  out["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!a.report.empty()) write_json(a.report, out);
  std::printf("total %zu passed, %zu failed\n", passes, fails);
  return fails == 0 ? kPass : kFail;
}

InequalityInstance load_instance(const std::string& path) {
  InequalityInstance inst = instance_from_json(read_json(path));
  check_instance(inst);
  return inst;
}

int cmd_bounds(const std::string& path, const std::string& theorem, const std::string& side_arg,
               double alpha) {
  const InequalityInstance inst = load_instance(path);
  std::vector<Side> sides;
  if (side_arg == "upper" || side_arg == "both") sides.push_back(Side::Upper);
  if (side_arg == "lower" || side_arg == "both") sides.push_back(Side::Lower);

  Json reports = Json::array();
  bool ok = true;
  for (Side side : sides) {
    BoundReport r;
    FKind fk = Difference{alpha};
    if (theorem == "general-difference") {
      r = general_bound(inst, fk, side);
    } else if (theorem == "general-congruence") {
      fk = Congruence{};
      r = general_bound(inst, fk, side);
    } else if (theorem == "alpha") {
      r = alpha_difference_bound(inst, alpha, side);
    } else if (theorem == "ratio") {
      fk = Congruence{};
      r = ratio_bound(inst, side);
    } else {
      fk = Difference{1.0};
      r = difference_bound(inst, side);
    }
    Json j = to_json(r);
    const std::string why = admissibility(inst, fk, side);
    if (!why.empty()) j["inadmissible_because"] = why;
    ok = ok && r.verdict.holds;
    reports.push_back(std::move(j));
  }
  std::cout << Json{{"theorem", theorem}, {"reports", std::move(reports)}}.dump(2) << '\n';
  return ok ? kPass : kFail;
}

int cmd_sobolev(const std::string& path, int m, double p) {
  const InequalityInstance inst = load_instance(path);
  const SobolevExponents e = sobolev_conjugate(m, p);
  Json out{{"m", e.m}, {"p", e.p}, {"q", e.q}};
  bool ok = true;

  const auto section = [&](const char* name, auto&& verify) {
    try {
      const SobolevReport rep = verify(inst, e);
      Json j = to_json(rep.bound);
      j["constants"] = to_json(rep.constants);
      j["trivial"] = rep.trivial;
      if (!rep.bound.admissible) j["inadmissible_because"] = "f is not a function of one operator";
      ok = ok && rep.bound.verdict.holds;
      out[name] = std::move(j);
    } catch (const DomainError& err) {
      out[name] = Json{{"error", err.what()}};
      ok = false;
    }
  };
  section("original", verify_sobolev_original);
  section("mean", verify_sobolev_mean);

  const EmbeddingNorms norms = embedding_norms(inst, e);
  out["norms"] = Json{{"W1q", norms.w_norm}, {"Lp", norms.l_norm}, {"member", norms.member()}};
  std::cout << out.dump(2) << '\n';
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of operator inequalities for positive linear maps"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Materialize an instance from a spec file");
  std::string spec_path, out_path;
  gen->add_option("--spec", spec_path, "Instance spec (JSON)")->required();
  gen->add_option("--out", out_path, "Output instance file")->required();

  auto* verify = app.add_subcommand("verify", "Run randomized property suites");
  VerifyArgs va;
  std::vector<std::string> suite_choices = suite_names();
  suite_choices.emplace_back("all");
  verify->add_option("--suite", va.suite, "Suite tag or 'all'")
      ->required()
      ->check(CLI::IsMember(suite_choices));
  verify->add_option("--trials", va.trials, "Trials per suite (default: per-suite count)")
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", va.seed, "Base seed")->capture_default_str();
  verify->add_option("--tol", va.tol, "Relative Loewner margin tolerance")->capture_default_str();
  verify->add_option("--report", va.report, "Write the JSON report here");
  verify->add_option("--replay", va.replay, "Rerun only this trial index")
      ->check(CLI::NonNegativeNumber);

  auto* bounds = app.add_subcommand("bounds", "Evaluate one bound family on an instance");
  std::string inst_path, theorem, side = "both";
  double alpha = 0.0;
  bounds->add_option("--instance", inst_path, "Instance file (JSON)")->required();
  bounds->add_option("--theorem", theorem, "Bound family")
      ->required()
      ->check(CLI::IsMember(
          {"general-difference", "general-congruence", "alpha", "ratio", "difference"}));
  bounds->add_option("--side", side, "upper, lower or both")
      ->check(CLI::IsMember({"upper", "lower", "both"}))
      ->capture_default_str();
  bounds->add_option("--alpha", alpha, "alpha for the difference forms")->capture_default_str();

  auto* sob = app.add_subcommand("sobolev", "Sobolev-type constants and verdicts");
  std::string sob_path;
  int m = 3;
  double p = 2.0;
  sob->add_option("--instance", sob_path, "Instance file (JSON)")->required();
  sob->add_option("--m", m, "Integer m > 1")->capture_default_str();
  sob->add_option("--p", p, "1 < p < m")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*gen) return cmd_gen(spec_path, out_path);
    if (*verify) return cmd_verify(va);
    if (*bounds) return cmd_bounds(inst_path, theorem, side, alpha);
    if (*sob) return cmd_sobolev(sob_path, m, p);
  } catch (const opineq::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
