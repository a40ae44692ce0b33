#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "slent/cfg.hpp"
#include "slent/parser.hpp"
#include "slent/pipeline.hpp"
#include "slent/printer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCounterexample = 1;
constexpr int kExitParse = 2;
constexpr int kExitGate = 3;
constexpr int kExitResource = 4;

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw slent::Error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

slent::EntailmentProblem load_problem(const std::string& path) {
  return slent::parse_problem(read_file(path));
}

int run_classify(const std::string& file, bool json, std::optional<uint32_t> exact_depth) {
  slent::EntailmentProblem p = load_problem(file);
  slent::ClassificationReport rep = slent::classify_problem(p);
  slent::Json out = slent::classification_json(p, rep, exact_depth);
  if (json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "safe: " << (rep.safe ? "yes" : "no") << "\n"
              << "left:  " << out["left"].dump() << "\n"
              << "right: " << out["right"].dump() << "\n"
              << "psi restricted w.r.t. fv(lhs): " << (rep.psi_restricted ? "yes" : "no") << "\n";
    for (const auto& v : out["violations"]) {
      std::cout << "violation: " << v["pred"].get<std::string>() << " rule " << v["rule"]
                << ": " << v["condition"].get<std::string>() << " ("
                << v["witness"].get<std::string>() << ")\n";
    }
  }
  return kExitOk;
}

int run_reduce(const std::string& file, const std::string& outdir, uint64_t budget, bool force,
               bool json) {
  slent::EntailmentProblem p = load_problem(file);
  slent::ReduceOptions opts;
  opts.normalize.force = force;
  opts.build.budget_per_rule = budget;
  slent::ReducedProblem red = slent::reduce_safe_to_pce(p, opts);
  slent::write_reduce_outputs(red, outdir);
  if (json) {
    std::cout << slent::manifest_json(red).dump(2) << "\n";
  } else {
    std::cout << "right rules: " << red.right_log.kept << " kept of " << red.right_log.candidates
              << " candidates\n"
              << "left rules:  " << red.left_log.kept << " kept of " << red.left_log.candidates
              << " candidates\n"
              << "instances:   " << red.instances.size() << "\n"
              << "wrote " << outdir << "/rhat.sid, instance_<k>.entail, manifest.json\n";
  }
  return kExitOk;
}

int run_oracle(const std::string& file, uint32_t max_heap, uint64_t steps, bool json) {
  slent::EntailmentProblem p = load_problem(file);
  slent::OracleOptions opts;
  opts.max_steps = steps;
  slent::Verdict v = slent::find_counterexample_bounded(p, max_heap, opts);
  if (json) {
    std::cout << slent::verdict_json(v).dump(2) << "\n";
  } else {
    std::cout << slent::verdict_text(v);
  }
  switch (v.kind) {
    case slent::Verdict::Kind::Counterexample:
      return kExitCounterexample;
    case slent::Verdict::Kind::ResourceExceeded:
      return kExitResource;
    default:
      return kExitOk;
  }
}

int run_xcheck_cmd(const std::string& file, uint32_t max_heap, uint64_t steps, bool force,
                   bool json) {
  slent::EntailmentProblem p = load_problem(file);
  slent::ReduceOptions ropts;
  ropts.normalize.force = force;
  slent::OracleOptions oopts;
  oopts.max_steps = steps;
  slent::XCheckResult r = slent::run_xcheck(p, max_heap, ropts, oopts);
  if (json) {
    std::cout << slent::xcheck_json(r).dump(2) << "\n";
  } else {
    std::cout << "source: " << slent::verdict_text(r.source);
    for (const auto& o : r.instances) {
      std::cout << "instance " << o.index << ": " << slent::verdict_text(o.verdict);
      if (o.verdict.kind == slent::Verdict::Kind::Counterexample) {
        std::cout << "  transfer " << (o.transfer_ok ? "ok" : "FAILED") << "\n";
      }
    }
    std::cout << "agreement: " << (r.agreement ? "yes" : "NO") << "\n";
  }
  if (r.resource_exceeded) return kExitResource;
  bool cex = r.source.kind == slent::Verdict::Kind::Counterexample ||
             r.any_instance_counterexample;
  return cex ? kExitCounterexample : kExitOk;
}

int run_gen_cfg(const std::string& grammar_file, const std::string& out_file) {
  slent::Grammar g = slent::parse_grammar(read_file(grammar_file));
  slent::EntailmentProblem p = slent::gen_cfg_instance(g);
  std::string text = slent::print(p);
  if (out_file.empty() || out_file == "-") {
    std::cout << text;
  } else {
    std::ofstream f(out_file);
    if (!f) throw slent::Error("cannot write " + out_file);
    f << text;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"separation-logic entailment toolkit: classification, safe-to-PCE reduction and "
               "bounded counterexample search"};
  app.require_subcommand(1);

  std::string file, outdir = "out", outfile, grammar_file;
  bool json = false, force = false;
  uint32_t max_heap = 2;
  uint64_t steps = 0, budget = 1000000;
  int32_t exact_depth = -1;

  auto* classify = app.add_subcommand("classify", "classify a problem against the decidability conditions");
  classify->add_option("file", file)->required();
  classify->add_flag("--json", json, "JSON report");
  classify->add_option("--exact-establishment", exact_depth,
                       "cross-check establishment with unfoldings up to this depth");

  auto* reduce = app.add_subcommand("reduce", "reduce a safe problem to PCE instances");
  reduce->add_option("file", file)->required();
  reduce->add_option("-o,--out", outdir, "output directory");
  reduce->add_option("--budget", budget, "candidate cap per source rule");
  reduce->add_flag("--force", force, "bypass the safe-class gate");
  reduce->add_flag("--json", json, "print the manifest");

  auto* oracle = app.add_subcommand("oracle", "bounded counterexample search");
  oracle->add_option("file", file)->required();
  oracle->add_option("--max-heap", max_heap, "heap cell bound")->required();
  oracle->add_option("--steps", steps, "abstract step budget (0 = unlimited)");
  oracle->add_flag("--json", json, "JSON verdict");

  auto* xcheck = app.add_subcommand("xcheck", "reduce, search both sides, check transfer");
  xcheck->add_option("file", file)->required();
  xcheck->add_option("--max-heap", max_heap, "source heap cell bound")->required();
  xcheck->add_option("--steps", steps, "abstract step budget (0 = unlimited)");
  xcheck->add_flag("--force", force, "bypass the safe-class gate");
  xcheck->add_flag("--json", json, "JSON report");

  auto* gen = app.add_subcommand("gen-cfg", "emit the grammar-universality entailment");
  gen->add_option("grammar", grammar_file)->required();
  gen->add_option("-o,--out", outfile, "output file ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (classify->parsed()) {
      std::optional<uint32_t> depth;
      if (exact_depth >= 0) depth = static_cast<uint32_t>(exact_depth);
      return run_classify(file, json, depth);
    }
    if (reduce->parsed()) return run_reduce(file, outdir, budget, force, json);
    if (oracle->parsed()) return run_oracle(file, max_heap, steps, json);
    if (xcheck->parsed()) return run_xcheck_cmd(file, max_heap, steps, force, json);
    if (gen->parsed()) return run_gen_cfg(grammar_file, outfile);
  } catch (const slent::NotSafe& e) {
    std::cerr << "not safe: classification report follows\n";
    std::cerr << slent::classification_json({}, e.report).dump(2) << "\n";
    return kExitGate;
  } catch (const slent::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const slent::NonProgressingSid& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return kExitGate;
  } catch (const slent::CombinatorialBudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitResource;
  } catch (const slent::NotGreibach& e) {
    std::cerr << "grammar error: " << e.what() << "\n";
    return kExitParse;
  } catch (const slent::EpsilonInLanguage& e) {
    std::cerr << "grammar error: " << e.what() << "\n";
    return kExitParse;
  } catch (const slent::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}
