#include "slent/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "slent/expansion.hpp"
#include "slent/printer.hpp"

namespace slent {

std::string structure_text(const Structure& st) {
  std::ostringstream os;
  os << "store:";
  for (const auto& [v, l] : st.store.vars) os << " " << symbols::name(v) << "->" << l;
  os << " nil->0\n";
  os << "heap:";
  if (st.heap.cells.empty()) os << " (empty)";
  bool first = true;
  for (const auto& [l, fs] : st.heap.cells) {
    os << (first ? " " : "; ") << l << " -> (";
    for (size_t i = 0; i < fs.size(); ++i) {
      if (i) os << ",";
      os << fs[i];
    }
    os << ")";
    first = false;
  }
  os << "\n";
  return os.str();
}

Json structure_json(const Structure& st) {
  Json store = Json::object();
  for (const auto& [v, l] : st.store.vars) store[symbols::name(v)] = l;
  store["nil"] = 0;
  Json heap = Json::object();
  for (const auto& [l, fs] : st.heap.cells) heap[std::to_string(l)] = fs;
  return Json{{"store", store}, {"heap", heap}, {"width", st.heap.width}};
}

Json verdict_json(const Verdict& v) {
  Json out;
  switch (v.kind) {
    case Verdict::Kind::NoCounterexampleUpTo:
      out["kind"] = "no-counterexample";
      break;
    case Verdict::Kind::Counterexample:
      out["kind"] = "counterexample";
      break;
    case Verdict::Kind::ResourceExceeded:
      out["kind"] = "resource-exceeded";
      break;
  }
  out["bound"] = v.bound;
  if (v.witness) out["witness"] = structure_json(*v.witness);
  return out;
}

std::string verdict_text(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::NoCounterexampleUpTo:
      return "no counterexample up to " + std::to_string(v.bound) + " heap cells\n";
    case Verdict::Kind::Counterexample:
      return "counterexample found:\n" + structure_text(*v.witness);
    case Verdict::Kind::ResourceExceeded:
      return "resource budget exceeded before bound " + std::to_string(v.bound) + "\n";
  }
  return {};
}

namespace {

Json profile_json(const FvProfile& lambda) {
  Json out = Json::object();
  for (const auto& [p, positions] : lambda) {
    out[symbols::name(p)] = std::vector<uint32_t>(positions.begin(), positions.end());
  }
  return out;
}

Json preds_json(const std::set<PredId>& preds) {
  std::vector<std::string> names;
  for (PredId p : preds) names.push_back(symbols::name(p));
  return names;
}

Json side_json(const SideFlags& side) {
  return Json{{"progressing", side.progressing},
              {"connected", side.connected},
              {"established", side.established},
              {"lambda_connected", side.lambda_connected},
              {"lambda_restricted", side.lambda_restricted}};
}

// Established flag refined by the bounded unfolding cross-check.
Json exact_established_json(const EntailmentProblem& p, const std::set<PredId>& preds,
                            bool fixpoint_flag, uint32_t depth) {
  if (fixpoint_flag) return true;
  MustAllocSets must = must_alloc_params(p.sid, preds);
  bool any_definite = false;
  for (PredId q : preds) {
    for (const Rule& r : p.sid.rules(q)) {
      if (exact_establishment(r, p.sid, must, depth) == Established::No) any_definite = true;
    }
  }
  if (any_definite) return false;
  return "unknown";
}

}  // namespace

Json classification_json(const EntailmentProblem& p, const ClassificationReport& rep,
                         std::optional<uint32_t> exact_depth) {
  Json out;
  out["left"] = side_json(rep.left);
  out["right"] = side_json(rep.right);
  if (exact_depth) {
    out["left"]["established"] =
        exact_established_json(p, rep.left_preds, rep.left.established, *exact_depth);
    out["right"]["established"] =
        exact_established_json(p, rep.right_preds, rep.right.established, *exact_depth);
  }
  out["all_rules_progressing"] = rep.all_rules_progressing;
  out["psi_restricted"] = rep.psi_restricted;
  out["safe"] = rep.safe;
  out["profiles"] = Json{{"rhs", profile_json(rep.lambda_rhs)}, {"lhs", profile_json(rep.lambda_lhs)}};
  out["preds"] = Json{{"left", preds_json(rep.left_preds)}, {"right", preds_json(rep.right_preds)}};
  Json violations = Json::array();
  for (const Violation& v : rep.violations) {
    Json item;
    item["pred"] = v.rule == 0 && v.condition == "psi-restricted" ? "" : symbols::name(v.pred);
    item["rule"] = v.rule;
    item["condition"] = v.condition;
    item["witness"] = v.witness;
    violations.push_back(std::move(item));
  }
  out["violations"] = std::move(violations);
  return out;
}

namespace {

Json log_json(const GenerationLog& log, bool left) {
  Json out;
  out["candidates"] = log.candidates;
  out["kept"] = log.kept;
  out["sigma_i_pairs"] = log.sigma_i_pairs;
  Json entries = Json::array();
  for (const CandidateRecord& rec : log.entries) {
    Json item;
    item["pred"] = symbols::name(rec.pred);
    item["source"] = symbols::name(rec.source_pred);
    item["rule"] = rec.source_rule;
    Json sigma = Json::object();
    for (const auto& [from, to] : rec.sigma) sigma[from] = to;
    item["sigma"] = std::move(sigma);
    item["I"] = rec.i_set;
    if (left) {
      item["X"] = rec.x_set;
      item["deco"] = rec.deco;
    }
    item["text"] = rec.rule_text;
    item["kept"] = rec.kept;
    item["reason"] = rec.reason;
    entries.push_back(std::move(item));
  }
  out["entries"] = std::move(entries);
  return out;
}

}  // namespace

Json manifest_json(const ReducedProblem& red) {
  const NormalizedProblem& n = red.normalized;
  Json out;
  Measure m = measure(n.problem);
  std::vector<std::string> w_names;
  for (VarId v : n.ctx.w) w_names.push_back(symbols::name(v));
  out["problem"] = Json{{"kappa", n.ctx.kappa}, {"nu", n.ctx.nu},       {"mu", n.ctx.mu},
                        {"w", w_names},         {"size", m.size},       {"width", m.width},
                        {"bottom", n.ctx.bottom_name}};
  out["lambda"] = profile_json(n.lambda);
  out["preds"] =
      Json{{"left", preds_json(n.left_preds)}, {"right", preds_json(n.right_preds)}};
  out["right"] = log_json(red.right_log, false);
  out["left"] = log_json(red.left_log, true);
  out["instances"] = red.instances.size();
  out["bounds"] = Json{{"decor_R",
                        Json{{"measured", red.bounds.decor_r_measured},
                             {"candidates", red.bounds.decor_r_candidates},
                             {"bound", red.bounds.decor_r_bound},
                             {"ok", red.bounds.decor_r_measured <= red.bounds.decor_r_bound}}},
                       {"decor_phi",
                        Json{{"measured", red.bounds.decor_phi_measured},
                             {"bound", red.bounds.decor_phi_bound},
                             {"ok", red.bounds.decor_phi_measured <= red.bounds.decor_phi_bound}}}};
  return out;
}

void write_reduce_outputs(const ReducedProblem& red, const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);
  {
    std::ofstream f(outdir / "rhat.sid");
    f << "fields " << red.rhat.record_width << ";\n" << print_rules(red.rhat);
  }
  for (size_t k = 0; k < red.instances.size(); ++k) {
    std::ofstream f(outdir / ("instance_" + std::to_string(k) + ".entail"));
    f << print(red.instance_problem(k));
  }
  {
    std::ofstream f(outdir / "manifest.json");
    f << manifest_json(red).dump(2) << "\n";
  }
}

XCheckResult run_xcheck(const EntailmentProblem& p, uint32_t max_heap,
                        const ReduceOptions& reduce_opts, const OracleOptions& oracle_opts) {
  XCheckResult result;
  result.source_bound = max_heap;
  ReducedProblem red = reduce_safe_to_pce(p, reduce_opts);
  const uint32_t mu = red.normalized.ctx.mu;
  result.instance_bound = max_heap * (1 + mu) + mu;

  result.source = find_counterexample_bounded(p, max_heap, oracle_opts);
  if (result.source.kind == Verdict::Kind::ResourceExceeded) result.resource_exceeded = true;

  for (size_t k = 0; k < red.instances.size(); ++k) {
    InstanceOutcome outcome;
    outcome.index = k;
    EntailmentProblem instance = red.instance_problem(k);
    outcome.verdict = find_counterexample_bounded(instance, result.instance_bound, oracle_opts);
    if (outcome.verdict.kind == Verdict::Kind::ResourceExceeded) result.resource_exceeded = true;
    if (outcome.verdict.kind == Verdict::Kind::Counterexample) {
      result.any_instance_counterexample = true;
      const Structure& wide = *outcome.verdict.witness;
      Structure truncated{wide.store, truncate(wide.heap, p.sid.record_width)};
      outcome.transfer_ok = check_models(truncated, p.lhs, p.sid) &&
                            !check_models(truncated, p.rhs, p.sid);
      outcome.truncated = truncated;
      if (!outcome.transfer_ok) result.agreement = false;
      if (result.source.kind == Verdict::Kind::NoCounterexampleUpTo &&
          truncated.heap.size() <= max_heap) {
        result.agreement = false;  // the source search should have found this
      }
    }
    result.instances.push_back(std::move(outcome));
  }
  if (result.source.kind == Verdict::Kind::Counterexample &&
      !result.any_instance_counterexample) {
    result.agreement = false;
  }
  return result;
}

Json xcheck_json(const XCheckResult& r) {
  Json out;
  out["source"] = verdict_json(r.source);
  out["source_bound"] = r.source_bound;
  out["instance_bound"] = r.instance_bound;
  Json items = Json::array();
  for (const InstanceOutcome& o : r.instances) {
    Json item;
    item["index"] = o.index;
    item["verdict"] = verdict_json(o.verdict);
    if (o.verdict.kind == Verdict::Kind::Counterexample) {
      item["transfer_ok"] = o.transfer_ok;
      if (o.truncated) item["truncated"] = structure_json(*o.truncated);
    }
    items.push_back(std::move(item));
  }
  out["instances"] = std::move(items);
  out["any_instance_counterexample"] = r.any_instance_counterexample;
  out["resource_exceeded"] = r.resource_exceeded;
  out["agreement"] = r.agreement;
  return out;
}

}  // namespace slent
