#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "slent/analysis.hpp"
#include "slent/reduction.hpp"
#include "slent/semantics.hpp"

namespace slent {

using Json = nlohmann::json;

/// `store: x->3 nil->0` / `heap: 3 -> (5); ...` lines.
std::string structure_text(const Structure& st);
Json structure_json(const Structure& st);
Json verdict_json(const Verdict& v);
std::string verdict_text(const Verdict& v);

/// Per-side flags, safe bit and violations; `exact_depth` switches the
/// established flags to the cross-checked tri-state (true/false/"unknown").
Json classification_json(const EntailmentProblem& p, const ClassificationReport& rep,
                         std::optional<uint32_t> exact_depth = std::nullopt);

Json manifest_json(const ReducedProblem& red);

/// Writes out/rhat.sid, out/instance_<k>.entail and out/manifest.json.
void write_reduce_outputs(const ReducedProblem& red, const std::filesystem::path& outdir);

struct InstanceOutcome {
  size_t index = 0;
  Verdict verdict;
  bool transfer_ok = false;           // truncation refutes the source problem
  std::optional<Structure> truncated;  // the transferred counterexample
};

struct XCheckResult {
  Verdict source;
  uint32_t source_bound = 0;
  uint32_t instance_bound = 0;
  std::vector<InstanceOutcome> instances;
  bool any_instance_counterexample = false;
  bool resource_exceeded = false;
  /// Source counterexamples are matched by some instance, and every instance
  /// counterexample truncates to a verified source counterexample.
  bool agreement = true;
};

/// Reduces the problem, runs the oracle on the source at `max_heap` and on
/// every instance at max_heap*(1+mu)+mu, and checks counterexample transfer
/// through truncation.
XCheckResult run_xcheck(const EntailmentProblem& p, uint32_t max_heap,
                        const ReduceOptions& reduce_opts = {},
                        const OracleOptions& oracle_opts = {});

Json xcheck_json(const XCheckResult& r);

}  // namespace slent
