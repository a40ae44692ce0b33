#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slent/analysis.hpp"
#include "slent/ast.hpp"

namespace slent {

/// Thrown when the classification gate rejects a problem; carries the report.
struct NotSafe : Error {
  ClassificationReport report;
  explicit NotSafe(ClassificationReport rep)
      : Error("problem is not in the safe class"), report(std::move(rep)) {}
};

/// Constants of one reduction run: the record widths, the free-variable
/// vector and the bottom predicate allocating dangling locations.
struct ContextConstants {
  uint32_t kappa = 0;
  uint32_t nu = 0;
  uint32_t mu = 0;
  std::vector<VarId> w;
  PredId bottom;
  std::string bottom_name;
};

struct NormalizeOptions {
  bool force = false;  // bypass the safe-class gate
};

/// Problem after the pre-reduction rewrites: formulas free of points-to
/// atoms, disjoint left/right predicate cones, genbod first arguments, a
/// uniform existential count mu, and nu > 0.
struct NormalizedProblem {
  EntailmentProblem problem;
  std::set<PredId> left_preds, right_preds;
  ContextConstants ctx;
  FvProfile lambda;  // fv-profile of the normalized right-hand side
};

NormalizedProblem normalize(const EntailmentProblem& p, const NormalizeOptions& opts = {});

/// Deterministic decorated-predicate names: `p__hat` for the consequent side,
/// `p__X_<bits>` for antecedent copies (bit i set iff position i+1 in X);
/// collisions with user names get a `#k` suffix.
PredId right_decorated_pred(const NormalizedProblem& n, PredId p);
PredId left_decorated_pred(const NormalizedProblem& n, PredId p, uint32_t x_mask);

/// Alloc positions of every decorated predicate (X for p_X, argument 1 for
/// the bottom predicate).
using DecorationTable = std::map<PredId, std::set<uint32_t>>;
DecorationTable decoration_table(const NormalizedProblem& n);

/// Replaces every predicate atom p(args) of the consequent by
/// p_hat(args, w).
Formula decorate_consequent(const Formula& psi, const NormalizedProblem& n);

struct CandidateRecord {
  PredId pred;              // decorated head
  PredId source_pred;
  uint32_t source_rule = 0;  // 1-based
  std::vector<std::pair<std::string, std::string>> sigma;
  std::vector<uint32_t> i_set;
  std::vector<uint32_t> x_set;             // left side only
  std::vector<std::vector<uint32_t>> deco;  // left side: per body atom
  std::string rule_text;                    // the candidate itself
  bool kept = false;
  std::string reason;  // "", "not-connected", "not-well-defined", "duplicate"
};

struct GenerationLog {
  uint64_t candidates = 0;
  uint64_t kept = 0;
  uint64_t sigma_i_pairs = 0;  // (sigma, I) instantiations, before X/decoration fan-out
  std::vector<CandidateRecord> entries;
};

struct BuildOptions {
  uint64_t budget_per_rule = 1000000;  // candidate cap per source rule
};

/// Consequent-side decorated SID: for every right-cone rule, every sigma into
/// the free variables and every bottom set I, keeping the connected results.
Sid build_right_sid(const NormalizedProblem& n, GenerationLog* log = nullptr,
                    const BuildOptions& opts = {});

/// Antecedent-side decorated SID: every X, sigma over the rule existentials,
/// body decoration and bottom set, keeping the well-defined results.
Sid build_left_sid(const NormalizedProblem& n, GenerationLog* log = nullptr,
                   const BuildOptions& opts = {});

/// All decorations of a points-to-free antecedent: the Cartesian product of
/// the X choices over its predicate atoms (atoms left to right, X in binary
/// order).
std::vector<Formula> enumerate_decorations(const Formula& phi, const NormalizedProblem& n);

/// Alloc set of a decorated layer formula: points-to sources plus arguments
/// at recorded alloc positions. No closure under equalities.
std::set<VarId> alloc_set_decorated(const std::vector<Atom>& atoms, const DecorationTable& table);
std::set<VarId> alloc_set_decorated(const Formula& f, const DecorationTable& table);

struct BoundsReport {
  uint64_t decor_r_measured = 0;  // (sigma, I) pairs over the left cone
  uint64_t decor_r_bound = 0;     // |R| * 2^mu * (n+nu+mu)^nu
  uint64_t decor_r_candidates = 0;
  uint64_t decor_phi_measured = 0;
  uint64_t decor_phi_bound = 0;  // 2^(arity * #atoms)
  bool ok() const {
    return decor_r_measured <= decor_r_bound && decor_phi_measured <= decor_phi_bound;
  }
};

struct ReducedProblem {
  NormalizedProblem normalized;
  Sid rhat;            // R_l ∪ R_r ∪ bottom rule, width kappa+nu+mu
  Formula psi_hat;
  std::vector<Formula> instances;  // decor(phi)
  DecorationTable table;
  GenerationLog right_log, left_log;
  BoundsReport bounds;

  EntailmentProblem instance_problem(size_t k) const;
};

struct ReduceOptions {
  NormalizeOptions normalize;
  BuildOptions build;
};

ReducedProblem reduce_safe_to_pce(const EntailmentProblem& p, const ReduceOptions& opts = {});

}  // namespace slent
