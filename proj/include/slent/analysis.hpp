#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slent/ast.hpp"

namespace slent {

/// Positional function: predicate -> set of 1-based parameter indices.
/// Predicates without an entry carry no tracked positions.
using FvProfile = std::map<PredId, std::set<uint32_t>>;
using MustAllocSets = std::map<PredId, std::set<uint32_t>>;

/// Least set containing the predicates of `f` and closed under rule-body
/// occurrence.
std::set<PredId> preds_closure(const Formula& f, const Sid& sid);
std::set<PredId> preds_closure(const std::vector<PredId>& roots, const Sid& sid);

const std::set<uint32_t>& profile_at(const FvProfile& lambda, PredId p);

/// Variables sitting at a lambda-position of some predicate atom.
std::set<VarId> vargs(const std::vector<Atom>& atoms, const FvProfile& lambda);
std::set<VarId> vargs(const Formula& f, const FvProfile& lambda);
std::set<VarId> vargs(const PredAtom& head, const FvProfile& lambda);

/// Greatest positional function satisfying: (1) lambda-positions of `psi`
/// hold free variables of `psi`; (2) a lambda-position argument of a body
/// atom is a lambda-position parameter of the rule head. Computed by the
/// straightforward greatest-fixpoint deletion loop.
FvProfile compute_fv_profile(const Formula& psi, const Sid& sid);

/// Same fixpoint, processing predicates in a caller-given order (the result
/// does not depend on it; used by the order-insensitivity test).
FvProfile compute_fv_profile_ordered(const Formula& psi, const Sid& sid,
                                     const std::vector<PredId>& sweep_order);

/// True when `lambda` satisfies both profile conditions for (psi, sid);
/// used to check maximality of the computed profile.
bool profile_satisfies_conditions(const Formula& psi, const Sid& sid, const FvProfile& lambda);

/// Variables connected to a points-to source through a chain of equalities
/// (chain length one being the source itself).
std::set<VarId> allocated_vars(const SymbolicHeap& sh);
std::set<VarId> allocated_vars(const std::vector<Atom>& atoms);

/// Greatest fixpoint of: parameter i of p stays iff, in every rule of p, x_i
/// is equality-chained to a points-to source or to an argument at a
/// must-alloc position of a body atom. Sound under-approximation of
/// "allocated in every predicate-less unfolding".
MustAllocSets must_alloc_params(const Sid& sid, const std::set<PredId>& preds);

// --- per-rule condition checks ---

struct RuleShape {
  const PointsToAtom* pts;        // unique points-to rooted at the first parameter
  std::vector<const Atom*> rho;   // remaining atoms
};
std::optional<RuleShape> progressing_shape(const Rule& r);

bool is_progressing(const Rule& r);
bool is_connected(const Rule& r);
bool is_lambda_connected(const Rule& r, const FvProfile& lambda);
bool is_lambda_restricted(const Rule& r, const FvProfile& lambda);
bool is_established(const Rule& r, const MustAllocSets& must_alloc);

/// Formula-level lambda-restriction w.r.t. a variable set V; returns a
/// violation witness or nullopt.
std::optional<std::string> lambda_restricted_violation(const Formula& f, const FvProfile& lambda,
                                                       const std::set<VarId>& v_set);

// --- problem classification ---

struct SideFlags {
  bool progressing = true;
  bool connected = true;
  bool established = true;
  bool lambda_connected = true;
  bool lambda_restricted = true;
};

struct Violation {
  PredId pred;
  uint32_t rule = 0;  // 1-based rule index; 0 for formula-level violations
  std::string condition;
  std::string witness;
};

struct ClassificationReport {
  SideFlags left, right;
  bool all_rules_progressing = true;
  bool psi_restricted = true;  // rhs lambda-restricted w.r.t. fv(lhs)
  bool safe = false;
  FvProfile lambda_rhs, lambda_lhs;
  std::set<PredId> left_preds, right_preds;
  std::vector<Violation> violations;
};

ClassificationReport classify_problem(const EntailmentProblem& p);

// --- optional exact establishment cross-check ---

enum class Established { No, Yes, Unknown };

/// Cross-checks the fixpoint answer against the predicate-less unfoldings of
/// the rule body up to `depth`. A non-allocating unfolding is a definitive
/// "No"; fixpoint-established rules stay "Yes"; otherwise "Unknown".
Established exact_establishment(const Rule& r, const Sid& sid, const MustAllocSets& must_alloc,
                                uint32_t depth, std::string* witness = nullptr);

}  // namespace slent
