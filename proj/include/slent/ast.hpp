#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "slent/errors.hpp"
#include "slent/symbols.hpp"

namespace slent {

/// A record field: either a variable or the empty-field constant `nil`.
/// `nil` never occurs in equational or predicate atoms.
class Term {
 public:
  Term() = default;
  static Term nil() { return Term{}; }
  static Term var(VarId v) { return Term{v.id + 1}; }
  bool is_nil() const { return code_ == 0; }
  VarId as_var() const { return VarId{code_ - 1}; }
  auto operator<=>(const Term&) const = default;

 private:
  explicit Term(uint32_t code) : code_(code) {}
  uint32_t code_ = 0;
};

struct EqAtom {
  VarId lhs, rhs;
  bool operator==(const EqAtom&) const = default;
};

struct DiseqAtom {
  VarId lhs, rhs;
  bool operator==(const DiseqAtom&) const = default;
};

struct PointsToAtom {
  VarId src;
  std::vector<Term> fields;
  bool operator==(const PointsToAtom&) const = default;
};

struct PredAtom {
  PredId pred;
  std::vector<VarId> args;
  bool operator==(const PredAtom&) const = default;
};

using Atom = std::variant<EqAtom, DiseqAtom, PointsToAtom, PredAtom>;

/// Existentially quantified separating conjunction of atoms. The atom list is
/// never empty; bound variables are pairwise distinct and disjoint from the
/// free variables.
struct SymbolicHeap {
  std::vector<VarId> bound;
  std::vector<Atom> atoms;
  bool operator==(const SymbolicHeap&) const = default;
};

/// Disjunction of symbolic heaps; always at least one disjunct.
struct Formula {
  std::vector<SymbolicHeap> disjuncts;
  bool operator==(const Formula&) const = default;
};

/// Inductive rule `head(params) <= body`. The body is quantifier-free; its
/// variables outside `params` are the rule's existential variables.
struct Rule {
  PredId head;
  std::vector<VarId> params;
  std::vector<Atom> body;

  /// Existential variables in first-occurrence order over the body.
  std::vector<VarId> existentials() const;
  bool operator==(const Rule&) const = default;
};

struct PredDef {
  uint32_t arity = 0;
  std::vector<Rule> rules;
};

/// A set of inductive definitions plus the record width of the layer it
/// defines (source problems use kappa, decorated ones kappa+nu+mu).
struct Sid {
  uint32_t record_width = 0;
  std::vector<PredId> order;  // declaration order, drives all iteration
  std::map<PredId, PredDef> defs;

  bool declared(PredId p) const { return defs.count(p) != 0; }
  uint32_t arity(PredId p) const;
  const std::vector<Rule>& rules(PredId p) const;
  /// Registers `p` with the given arity; throws ArityMismatch on conflict.
  void declare(PredId p, uint32_t arity);
  void add_rule(Rule rule);
};

/// Entailment problem (lhs |- rhs under sid). The lhs disjuncts are
/// quantifier-free; `free_vars` lists fv(lhs) ∪ fv(rhs) in first-occurrence
/// order; `mu` is the uniform per-rule existential count (0 before
/// normalization).
struct EntailmentProblem {
  Formula lhs;
  Formula rhs;
  Sid sid;
  std::vector<VarId> free_vars;
  uint32_t mu = 0;

  void recompute_free_vars();
};

/// Finite map from variables to variables; application is capture-avoiding on
/// symbolic heaps. Entries keep insertion order.
class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<VarId, VarId>> entries);
  void set(VarId from, VarId to);
  std::optional<VarId> lookup(VarId v) const;
  VarId operator()(VarId v) const;
  Term operator()(Term t) const;
  bool empty() const { return entries_.empty(); }
  const std::vector<std::pair<VarId, VarId>>& entries() const { return entries_; }
  std::set<VarId> domain() const;
  std::set<VarId> image() const;

 private:
  std::vector<std::pair<VarId, VarId>> entries_;
};

// Free-variable collection. The vector variants preserve first-occurrence
// order; collect_vars appends without deduplication control via `seen`.
void collect_free_vars(const Atom& atom, std::vector<VarId>& out, std::set<VarId>& seen);
std::vector<VarId> free_vars(const SymbolicHeap& sh);
std::vector<VarId> free_vars(const Formula& f);
std::vector<VarId> free_vars_of_atoms(const std::vector<Atom>& atoms);
std::set<VarId> free_var_set(const Formula& f);

Atom apply_substitution(const Atom& atom, const Substitution& sigma);
std::vector<Atom> apply_substitution(const std::vector<Atom>& atoms, const Substitution& sigma);
SymbolicHeap apply_substitution(const SymbolicHeap& sh, const Substitution& sigma);
Formula apply_substitution(const Formula& f, const Substitution& sigma);

/// Replaces the predicate atom at `atom_index` by the instantiated rule body;
/// rule existentials are renamed apart from everything already in `sh` and
/// appended to the bound list.
SymbolicHeap unfold_step(const SymbolicHeap& sh, size_t atom_index, const Rule& rule,
                         FreshNames& fresh);

// --- general formula trees (input shape of to_dnf) ---

struct GeneralFormula;
using GeneralFormulaPtr = std::shared_ptr<const GeneralFormula>;

struct GeneralFormula {
  struct Leaf {
    Atom atom;
  };
  struct Star {
    std::vector<GeneralFormulaPtr> parts;
  };
  struct Or {
    std::vector<GeneralFormulaPtr> parts;
  };
  struct Exists {
    std::vector<VarId> vars;
    GeneralFormulaPtr body;
  };
  std::variant<Leaf, Star, Or, Exists> node;
};

GeneralFormulaPtr gf_atom(Atom a);
GeneralFormulaPtr gf_star(std::vector<GeneralFormulaPtr> parts);
GeneralFormulaPtr gf_or(std::vector<GeneralFormulaPtr> parts);
GeneralFormulaPtr gf_exists(std::vector<VarId> vars, GeneralFormulaPtr body);

/// Distributes * over \/ and hoists existentials, producing the equivalent
/// disjunction of symbolic heaps.
Formula to_dnf(const GeneralFormulaPtr& gf);

// --- size and width measures ---

struct Measure {
  uint64_t size = 0;
  uint64_t width = 0;
};

uint64_t size_of(const Atom& atom);
uint64_t size_of(const SymbolicHeap& sh);
uint64_t size_of(const Formula& f);
uint64_t rule_body_size(const Rule& r);
Measure measure(const Sid& sid);
Measure measure(const EntailmentProblem& p);

/// Checks the structural invariants (arities, nil placement, bound-variable
/// discipline, points-to widths); throws the matching error.
void validate(const EntailmentProblem& p);

}  // namespace slent
