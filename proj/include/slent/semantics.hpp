#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "slent/ast.hpp"

namespace slent {

/// Locations are naturals; 0 is the distinguished location Bot, never
/// allocated and never the value of a variable other than nil.
using Loc = uint32_t;
inline constexpr Loc kBot = 0;

struct Store {
  std::map<VarId, Loc> vars;  // nil is implicit and maps to Bot

  Loc loc(VarId v) const;
  Loc loc(Term t) const;
  bool defines(VarId v) const { return vars.count(v) != 0; }
  void bind(VarId v, Loc l);
  std::vector<Loc> image() const;
  bool operator==(const Store&) const = default;
  auto operator<=>(const Store&) const = default;
};

struct Heap {
  uint32_t width = 0;
  std::map<Loc, std::vector<Loc>> cells;  // Bot never in the domain

  bool empty() const { return cells.empty(); }
  size_t size() const { return cells.size(); }
  void put(Loc l, std::vector<Loc> fields);
  /// dom(h) ∪ every field value.
  std::vector<Loc> locations() const;
  bool disjoint(const Heap& other) const;
  Heap restricted_to(const std::vector<Loc>& dom) const;
  bool operator==(const Heap&) const = default;
  auto operator<=>(const Heap&) const = default;
};

Heap heap_union(const Heap& a, const Heap& b);  // throws on non-disjoint

struct Structure {
  Store store;
  Heap heap;
  bool operator==(const Structure&) const = default;
  auto operator<=>(const Structure&) const = default;
};

struct Verdict {
  enum class Kind { NoCounterexampleUpTo, Counterexample, ResourceExceeded };
  Kind kind = Kind::NoCounterexampleUpTo;
  uint32_t bound = 0;
  std::optional<Structure> witness;
};

struct OracleOptions {
  /// Abstract work budget (assignments + model-check atom steps); 0 = none.
  uint64_t max_steps = 0;
};

/// Throws NonProgressingSid when the rules reachable from `preds` allow an
/// unfolding cycle that consumes no heap cell (every points-to-free rule edge
/// participates in a dependency cycle). SIDs accepted here make both
/// check_models and the bounded searches terminate.
void ensure_boundable(const Sid& sid, const std::vector<PredId>& preds);

/// Satisfaction (s,h) |= φ per the least-relation semantics: equational atoms
/// need an empty heap, points-to a singleton, * splits the heap, existential
/// witnesses range over heap locations, the store image and one fresh
/// location per nesting level. `fresh_witnesses` widens the candidate set
/// with extra fresh locations (the adequacy regression knob).
bool check_models(const Structure& st, const Formula& f, const Sid& sid,
                  uint32_t fresh_witnesses = 1);
bool check_models(const Structure& st, const SymbolicHeap& sh, const Sid& sid,
                  uint32_t fresh_witnesses = 1);

/// Exhaustive structure stream over the location domain
/// {0,...,|vars|+max_heap*(1+width)}: every store of `vars` into nonzero
/// locations crossed with every heap of at most `max_heap` cells.
class StructureEnumerator {
 public:
  StructureEnumerator(std::vector<VarId> vars, uint32_t max_heap, uint32_t width);
  std::optional<Structure> next();
  uint32_t domain_size() const { return domain_; }

 private:
  bool bump_fields();
  bool bump_combo();
  bool bump_store();
  void reset_fields();
  bool make_current();

  std::vector<VarId> vars_;
  uint32_t max_heap_;
  uint32_t width_;
  uint32_t domain_;  // locations are 0..domain_
  std::vector<uint32_t> store_digits_;
  uint32_t cell_count_ = 0;
  std::vector<uint32_t> combo_;
  std::vector<uint32_t> fields_;
  bool done_ = false;
  bool fresh_ = true;
};

/// Bounded counterexample search for lhs |= rhs. Enumerates the models of the
/// left-hand side with at most `max_heap` cells (one representative per
/// isomorphism class, smallest heaps first) and returns the first one that
/// falsifies the right-hand side.
Verdict find_counterexample_bounded(const EntailmentProblem& p, uint32_t max_heap,
                                    const OracleOptions& opts = {});

/// Enumerates canonical models of a quantifier-free formula with at most
/// `max_cells` heap cells over the store variables `store_vars`. The visitor
/// returns false to stop. Returns false when the step budget ran out.
bool enumerate_models(const Formula& lhs, const Sid& sid, const std::vector<VarId>& store_vars,
                      uint32_t max_cells, const OracleOptions& opts,
                      const std::function<bool(const Structure&)>& visit);

/// All predicate-less symbolic heaps reachable from `atom` in at most
/// `max_depth` unfolding steps (leftmost strategy).
std::vector<SymbolicHeap> predicate_less_unfoldings(const PredAtom& atom, const Sid& sid,
                                                    uint32_t max_depth);
std::vector<SymbolicHeap> predicate_less_unfoldings(const SymbolicHeap& start, const Sid& sid,
                                                    uint32_t max_depth);

}  // namespace slent
