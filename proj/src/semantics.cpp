#include "slent/semantics.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <string>
#include <unordered_map>

#include "slent/printer.hpp"

namespace slent {

Loc Store::loc(VarId v) const {
  auto it = vars.find(v);
  if (it == vars.end()) throw Error("store does not define " + symbols::name(v));
  return it->second;
}

Loc Store::loc(Term t) const { return t.is_nil() ? kBot : loc(t.as_var()); }

void Store::bind(VarId v, Loc l) {
  assert(l != kBot);
  vars[v] = l;
}

std::vector<Loc> Store::image() const {
  std::vector<Loc> out;
  out.reserve(vars.size());
  for (const auto& [v, l] : vars) out.push_back(l);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Heap::put(Loc l, std::vector<Loc> fields) {
  assert(l != kBot);
  assert(fields.size() == width);
  cells[l] = std::move(fields);
}

std::vector<Loc> Heap::locations() const {
  std::vector<Loc> out;
  for (const auto& [l, fs] : cells) {
    out.push_back(l);
    out.insert(out.end(), fs.begin(), fs.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Heap::disjoint(const Heap& other) const {
  for (const auto& [l, fs] : cells) {
    if (other.cells.count(l)) return false;
  }
  return true;
}

Heap Heap::restricted_to(const std::vector<Loc>& dom) const {
  Heap out;
  out.width = width;
  for (Loc l : dom) {
    auto it = cells.find(l);
    if (it != cells.end()) out.cells.insert(*it);
  }
  return out;
}

Heap heap_union(const Heap& a, const Heap& b) {
  if (!a.disjoint(b)) throw Error("heap union of non-disjoint heaps");
  if (!a.cells.empty() && !b.cells.empty() && a.width != b.width) {
    throw WidthMismatch("heap union of different widths");
  }
  Heap out = a.cells.empty() ? b : a;
  const Heap& rest = a.cells.empty() ? a : b;
  for (const auto& [l, fs] : rest.cells) out.cells.emplace(l, fs);
  return out;
}

namespace {

struct BudgetExhausted {};

struct Budget {
  uint64_t remaining;
  explicit Budget(uint64_t max_steps) : remaining(max_steps == 0 ? UINT64_MAX : max_steps) {}
  void tick(uint64_t n = 1) {
    if (remaining < n) throw BudgetExhausted{};
    remaining -= n;
  }
};

std::set<PredId> closure(const Sid& sid, const std::vector<PredId>& roots) {
  std::set<PredId> out;
  std::vector<PredId> work(roots.begin(), roots.end());
  while (!work.empty()) {
    PredId p = work.back();
    work.pop_back();
    if (!out.insert(p).second) continue;
    for (const Rule& r : sid.rules(p)) {
      for (const Atom& a : r.body) {
        if (const auto* call = std::get_if<PredAtom>(&a)) work.push_back(call->pred);
      }
    }
  }
  return out;
}

std::vector<PredId> formula_preds(const Formula& f) {
  std::vector<PredId> out;
  std::set<PredId> seen;
  for (const SymbolicHeap& sh : f.disjuncts) {
    for (const Atom& a : sh.atoms) {
      if (const auto* call = std::get_if<PredAtom>(&a)) {
        if (seen.insert(call->pred).second) out.push_back(call->pred);
      }
    }
  }
  return out;
}

bool rule_has_points_to(const Rule& r) {
  for (const Atom& a : r.body) {
    if (std::holds_alternative<PointsToAtom>(a)) return true;
  }
  return false;
}

}  // namespace

void ensure_boundable(const Sid& sid, const std::vector<PredId>& preds) {
  std::set<PredId> reach = closure(sid, preds);
  // Edges of rules that allocate nothing; a cycle over them lets check_models
  // and the unfolding searches diverge.
  std::map<PredId, std::vector<PredId>> edges;
  for (PredId p : reach) {
    for (const Rule& r : sid.rules(p)) {
      if (rule_has_points_to(r)) continue;
      for (const Atom& a : r.body) {
        if (const auto* call = std::get_if<PredAtom>(&a)) {
          if (reach.count(call->pred)) edges[p].push_back(call->pred);
        }
      }
    }
  }
  std::map<PredId, int> color;  // 0 white, 1 grey, 2 black
  std::function<void(PredId)> dfs = [&](PredId p) {
    color[p] = 1;
    for (PredId q : edges[p]) {
      int c = color[q];
      if (c == 1) {
        throw NonProgressingSid("recursion through " + symbols::name(q) +
                                " consumes no heap cell and cannot be bounded");
      }
      if (c == 0) dfs(q);
    }
    color[p] = 2;
  };
  for (PredId p : reach) {
    if (color[p] == 0) dfs(p);
  }
}

namespace {

// Satisfaction checker for one fixed structure. The heap domain is indexed so
// separating conjunction can enumerate sub-heaps as bit masks; predicate
// checks are memoized on (predicate, argument locations, mask).
class ModelChecker {
 public:
  ModelChecker(const Sid& sid, const Structure& st, Budget* budget, uint32_t fresh_witnesses = 1)
      : sid_(sid), heap_(st.heap), budget_(budget), fresh_witnesses_(fresh_witnesses) {
    if (!heap_.cells.empty() && heap_.width != sid.record_width) {
      throw WidthMismatch("structure heap width " + std::to_string(heap_.width) +
                          " vs SID record width " + std::to_string(sid.record_width));
    }
    if (heap_.cells.size() > 63) throw Error("heap too large for the model checker");
    for (const auto& [l, fs] : heap_.cells) {
      cell_index_.emplace(l, static_cast<uint32_t>(cell_locs_.size()));
      cell_locs_.push_back(l);
    }
    Loc top = kBot;
    for (Loc l : heap_.locations()) top = std::max(top, l);
    for (const auto& [v, l] : st.store.vars) top = std::max(top, l);
    fresh_floor_ = top + 1;
  }

  bool formula(const Store& s, const Formula& f) {
    uint64_t full = heap_.cells.empty() ? 0 : (uint64_t{1} << cell_locs_.size()) - 1;
    for (const SymbolicHeap& sh : f.disjuncts) {
      if (sheap(s, sh, full)) return true;
    }
    return false;
  }

  bool sheap(const Store& s, const SymbolicHeap& sh, uint64_t mask) {
    std::vector<const Atom*> atoms;
    atoms.reserve(sh.atoms.size());
    for (const Atom& a : sh.atoms) atoms.push_back(&a);
    Store local = s;
    return instantiate(local, sh.bound, 0, atoms, mask);
  }

 private:
  bool instantiate(Store& s, const std::vector<VarId>& exvars, size_t idx,
                   const std::vector<const Atom*>& atoms, uint64_t mask) {
    if (idx == exvars.size()) return star(s, atoms, mask);
    std::optional<Loc> shadowed;  // a quantifier may rebind a store variable
    if (auto it = s.vars.find(exvars[idx]); it != s.vars.end()) shadowed = it->second;
    bool found = false;
    for (Loc cand : witness_pool(s, mask)) {
      s.bind(exvars[idx], cand);
      if (instantiate(s, exvars, idx + 1, atoms, mask)) {
        found = true;
        break;
      }
    }
    if (shadowed) {
      s.vars[exvars[idx]] = *shadowed;
    } else {
      s.vars.erase(exvars[idx]);
    }
    return found;
  }

  // Heap locations of the sub-heap, the store image and one fresh location;
  // Bot is excluded since no store may map a variable to it.
  std::vector<Loc> witness_pool(const Store& s, uint64_t mask) const {
    std::vector<Loc> pool;
    for (size_t i = 0; i < cell_locs_.size(); ++i) {
      if (!(mask >> i & 1)) continue;
      pool.push_back(cell_locs_[i]);
      for (Loc l : heap_.cells.at(cell_locs_[i])) {
        if (l != kBot) pool.push_back(l);
      }
    }
    for (const auto& [v, l] : s.vars) pool.push_back(l);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    Loc fresh = fresh_floor_;
    if (!pool.empty()) fresh = std::max(fresh, pool.back() + 1);
    for (uint32_t i = 0; i < fresh_witnesses_; ++i) pool.push_back(fresh + i);
    return pool;
  }

  // Separating conjunction of an atom list over the sub-heap `mask`:
  // equational atoms consume nothing, points-to atoms their own cell,
  // predicate atoms an arbitrary sub-mask.
  bool star(const Store& s, const std::vector<const Atom*>& atoms, uint64_t mask) {
    if (budget_) budget_->tick();
    uint64_t remaining = mask;
    std::vector<const PredAtom*> calls;
    for (const Atom* ap : atoms) {
      bool ok = std::visit(
          [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, EqAtom>) {
              return s.loc(a.lhs) == s.loc(a.rhs);
            } else if constexpr (std::is_same_v<T, DiseqAtom>) {
              return s.loc(a.lhs) != s.loc(a.rhs);
            } else if constexpr (std::is_same_v<T, PointsToAtom>) {
              auto it = cell_index_.find(s.loc(a.src));
              if (it == cell_index_.end() || !(remaining >> it->second & 1)) return false;
              const std::vector<Loc>& cell = heap_.cells.at(s.loc(a.src));
              for (size_t i = 0; i < a.fields.size(); ++i) {
                if (cell[i] != s.loc(a.fields[i])) return false;
              }
              remaining &= ~(uint64_t{1} << it->second);
              return true;
            } else {
              calls.push_back(&a);
              return true;
            }
          },
          *ap);
      if (!ok) return false;
    }
    return split_calls(s, calls, 0, remaining);
  }

  bool split_calls(const Store& s, const std::vector<const PredAtom*>& calls, size_t idx,
                   uint64_t mask) {
    if (idx == calls.size()) return mask == 0;
    const PredAtom& call = *calls[idx];
    std::vector<Loc> args;
    args.reserve(call.args.size());
    for (VarId v : call.args) args.push_back(s.loc(v));
    // Last call must take everything that is left.
    if (idx + 1 == calls.size()) return pred_call(call.pred, args, mask);
    uint64_t sub = mask;
    for (;;) {
      if (pred_call(call.pred, args, sub) && split_calls(s, calls, idx + 1, mask & ~sub)) {
        return true;
      }
      if (sub == 0) break;
      sub = (sub - 1) & mask;
    }
    return false;
  }

  bool pred_call(PredId p, const std::vector<Loc>& args, uint64_t mask) {
    if (budget_) budget_->tick();
    MemoKey key{p, args, mask};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    memo_.emplace(key, false);  // also the sane answer for 0-cell self-reference
    bool result = false;
    for (const Rule& r : sid_.rules(p)) {
      Store local;
      for (size_t i = 0; i < r.params.size(); ++i) local.bind(r.params[i], args[i]);
      std::vector<const Atom*> atoms;
      atoms.reserve(r.body.size());
      for (const Atom& a : r.body) atoms.push_back(&a);
      if (instantiate(local, r.existentials(), 0, atoms, mask)) {
        result = true;
        break;
      }
    }
    memo_[key] = result;
    return result;
  }

  struct MemoKey {
    PredId pred;
    std::vector<Loc> args;
    uint64_t mask;
    auto operator<=>(const MemoKey&) const = default;
  };

  const Sid& sid_;
  const Heap& heap_;
  Budget* budget_;
  uint32_t fresh_witnesses_;
  std::vector<Loc> cell_locs_;
  std::map<Loc, uint32_t> cell_index_;
  Loc fresh_floor_ = 1;
  std::map<MemoKey, bool> memo_;
};

void require_store_covers(const Store& s, const Formula& f) {
  for (const SymbolicHeap& sh : f.disjuncts) {
    std::set<VarId> bound(sh.bound.begin(), sh.bound.end());
    for (VarId v : free_vars(sh)) {
      if (!bound.count(v) && !s.defines(v)) {
        throw Error("store does not define free variable " + symbols::name(v));
      }
    }
  }
}

}  // namespace

bool check_models(const Structure& st, const Formula& f, const Sid& sid,
                  uint32_t fresh_witnesses) {
  require_store_covers(st.store, f);
  ensure_boundable(sid, formula_preds(f));
  ModelChecker checker(sid, st, nullptr, fresh_witnesses);
  return checker.formula(st.store, f);
}

bool check_models(const Structure& st, const SymbolicHeap& sh, const Sid& sid,
                  uint32_t fresh_witnesses) {
  return check_models(st, Formula{{sh}}, sid, fresh_witnesses);
}

// --- exhaustive structure enumeration ---

StructureEnumerator::StructureEnumerator(std::vector<VarId> vars, uint32_t max_heap,
                                         uint32_t width)
    : vars_(std::move(vars)),
      max_heap_(max_heap),
      width_(width),
      domain_(static_cast<uint32_t>(vars_.size()) + max_heap * (1 + width)) {
  store_digits_.assign(vars_.size(), 1);
  if (!vars_.empty() && domain_ == 0) done_ = true;
}

bool StructureEnumerator::bump_fields() {
  for (size_t i = fields_.size(); i-- > 0;) {
    if (fields_[i] < domain_) {
      ++fields_[i];
      std::fill(fields_.begin() + i + 1, fields_.end(), 0);
      return true;
    }
  }
  return false;
}

bool StructureEnumerator::bump_combo() {
  // Next k-combination of {1..domain_} in lexicographic order.
  uint32_t k = cell_count_;
  for (size_t i = k; i-- > 0;) {
    uint32_t limit = domain_ - static_cast<uint32_t>(k - 1 - i);
    if (combo_[i] < limit) {
      ++combo_[i];
      for (size_t j = i + 1; j < k; ++j) combo_[j] = combo_[j - 1] + 1;
      reset_fields();
      return true;
    }
  }
  if (cell_count_ < max_heap_ && domain_ >= cell_count_ + 1) {
    ++cell_count_;
    combo_.resize(cell_count_);
    for (uint32_t i = 0; i < cell_count_; ++i) combo_[i] = i + 1;
    if (combo_.empty() || combo_.back() <= domain_) {
      reset_fields();
      return true;
    }
  }
  return false;
}

void StructureEnumerator::reset_fields() { fields_.assign(size_t{cell_count_} * width_, 0); }

bool StructureEnumerator::bump_store() {
  cell_count_ = 0;
  combo_.clear();
  reset_fields();
  for (size_t i = store_digits_.size(); i-- > 0;) {
    if (store_digits_[i] < domain_) {
      ++store_digits_[i];
      std::fill(store_digits_.begin() + i + 1, store_digits_.end(), 1);
      return true;
    }
  }
  return false;
}

std::optional<Structure> StructureEnumerator::next() {
  if (done_) return std::nullopt;
  if (fresh_) {
    fresh_ = false;
    reset_fields();
  } else if (!bump_fields() && !bump_combo() && !bump_store()) {
    done_ = true;
    return std::nullopt;
  }
  Structure st;
  for (size_t i = 0; i < vars_.size(); ++i) st.store.bind(vars_[i], store_digits_[i]);
  st.heap.width = width_;
  for (uint32_t c = 0; c < cell_count_; ++c) {
    std::vector<Loc> fs(fields_.begin() + size_t{c} * width_,
                        fields_.begin() + size_t{c + 1} * width_);
    st.heap.put(combo_[c], std::move(fs));
  }
  return st;
}

// --- canonical model enumeration for the bounded oracle ---

namespace {

struct FlatHeapShape {
  std::vector<Atom> atoms;  // predicate-less
  uint32_t pts = 0;
};

uint32_t count_pts(const std::vector<Atom>& atoms) {
  uint32_t n = 0;
  for (const Atom& a : atoms) n += std::holds_alternative<PointsToAtom>(a) ? 1 : 0;
  return n;
}

// All predicate-less instantiations of `atoms` with at most max_cells
// points-to atoms, bucketed by their count. Rule existentials become fresh
// internal variables.
void expand_all(const Sid& sid, std::vector<Atom> atoms, uint32_t max_cells, Budget& budget,
                uint32_t& fresh_counter,
                std::map<uint32_t, std::vector<std::vector<Atom>>>& buckets) {
  budget.tick();
  uint32_t pts = count_pts(atoms);
  if (pts > max_cells) return;
  size_t call_at = atoms.size();
  for (size_t i = 0; i < atoms.size(); ++i) {
    if (std::holds_alternative<PredAtom>(atoms[i])) {
      call_at = i;
      break;
    }
  }
  if (call_at == atoms.size()) {
    buckets[pts].push_back(std::move(atoms));
    return;
  }
  const PredAtom call = std::get<PredAtom>(atoms[call_at]);
  for (const Rule& r : sid.rules(call.pred)) {
    Substitution inst;
    for (size_t i = 0; i < r.params.size(); ++i) inst.set(r.params[i], call.args[i]);
    for (VarId e : r.existentials()) {
      inst.set(e, symbols::var("$m" + std::to_string(fresh_counter++)));
    }
    std::vector<Atom> next;
    next.reserve(atoms.size() + r.body.size() - 1);
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (i == call_at) {
        for (const Atom& a : r.body) next.push_back(apply_substitution(a, inst));
      } else {
        next.push_back(atoms[i]);
      }
    }
    expand_all(sid, std::move(next), max_cells, budget, fresh_counter, buckets);
  }
}

// Canonical assignments of the variables of a predicate-less atom list:
// values are chosen among the locations already used plus one fresh, so each
// isomorphism class of models is produced exactly once.
class AssignmentSearch {
 public:
  AssignmentSearch(const std::vector<Atom>& atoms, const std::vector<VarId>& store_vars,
                   uint32_t width, Budget& budget)
      : width_(width), budget_(budget) {
    vars_ = store_vars;
    std::set<VarId> seen(store_vars.begin(), store_vars.end());
    for (const Atom& a : atoms) collect_free_vars(a, vars_, seen);
    index_.reserve(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) index_[vars_[i]] = i;
    store_count_ = store_vars.size();
    for (const Atom& a : atoms) {
      std::visit(
          [&](const auto& at) {
            using T = std::decay_t<decltype(at)>;
            if constexpr (std::is_same_v<T, EqAtom>) {
              eqs_.emplace_back(index_.at(at.lhs), index_.at(at.rhs));
            } else if constexpr (std::is_same_v<T, DiseqAtom>) {
              diseqs_.emplace_back(index_.at(at.lhs), index_.at(at.rhs));
            } else if constexpr (std::is_same_v<T, PointsToAtom>) {
              size_t src = index_.at(at.src);
              sources_.push_back(src);
              std::vector<int64_t> fields;
              for (Term t : at.fields) {
                fields.push_back(t.is_nil() ? -1 : static_cast<int64_t>(index_.at(t.as_var())));
              }
              cells_.emplace_back(src, std::move(fields));
            }
          },
          a);
    }
  }

  bool run(const std::function<bool(const Structure&)>& visit) {
    std::set<size_t> src_set(sources_.begin(), sources_.end());
    if (src_set.size() != sources_.size()) return true;  // repeated source variable: unsat
    values_.assign(vars_.size(), 0);
    return assign(0, 0, visit);
  }

 private:
  bool consistent_at(size_t idx) const {
    for (auto [a, b] : eqs_) {
      if (std::max(a, b) == idx && values_[a] != values_[b]) return false;
    }
    for (auto [a, b] : diseqs_) {
      if (std::max(a, b) == idx && values_[a] == values_[b]) return false;
    }
    // Two points-to sources sharing a location make the conjunction unsat.
    bool is_src = std::find(sources_.begin(), sources_.end(), idx) != sources_.end();
    if (is_src) {
      for (size_t s : sources_) {
        if (s < idx && values_[s] == values_[idx]) return false;
      }
    }
    return true;
  }

  bool assign(size_t idx, Loc used_max, const std::function<bool(const Structure&)>& visit) {
    if (idx == vars_.size()) {
      budget_.tick();
      return emit(visit);
    }
    for (Loc cand = 1; cand <= used_max + 1; ++cand) {
      values_[idx] = cand;
      if (!consistent_at(idx)) continue;
      if (!assign(idx + 1, std::max(used_max, cand), visit)) return false;
    }
    return true;
  }

  bool emit(const std::function<bool(const Structure&)>& visit) {
    Structure st;
    for (size_t i = 0; i < store_count_; ++i) st.store.bind(vars_[i], values_[i]);
    st.heap.width = width_;
    for (const auto& [src, fields] : cells_) {
      std::vector<Loc> fs;
      fs.reserve(fields.size());
      for (int64_t f : fields) fs.push_back(f < 0 ? kBot : values_[static_cast<size_t>(f)]);
      st.heap.put(values_[src], std::move(fs));
    }
    return visit(st);
  }

  uint32_t width_;
  Budget& budget_;
  std::vector<VarId> vars_;
  std::unordered_map<VarId, size_t> index_;
  size_t store_count_ = 0;
  std::vector<std::pair<size_t, size_t>> eqs_;
  std::vector<std::pair<size_t, size_t>> diseqs_;
  std::vector<size_t> sources_;
  std::vector<std::pair<size_t, std::vector<int64_t>>> cells_;
  std::vector<Loc> values_;
};

}  // namespace

bool enumerate_models(const Formula& lhs, const Sid& sid, const std::vector<VarId>& store_vars,
                      uint32_t max_cells, const OracleOptions& opts,
                      const std::function<bool(const Structure&)>& visit) {
  Budget budget(opts.max_steps);
  try {
    std::map<uint32_t, std::vector<std::vector<Atom>>> buckets;
    uint32_t fresh_counter = 0;
    for (const SymbolicHeap& sh : lhs.disjuncts) {
      std::vector<Atom> atoms = sh.atoms;
      // Bound variables (if any) are treated like rule existentials.
      expand_all(sid, std::move(atoms), max_cells, budget, fresh_counter, buckets);
    }
    std::set<Structure> seen;
    for (auto& [cells, lists] : buckets) {
      for (auto& atoms : lists) {
        AssignmentSearch search(atoms, store_vars, sid.record_width, budget);
        bool keep_going = search.run([&](const Structure& st) {
          if (!seen.insert(st).second) return true;
          return visit(st);
        });
        if (!keep_going) return true;
      }
    }
  } catch (const BudgetExhausted&) {
    return false;
  }
  return true;
}

Verdict find_counterexample_bounded(const EntailmentProblem& p, uint32_t max_heap,
                                    const OracleOptions& opts) {
  std::vector<PredId> roots = formula_preds(p.lhs);
  for (PredId q : formula_preds(p.rhs)) roots.push_back(q);
  ensure_boundable(p.sid, roots);
  {
    std::set<VarId> declared(p.free_vars.begin(), p.free_vars.end());
    for (const Formula* f : {&p.lhs, &p.rhs}) {
      for (VarId v : free_vars(*f)) {
        if (!declared.count(v)) {
          throw Error("problem free-variable vector misses " + symbols::name(v));
        }
      }
    }
  }

  Verdict verdict;
  verdict.bound = max_heap;
  Budget rhs_budget(opts.max_steps);
  bool budget_ok = true;
  try {
    budget_ok = enumerate_models(p.lhs, p.sid, p.free_vars, max_heap, opts,
                                 [&](const Structure& st) {
                                   ModelChecker rhs(p.sid, st, &rhs_budget);
                                   if (rhs.formula(st.store, p.rhs)) return true;
                                   verdict.kind = Verdict::Kind::Counterexample;
                                   verdict.witness = st;
                                   return false;
                                 });
  } catch (const BudgetExhausted&) {
    budget_ok = false;
  }
  if (verdict.kind == Verdict::Kind::Counterexample) {
    // A returned counterexample must really satisfy the left side and refute
    // the right side.
    if (!check_models(*verdict.witness, p.lhs, p.sid) ||
        check_models(*verdict.witness, p.rhs, p.sid)) {
      throw Error("internal: counterexample failed verification");
    }
    return verdict;
  }
  if (!budget_ok) {
    verdict.kind = Verdict::Kind::ResourceExceeded;
    return verdict;
  }
  verdict.kind = Verdict::Kind::NoCounterexampleUpTo;
  return verdict;
}

namespace {

void unfoldings_rec(const SymbolicHeap& sh, const Sid& sid, uint32_t depth_left, FreshNames fresh,
                    std::vector<SymbolicHeap>& out, std::set<std::string>& seen) {
  size_t call_at = sh.atoms.size();
  for (size_t i = 0; i < sh.atoms.size(); ++i) {
    if (std::holds_alternative<PredAtom>(sh.atoms[i])) {
      call_at = i;
      break;
    }
  }
  if (call_at == sh.atoms.size()) {
    if (seen.insert(print(sh)).second) out.push_back(sh);
    return;
  }
  if (depth_left == 0) return;
  const PredAtom& call = std::get<PredAtom>(sh.atoms[call_at]);
  for (const Rule& r : sid.rules(call.pred)) {
    unfoldings_rec(unfold_step(sh, call_at, r, fresh), sid, depth_left - 1, fresh, out, seen);
  }
}

}  // namespace

std::vector<SymbolicHeap> predicate_less_unfoldings(const SymbolicHeap& start, const Sid& sid,
                                                    uint32_t max_depth) {
  std::vector<SymbolicHeap> out;
  std::set<std::string> seen;
  FreshNames fresh;
  for (VarId v : free_vars(start)) fresh.reserve(v);
  for (VarId v : start.bound) fresh.reserve(v);
  unfoldings_rec(start, sid, max_depth, fresh, out, seen);
  return out;
}

std::vector<SymbolicHeap> predicate_less_unfoldings(const PredAtom& atom, const Sid& sid,
                                                    uint32_t max_depth) {
  return predicate_less_unfoldings(SymbolicHeap{{}, {atom}}, sid, max_depth);
}

}  // namespace slent
