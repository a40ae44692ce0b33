#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "slent/parser.hpp"
#include "slent/printer.hpp"
#include "slent/semantics.hpp"
#include "support/canonical.hpp"

using namespace slent;

namespace {

VarId v(const char* name) { return symbols::var(name); }
PredId pr(const char* name) { return symbols::pred(name); }

EntailmentProblem ls_problem(const char* entailment) {
  std::string text =
      "fields 1;\n"
      "ls(x,y) <= x = y;\n"
      "ls(x,y) <= x -> (z) * ls(z,y);\n";
  return parse_problem(text + entailment);
}

Structure make_structure(std::initializer_list<std::pair<const char*, Loc>> store,
                         std::initializer_list<std::pair<Loc, std::vector<Loc>>> cells,
                         uint32_t width) {
  Structure st;
  st.heap.width = width;
  for (const auto& [name, l] : store) st.store.bind(v(name), l);
  for (const auto& [l, fs] : cells) st.heap.put(l, fs);
  return st;
}

// Reference satisfaction: a direct transcription of the semantics table with
// binary heap splits and no memoization; only the atoms and operators needed
// by the comparison formulas.
bool ref_models(const Structure& st, const SymbolicHeap& sh, const Sid& sid, int depth = 0);

bool ref_atoms(const Structure& st, const std::vector<Atom>& atoms, size_t idx, const Sid& sid,
               int depth) {
  if (depth > 64) throw Error("reference checker recursion overflow");
  if (idx == atoms.size()) return st.heap.empty();
  if (idx + 1 == atoms.size()) {
    const Atom& a = atoms[idx];
    if (const auto* eq = std::get_if<EqAtom>(&a)) {
      return st.heap.empty() && st.store.loc(eq->lhs) == st.store.loc(eq->rhs);
    }
    if (const auto* de = std::get_if<DiseqAtom>(&a)) {
      return st.heap.empty() && st.store.loc(de->lhs) != st.store.loc(de->rhs);
    }
    if (const auto* pt = std::get_if<PointsToAtom>(&a)) {
      if (st.heap.size() != 1) return false;
      auto it = st.heap.cells.find(st.store.loc(pt->src));
      if (it == st.heap.cells.end()) return false;
      for (size_t i = 0; i < pt->fields.size(); ++i) {
        if (it->second[i] != st.store.loc(pt->fields[i])) return false;
      }
      return true;
    }
    const auto& call = std::get<PredAtom>(a);
    for (const Rule& r : sid.rules(call.pred)) {
      Substitution inst;
      for (size_t i = 0; i < r.params.size(); ++i) inst.set(r.params[i], call.args[i]);
      SymbolicHeap body{{}, apply_substitution(r.body, inst)};
      // rename existentials apart, then quantify them
      FreshNames fresh;
      for (const auto& [var, l] : st.store.vars) fresh.reserve(var);
      for (VarId fv : free_vars_of_atoms(body.atoms)) fresh.reserve(fv);
      Substitution rename;
      for (VarId e : r.existentials()) {
        VarId re = inst(e);
        VarId ne = fresh.fresh_var(symbols::name(re));
        rename.set(re, ne);
        body.bound.push_back(ne);
      }
      body.atoms = apply_substitution(body.atoms, rename);
      if (ref_models(st, body, sid, depth + 1)) return true;
    }
    return false;
  }
  // binary split: first atom vs the rest
  std::vector<Loc> dom;
  for (const auto& [l, fs] : st.heap.cells) dom.push_back(l);
  for (uint64_t mask = 0; mask < (uint64_t{1} << dom.size()); ++mask) {
    std::vector<Loc> left, right;
    for (size_t i = 0; i < dom.size(); ++i) (mask >> i & 1 ? left : right).push_back(dom[i]);
    Structure a{st.store, st.heap.restricted_to(left)};
    Structure b{st.store, st.heap.restricted_to(right)};
    if (ref_atoms(a, {atoms[idx]}, 0, sid, depth + 1) && ref_atoms(b, atoms, idx + 1, sid, depth + 1)) {
      return true;
    }
  }
  return false;
}

bool ref_models(const Structure& st, const SymbolicHeap& sh, const Sid& sid, int depth) {
  if (depth > 64) throw Error("reference checker recursion overflow");
  std::vector<Loc> pool = st.heap.locations();
  for (const auto& [var, l] : st.store.vars) pool.push_back(l);
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  pool.erase(std::remove(pool.begin(), pool.end(), kBot), pool.end());
  pool.push_back(pool.empty() ? 1 : pool.back() + 1);
  std::function<bool(size_t, Structure&)> go = [&](size_t i, Structure& cur) -> bool {
    if (i == sh.bound.size()) return ref_atoms(cur, sh.atoms, 0, sid, depth + 1);
    for (Loc cand : pool) {
      cur.store.bind(sh.bound[i], cand);
      if (go(i + 1, cur)) return true;
    }
    cur.store.vars.erase(sh.bound[i]);
    return false;
  };
  Structure cur = st;
  return go(0, cur);
}

}  // namespace

TEST_CASE("atom semantics per the satisfaction table") {
  Sid sid;
  sid.record_width = 1;
  Structure st = make_structure({{"x", 1}, {"y", 2}}, {{1, {2}}}, 1);

  CHECK(check_models(st, parse_formula("x -> (y)", 1), sid));
  CHECK_FALSE(check_models(st, parse_formula("x = y", 1), sid));   // heap not empty
  CHECK_FALSE(check_models(st, parse_formula("x != y", 1), sid));  // heap not empty
  CHECK_FALSE(check_models(st, parse_formula("y -> (x)", 1), sid));

  Structure empty = make_structure({{"x", 1}, {"y", 1}}, {}, 1);
  CHECK(check_models(empty, parse_formula("x = y", 1), sid));
  CHECK_FALSE(check_models(empty, parse_formula("x != y", 1), sid));
  CHECK_FALSE(check_models(empty, parse_formula("x -> (y)", 1), sid));

  // nil fields compare against Bot
  Sid sid2;
  sid2.record_width = 2;
  Structure stn = make_structure({{"x", 1}, {"y", 2}}, {{1, {0, 2}}}, 2);
  CHECK(check_models(stn, parse_formula("x -> (nil,y)", 2), sid2));
  CHECK_FALSE(check_models(stn, parse_formula("x -> (y,y)", 2), sid2));
}

TEST_CASE("list segment satisfaction via rules") {
  EntailmentProblem p = ls_problem("entail ls(a,b) |- ls(a,b)");
  Structure chain = make_structure({{"a", 1}, {"b", 3}}, {{1, {2}}, {2, {3}}}, 1);
  CHECK(check_models(chain, p.lhs, p.sid));
  Structure loop = make_structure({{"a", 1}, {"b", 3}}, {{1, {2}}, {2, {1}}}, 1);
  CHECK_FALSE(check_models(loop, p.lhs, p.sid));
  Structure empty = make_structure({{"a", 1}, {"b", 1}}, {}, 1);
  CHECK(check_models(empty, p.lhs, p.sid));
  Structure empty_neq = make_structure({{"a", 1}, {"b", 2}}, {}, 1);
  CHECK_FALSE(check_models(empty_neq, p.lhs, p.sid));
}

TEST_CASE("separating conjunction agrees with a direct reference implementation") {
  EntailmentProblem p = ls_problem("entail ls(a,b) |- ls(a,b)");
  std::vector<Formula> formulas = {
      parse_formula("ls(a,b)", 1),
      parse_formula("a -> (b) * b -> (c)", 1),
      parse_formula("ls(a,c) * ls(c,b)", 1),
      parse_formula("a = c * ls(a,b)", 1),
      parse_formula("exists u . a -> (u) * ls(u,b) * c = c", 1),
      parse_formula("ls(a,b) * a != b \\/ b -> (a)", 1),
  };
  size_t compared = 0;
  size_t mismatches = 0;
  slent::testing::for_each_canonical_structure(
      {v("a"), v("b"), v("c")}, 1, 3, [&](const Structure& st) {
        ++compared;
        for (const Formula& f : formulas) {
          bool fast = check_models(st, f, p.sid);
          bool slow = false;
          for (const SymbolicHeap& sh : f.disjuncts) {
            slow = ref_models(st, sh, p.sid);
            if (slow) break;
          }
          if (fast != slow) {
            ++mismatches;
            MESSAGE("disagreement on " << print(f));
          }
        }
        return compared < 20000;
      });
  CHECK(mismatches == 0);
  CHECK(compared > 5000);
}

TEST_CASE("a second fresh witness never changes satisfaction") {
  EntailmentProblem p = ls_problem("entail ls(a,b) |- ls(a,b)");
  std::vector<Formula> formulas = {
      parse_formula("exists u . a -> (u)", 1),
      parse_formula("exists u w . a -> (u) * u != w", 1),
      parse_formula("ls(a,b)", 1),
      parse_formula("exists u . a -> (u) * u != a * u != b", 1),
  };
  StructureEnumerator en({v("a"), v("b")}, 2, 1);
  while (auto st = en.next()) {
    for (const Formula& f : formulas) {
      CHECK(check_models(*st, f, p.sid, 1) == check_models(*st, f, p.sid, 2));
    }
  }
}

TEST_CASE("structure enumeration counts") {
  {
    StructureEnumerator en({v("x")}, 0, 1);
    size_t n = 0;
    while (en.next()) ++n;
    CHECK(n == 1);  // domain {0,1}, stores into {1}, empty heap only
  }
  {
    StructureEnumerator en({}, 1, 1);
    size_t n = 0;
    size_t empty_heaps = 0;
    while (auto st = en.next()) {
      ++n;
      empty_heaps += st->heap.empty();
    }
    CHECK(n == 7);  // {} plus 2 roots x 3 field values
    CHECK(empty_heaps == 1);
  }
  {
    // independent nested-loop count: stores * heaps over domain {0..6}
    uint64_t domain = 2 + 2 * (1 + 1);
    uint64_t stores = domain * domain;
    auto choose = [](uint64_t n, uint64_t k) {
      uint64_t r = 1;
      for (uint64_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
      return r;
    };
    uint64_t heaps = 0;
    for (uint64_t k = 0; k <= 2; ++k) {
      uint64_t fields = 1;
      for (uint64_t i = 0; i < k; ++i) fields *= domain + 1;
      heaps += choose(domain, k) * fields;
    }
    StructureEnumerator en({v("x"), v("y")}, 2, 1);
    uint64_t n = 0;
    while (en.next()) ++n;
    CHECK(n == stores * heaps);
    CHECK(n == 28008);
  }
  {
    // no duplicates
    StructureEnumerator en({v("x")}, 1, 2);
    std::set<Structure> seen;
    size_t n = 0;
    while (auto st = en.next()) {
      ++n;
      seen.insert(*st);
    }
    CHECK(seen.size() == n);
  }
}

TEST_CASE("bounded counterexample search") {
  {
    EntailmentProblem p = parse_problem("fields 1; entail x -> (y) |- x -> (y)");
    Verdict verd = find_counterexample_bounded(p, 3);
    CHECK(verd.kind == Verdict::Kind::NoCounterexampleUpTo);
  }
  {
    EntailmentProblem p = parse_problem("fields 1; entail x -> (y) |- x -> (x)");
    Verdict verd = find_counterexample_bounded(p, 2);
    REQUIRE(verd.kind == Verdict::Kind::Counterexample);
    CHECK(verd.witness->store.loc(v("x")) != verd.witness->store.loc(v("y")));
  }
  {
    EntailmentProblem p = ls_problem("entail ls(a,b) |- a = b");
    Verdict verd = find_counterexample_bounded(p, 1);
    REQUIRE(verd.kind == Verdict::Kind::Counterexample);
    CHECK(verd.witness->heap.size() == 1);
    // monotone in the bound
    for (uint32_t k = 1; k <= 3; ++k) {
      CHECK(find_counterexample_bounded(p, k).kind == Verdict::Kind::Counterexample);
    }
  }
  {
    EntailmentProblem p = ls_problem("entail ls(a,b) |- ls(a,b)");
    CHECK(find_counterexample_bounded(p, 3).kind == Verdict::Kind::NoCounterexampleUpTo);
  }
}

TEST_CASE("oracle rejects unboundable recursion") {
  EntailmentProblem p =
      parse_problem("fields 1; p(x) <= p(x); entail p(a) |- a = a");
  CHECK_THROWS_AS(find_counterexample_bounded(p, 1), NonProgressingSid);
  EntailmentProblem mutual = parse_problem(
      "fields 1; p(x) <= q(x); q(x) <= p(x); entail p(a) |- a = a");
  CHECK_THROWS_AS(find_counterexample_bounded(mutual, 1), NonProgressingSid);
  // the list SID has a points-to-free rule but no cycle through it
  EntailmentProblem ls = ls_problem("entail ls(a,b) |- ls(a,b)");
  CHECK_NOTHROW(find_counterexample_bounded(ls, 1));
}

TEST_CASE("resource budget reports instead of hanging") {
  EntailmentProblem p = ls_problem("entail ls(a,b) |- ls(a,b)");
  OracleOptions opts;
  opts.max_steps = 3;
  CHECK(find_counterexample_bounded(p, 3, opts).kind == Verdict::Kind::ResourceExceeded);
}

TEST_CASE("width mismatches are rejected") {
  Sid sid;
  sid.record_width = 2;
  Structure st = make_structure({{"x", 1}, {"y", 2}}, {{1, {2}}}, 1);
  CHECK_THROWS_AS(check_models(st, parse_formula("x = y", 2), sid), WidthMismatch);
}

TEST_CASE("predicate-less unfoldings of the list atom") {
  EntailmentProblem p = ls_problem("entail ls(a,b) |- ls(a,b)");
  PredAtom atom{pr("ls"), {v("a"), v("b")}};

  auto depth1 = predicate_less_unfoldings(atom, p.sid, 1);
  REQUIRE(depth1.size() == 1);
  CHECK(print(depth1[0]) == "a = b");

  auto depth2 = predicate_less_unfoldings(atom, p.sid, 2);
  REQUIRE(depth2.size() == 2);
  CHECK(print(depth2[1]) == "exists z . a -> (z) * z = b");

  EntailmentProblem nobase =
      parse_problem("fields 1; p(x) <= x -> (y) * p(y); entail p(a) |- a = a");
  CHECK(predicate_less_unfoldings(PredAtom{pr("p"), {v("a")}}, nobase.sid, 4).empty());
}
