#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "slent/analysis.hpp"
#include "slent/expansion.hpp"
#include "slent/parser.hpp"
#include "slent/printer.hpp"
#include "support/canonical.hpp"
#include "support/corpus.hpp"

using namespace slent;

namespace {

VarId v(const char* name) { return symbols::var(name); }

struct PinnedExample {
  Store s;
  Heap h, h1, h2;
  ExpansionContext ctx;
  LocMapping gamma;

  PinnedExample() {
    s.bind(v("w1"), 5);
    h.width = 1;
    h.put(1, {2});
    h.put(2, {2});
    h1.width = 3;
    h1.put(1, {2, 5, 1});
    h1.put(2, {2, 5, 3});
    h1.put(3, {0, 0, 0});
    h2.width = 3;
    h2.put(1, {3, 5, 1});
    h2.put(2, {4, 5, 3});
    h2.put(3, {0, 0, 0});
    ctx = ExpansionContext{1, 1, 1, {v("w1")}};
    gamma.overrides = {{1, 1}, {2, 2}, {3, 2}, {4, 2}};
  }
};

}  // namespace

TEST_CASE("location mappings") {
  LocMapping id;
  Heap h;
  h.width = 1;
  h.put(1, {2});
  CHECK(apply_mapping(id, h) == h);

  PinnedExample ex;
  Heap trunc2 = truncate(ex.h2, 1);
  Heap expected;
  expected.width = 1;
  expected.put(1, {3});
  expected.put(2, {4});
  CHECK(trunc2 == expected);
  CHECK(apply_mapping(ex.gamma, trunc2) == ex.h);

  LocMapping collapse;
  collapse.overrides = {{1, 5}, {2, 5}};
  Heap two;
  two.width = 1;
  two.put(1, {1});
  two.put(2, {2});
  CHECK_THROWS_AS(apply_mapping(collapse, two), NonInjectiveOnDomain);
}

TEST_CASE("truncation of the pinned heaps") {
  PinnedExample ex;
  Heap t1 = truncate(ex.h1, 1);
  CHECK(t1 == ex.h);
  Heap t2 = truncate(ex.h2, 1);
  CHECK(t2.cells.at(1) == std::vector<Loc>{3});
  CHECK(t2.cells.at(2) == std::vector<Loc>{4});
  Heap empty;
  empty.width = 3;
  CHECK(truncate(empty, 1).cells.empty());
}

TEST_CASE("main/aux split") {
  PinnedExample ex;
  MainAux parts = split_main_aux(ex.h1);
  CHECK(parts.main.cells.count(1));
  CHECK(parts.main.cells.count(2));
  CHECK(parts.aux.cells.count(3));

  Heap all_bot;
  all_bot.width = 3;
  all_bot.put(4, {0, 0, 0});
  MainAux parts2 = split_main_aux(all_bot);
  CHECK(parts2.main.cells.empty());
  CHECK(parts2.aux.size() == 1);

  Heap no_bot;
  no_bot.width = 3;
  no_bot.put(1, {2, 5, 1});
  MainAux parts3 = split_main_aux(no_bot);
  CHECK(parts3.aux.cells.empty());
  CHECK(parts3.main.size() == 1);
}

TEST_CASE("expansion checks on the pinned heaps") {
  PinnedExample ex;
  LocMapping id;
  auto e1 = check_expansion(ex.s, ex.h1, ex.h, id, ex.ctx);
  REQUIRE(e1.has_value());
  CHECK(e1->connections.at(3) == 2);
  CHECK(e1->main.size() == 2);
  CHECK(e1->aux.size() == 1);

  auto e2 = check_expansion(ex.s, ex.h2, ex.h, ex.gamma, ex.ctx);
  CHECK(e2.has_value());

  Heap wrong = ex.h;
  wrong.cells[1] = {9};
  CHECK_FALSE(check_expansion(ex.s, ex.h1, wrong, id, ex.ctx).has_value());
}

TEST_CASE("single-field perturbations of the expanded heap") {
  PinnedExample ex;
  LocMapping id;
  // Perturbing any constrained field breaks the expansion; the trailing
  // aux-pointer field of cell 1 is unconstrained (cell 3 stays connected
  // through cell 2), so the expansion survives there.
  for (const auto& [cell, fs] : ex.h1.cells) {
    for (size_t i = 0; i < fs.size(); ++i) {
      for (Loc alt = 0; alt <= 6; ++alt) {
        if (alt == fs[i]) continue;
        Heap mutated = ex.h1;
        mutated.cells[cell][i] = alt;
        bool accepted = check_expansion(ex.s, mutated, ex.h, id, ex.ctx).has_value();
        if (cell == 1 && i == 2) {
          CHECK(accepted);
        } else {
          CHECK_FALSE(accepted);
        }
      }
    }
  }
}

TEST_CASE("expansion then truncation recovers the base heap") {
  // whenever (s,h') is a gamma-expansion of (s,h): h = gamma(trunc(h')) and
  // (s,h') is an id-expansion of trunc(h')
  PinnedExample ex;
  ExpansionContext ctx = ex.ctx;
  std::vector<LocMapping> gammas;
  gammas.push_back(LocMapping{});
  gammas.push_back(ex.gamma);
  {
    LocMapping squash;
    squash.overrides = {{3, 1}, {4, 1}};
    gammas.push_back(squash);
    LocMapping shift;
    shift.overrides = {{1, 7}, {2, 8}, {3, 9}};
    gammas.push_back(shift);
  }
  size_t positives = 0;
  size_t visited = 0;
  slent::testing::for_each_id_expansion(ctx, 2, [&](const Structure& st) {
    ++visited;
    Heap trunc = truncate(st.heap, ctx.kappa);
    for (const LocMapping& gamma : gammas) {
      Heap mapped;
      try {
        mapped = apply_mapping(gamma, trunc);
      } catch (const NonInjectiveOnDomain&) {
        continue;
      }
      // gamma(trunc(h')) is the unique base heap: accepted as-is, rejected
      // after any mutation
      CHECK(check_expansion(st.store, st.heap, mapped, gamma, ctx).has_value());
      CHECK(check_expansion(st.store, st.heap, trunc, LocMapping{}, ctx).has_value());
      ++positives;
      for (const auto& [l, fs] : mapped.cells) {
        Heap mutated = mapped;
        mutated.cells[l][0] += 17;
        CHECK_FALSE(check_expansion(st.store, st.heap, mutated, gamma, ctx).has_value());
        Heap dropped = mapped;
        dropped.cells.erase(l);
        CHECK_FALSE(check_expansion(st.store, st.heap, dropped, gamma, ctx).has_value());
      }
    }
    return visited < 4000;
  });
  CHECK(positives > 100);
}

TEST_CASE("shaped heaps are id-expansions of their truncation") {
  PinnedExample ex;
  size_t visited = 0;
  slent::testing::for_each_id_expansion(ex.ctx, 3, [&](const Structure& st) {
    ++visited;
    Heap trunc = truncate(st.heap, ex.ctx.kappa);
    CHECK(check_expansion(st.store, st.heap, trunc, LocMapping{}, ex.ctx).has_value());
    // empty iff empty
    CHECK(st.heap.empty() == trunc.empty());
    return visited < 5000;
  });
  CHECK(visited >= 5000);
}

TEST_CASE("truncation distributes over disjoint union") {
  PinnedExample ex;
  std::vector<Heap> heaps;
  slent::testing::for_each_id_expansion(ex.ctx, 2, [&](const Structure& st) {
    heaps.push_back(st.heap);
    return heaps.size() < 120;
  });
  size_t pairs = 0;
  for (const Heap& a : heaps) {
    for (const Heap& b : heaps) {
      if (!a.disjoint(b)) continue;
      Heap ta = truncate(a, 1), tb = truncate(b, 1);
      CHECK(ta.disjoint(tb));
      CHECK(truncate(heap_union(a, b), 1) == heap_union(ta, tb));
      ++pairs;
    }
  }
  CHECK(pairs > 50);
}

TEST_CASE("expansions compose under disjoint union") {
  PinnedExample ex;
  std::vector<Structure> pool;
  slent::testing::for_each_id_expansion(ex.ctx, 2, [&](const Structure& st) {
    pool.push_back(st);
    return pool.size() < 150;
  });
  size_t composed = 0;
  for (const Structure& a : pool) {
    for (const Structure& b : pool) {
      if (!(a.store == b.store) || !a.heap.disjoint(b.heap)) continue;
      Heap ha = truncate(a.heap, 1), hb = truncate(b.heap, 1);
      if (!ha.disjoint(hb)) continue;
      Structure joined{a.store, heap_union(a.heap, b.heap)};
      auto witness =
          check_expansion(joined.store, joined.heap, heap_union(ha, hb), LocMapping{}, ex.ctx);
      CHECK(witness.has_value());
      ++composed;
    }
  }
  CHECK(composed > 50);
}

TEST_CASE("injective mappings preserve satisfaction both ways") {
  EntailmentProblem p = parse_problem(
      "fields 1; ls(x,y) <= x = y; ls(x,y) <= x -> (z) * ls(z,y);"
      "entail ls(a,b) |- exists u . ls(a,u)");
  std::vector<LocMapping> injectives;
  injectives.push_back(LocMapping{});
  {
    LocMapping shift;
    for (Loc l = 1; l <= 12; ++l) shift.overrides[l] = l + 10;
    injectives.push_back(shift);
    LocMapping swap;
    swap.overrides = {{1, 2}, {2, 1}};
    injectives.push_back(swap);
  }
  size_t visited = 0;
  slent::testing::for_each_canonical_structure({v("a"), v("b")}, 1, 2, [&](const Structure& st) {
    ++visited;
    for (const LocMapping& gamma : injectives) {
      Structure mapped = apply_mapping(gamma, st);
      for (const Formula* f : {&p.lhs, &p.rhs}) {
        CHECK(check_models(st, *f, p.sid) == check_models(mapped, *f, p.sid));
      }
    }
    return visited < 1500;
  });
  CHECK(visited >= 150);
}

TEST_CASE("restricted formulas survive merges outside the tracked set") {
  // lambda-restricted alpha w.r.t. V: any gamma injective on dom(h) and s(V)
  // preserves models (one direction)
  EntailmentProblem p = parse_problem(
      "fields 1; p(u,w) <= u -> (w); entail a = a * b = b * c = c |- exists x . p(x,a) * x != a");
  ClassificationReport rep = classify_problem(p);
  std::set<VarId> v_set = free_var_set(p.lhs);
  REQUIRE(lambda_restricted_violation(p.rhs, rep.lambda_rhs, v_set) == std::nullopt);

  size_t checked = 0;
  slent::testing::for_each_canonical_structure({v("a"), v("b"), v("c")}, 1, 2,
                                               [&](const Structure& st) {
    if (!check_models(st, p.rhs, p.sid)) return true;
    // gammas that merge everything outside dom(h) and s(V) onto one point
    std::set<Loc> keep;
    for (const auto& [l, fs] : st.heap.cells) keep.insert(l);
    keep.insert(st.store.loc(v("a")));
    LocMapping gamma;
    for (Loc l = 1; l <= 10; ++l) {
      if (!keep.count(l)) gamma.overrides[l] = 99;
    }
    Structure mapped = apply_mapping(gamma, st);
    CHECK(check_models(mapped, p.rhs, p.sid));
    return ++checked < 400;
  });
  CHECK(checked >= 10);
}
