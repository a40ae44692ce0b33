#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "slent/analysis.hpp"
#include "slent/cfg.hpp"
#include "slent/parser.hpp"
#include "slent/printer.hpp"
#include "slent/semantics.hpp"
#include "support/cyk.hpp"

using namespace slent;

namespace {

VarId v(const char* name) { return symbols::var(name); }

const char* kUniversal = "S -> 0 S\nS -> 1 S\nS -> 0\nS -> 1\n";
const char* kZeros = "S -> 0 S\nS -> 0\n";
const char* kExact01 = "S -> 0 A\nA -> 1\n";

// chain structure spelling a binary word
Structure encode_word(const std::string& word) {
  Structure st;
  st.heap.width = 2;
  Loc h0 = 1, h1 = 2;
  st.store.bind(v("hat0"), h0);
  st.store.bind(v("hat1"), h1);
  Loc first = 3;
  st.store.bind(v("x"), first);
  for (size_t i = 0; i < word.size(); ++i) {
    Loc cell = first + static_cast<Loc>(i);
    st.heap.put(cell, {word[i] == '0' ? h0 : h1, cell + 1});
  }
  st.store.bind(v("y"), first + static_cast<Loc>(word.size()));
  return st;
}

}  // namespace

TEST_CASE("grammar parsing and its errors") {
  Grammar g = parse_grammar(kUniversal);
  CHECK(g.start == "S");
  CHECK(g.productions.size() == 4);
  CHECK(g.productions[0].terminal == '0');
  CHECK(g.productions[0].tail == std::vector<std::string>{"S"});

  CHECK_THROWS_AS(parse_grammar("S ->\n"), EpsilonInLanguage);
  CHECK_THROWS_AS(parse_grammar("S -> S 0\n"), NotGreibach);
  CHECK_THROWS_AS(parse_grammar("S -> 0 S 1\n"), NotGreibach);
  CHECK_THROWS_AS(parse_grammar("0 -> 0 S\n"), NotGreibach);
  CHECK_THROWS_AS(parse_grammar("# only comments\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("S - 0\n"), ParseError);
}

TEST_CASE("the generated entailment has the advertised shape") {
  Grammar g = parse_grammar(kUniversal);
  EntailmentProblem p = gen_cfg_instance(g);
  CHECK(p.sid.record_width == 2);
  CHECK(p.free_vars.size() == 4);
  CHECK(print(p.lhs) == "hat0 != hat1 * T(x,y,hat0,hat1)");
  CHECK(print(p.rhs) == "S(x,y,hat0,hat1)");
  CHECK(p.sid.rules(symbols::pred("T")).size() == 4);
  CHECK(p.sid.rules(symbols::pred("S")).size() == 4);

  // a nonterminal named T forces a renamed chain predicate
  Grammar clash = parse_grammar("T -> 0 T\nT -> 0\n");
  EntailmentProblem q = gen_cfg_instance(clash);
  CHECK(q.sid.declared(symbols::pred("T#1")));
}

TEST_CASE("generated instances classify as progressing and established") {
  for (const char* text : {kUniversal, kZeros, kExact01}) {
    EntailmentProblem p = gen_cfg_instance(parse_grammar(text));
    ClassificationReport rep = classify_problem(p);
    CHECK(rep.all_rules_progressing);
    CHECK(rep.left.established);
    CHECK(rep.right.established);
    CHECK(rep.left.connected);  // the chain rules
    std::set<PredId> all(p.sid.order.begin(), p.sid.order.end());
    MustAllocSets must = must_alloc_params(p.sid, all);
    for (PredId q : p.sid.order) {
      for (const Rule& r : p.sid.rules(q)) {
        CHECK(exact_establishment(r, p.sid, must, 3) == Established::Yes);
      }
    }
  }
}

TEST_CASE("membership agreement with the independent oracle") {
  for (const char* text : {kUniversal, kZeros, kExact01}) {
    Grammar g = parse_grammar(text);
    EntailmentProblem p = gen_cfg_instance(g);
    for (uint32_t len = 1; len <= 4; ++len) {
      for (uint32_t bits = 0; bits < (1u << len); ++bits) {
        std::string word;
        for (uint32_t i = 0; i < len; ++i) word += (bits >> i & 1) ? '1' : '0';
        Structure st = encode_word(word);
        CHECK(check_models(st, p.lhs, p.sid));
        CHECK(check_models(st, p.rhs, p.sid) == slent::testing::gnf_derives(g, word));
      }
    }
  }
}

TEST_CASE("oracle verdicts on generated instances") {
  EntailmentProblem universal = gen_cfg_instance(parse_grammar(kUniversal));
  CHECK(find_counterexample_bounded(universal, 3).kind == Verdict::Kind::NoCounterexampleUpTo);

  EntailmentProblem zeros = gen_cfg_instance(parse_grammar(kZeros));
  Verdict verd = find_counterexample_bounded(zeros, 1);
  REQUIRE(verd.kind == Verdict::Kind::Counterexample);
  const Structure& st = *verd.witness;
  REQUIRE(st.heap.size() == 1);
  // the single cell spells "1": its symbol field is hat1's location
  const auto& fields = st.heap.cells.begin()->second;
  CHECK(fields[0] == st.store.loc(v("hat1")));
}
