#include "slent/ast.hpp"

#include <algorithm>

namespace slent {

std::vector<VarId> Rule::existentials() const {
  std::set<VarId> params_set(params.begin(), params.end());
  std::vector<VarId> out;
  std::set<VarId> seen;
  for (const Atom& a : body) {
    std::vector<VarId> vs;
    std::set<VarId> local;
    collect_free_vars(a, vs, local);
    for (VarId v : vs) {
      if (params_set.count(v) || seen.count(v)) continue;
      seen.insert(v);
      out.push_back(v);
    }
  }
  return out;
}

uint32_t Sid::arity(PredId p) const {
  auto it = defs.find(p);
  if (it == defs.end()) throw ArityMismatch("unknown predicate " + symbols::name(p));
  return it->second.arity;
}

const std::vector<Rule>& Sid::rules(PredId p) const {
  static const std::vector<Rule> none;
  auto it = defs.find(p);
  return it == defs.end() ? none : it->second.rules;
}

void Sid::declare(PredId p, uint32_t arity) {
  auto it = defs.find(p);
  if (it == defs.end()) {
    defs.emplace(p, PredDef{arity, {}});
    order.push_back(p);
    return;
  }
  if (it->second.arity != arity) {
    throw ArityMismatch("predicate " + symbols::name(p) + " used with arity " +
                        std::to_string(arity) + ", declared with " +
                        std::to_string(it->second.arity));
  }
}

void Sid::add_rule(Rule rule) {
  declare(rule.head, static_cast<uint32_t>(rule.params.size()));
  defs.at(rule.head).rules.push_back(std::move(rule));
}

void EntailmentProblem::recompute_free_vars() {
  free_vars.clear();
  std::set<VarId> seen;
  for (const Formula* f : {&lhs, &rhs}) {
    for (VarId v : slent::free_vars(*f)) {
      if (seen.insert(v).second) free_vars.push_back(v);
    }
  }
}

Substitution::Substitution(std::initializer_list<std::pair<VarId, VarId>> entries) {
  for (const auto& [from, to] : entries) set(from, to);
}

void Substitution::set(VarId from, VarId to) {
  for (auto& [f, t] : entries_) {
    if (f == from) {
      t = to;
      return;
    }
  }
  entries_.emplace_back(from, to);
}

std::optional<VarId> Substitution::lookup(VarId v) const {
  for (const auto& [f, t] : entries_) {
    if (f == v) return t;
  }
  return std::nullopt;
}

VarId Substitution::operator()(VarId v) const {
  auto r = lookup(v);
  return r ? *r : v;
}

Term Substitution::operator()(Term t) const {
  if (t.is_nil()) return t;
  return Term::var((*this)(t.as_var()));
}

std::set<VarId> Substitution::domain() const {
  std::set<VarId> out;
  for (const auto& [f, t] : entries_) out.insert(f);
  return out;
}

std::set<VarId> Substitution::image() const {
  std::set<VarId> out;
  for (const auto& [f, t] : entries_) out.insert(t);
  return out;
}

void collect_free_vars(const Atom& atom, std::vector<VarId>& out, std::set<VarId>& seen) {
  auto push = [&](VarId v) {
    if (seen.insert(v).second) out.push_back(v);
  };
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, EqAtom> || std::is_same_v<T, DiseqAtom>) {
          push(a.lhs);
          push(a.rhs);
        } else if constexpr (std::is_same_v<T, PointsToAtom>) {
          push(a.src);
          for (Term t : a.fields) {
            if (!t.is_nil()) push(t.as_var());
          }
        } else {
          for (VarId v : a.args) push(v);
        }
      },
      atom);
}

std::vector<VarId> free_vars_of_atoms(const std::vector<Atom>& atoms) {
  std::vector<VarId> out;
  std::set<VarId> seen;
  for (const Atom& a : atoms) collect_free_vars(a, out, seen);
  return out;
}

std::vector<VarId> free_vars(const SymbolicHeap& sh) {
  std::set<VarId> bound(sh.bound.begin(), sh.bound.end());
  std::vector<VarId> out;
  for (VarId v : free_vars_of_atoms(sh.atoms)) {
    if (!bound.count(v)) out.push_back(v);
  }
  return out;
}

std::vector<VarId> free_vars(const Formula& f) {
  std::vector<VarId> out;
  std::set<VarId> seen;
  for (const SymbolicHeap& sh : f.disjuncts) {
    for (VarId v : free_vars(sh)) {
      if (seen.insert(v).second) out.push_back(v);
    }
  }
  return out;
}

std::set<VarId> free_var_set(const Formula& f) {
  auto vs = free_vars(f);
  return std::set<VarId>(vs.begin(), vs.end());
}

Atom apply_substitution(const Atom& atom, const Substitution& sigma) {
  return std::visit(
      [&](const auto& a) -> Atom {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, EqAtom>) {
          return EqAtom{sigma(a.lhs), sigma(a.rhs)};
        } else if constexpr (std::is_same_v<T, DiseqAtom>) {
          return DiseqAtom{sigma(a.lhs), sigma(a.rhs)};
        } else if constexpr (std::is_same_v<T, PointsToAtom>) {
          PointsToAtom out{sigma(a.src), {}};
          out.fields.reserve(a.fields.size());
          for (Term t : a.fields) out.fields.push_back(sigma(t));
          return out;
        } else {
          PredAtom out{a.pred, {}};
          out.args.reserve(a.args.size());
          for (VarId v : a.args) out.args.push_back(sigma(v));
          return out;
        }
      },
      atom);
}

std::vector<Atom> apply_substitution(const std::vector<Atom>& atoms, const Substitution& sigma) {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const Atom& a : atoms) out.push_back(apply_substitution(a, sigma));
  return out;
}

SymbolicHeap apply_substitution(const SymbolicHeap& sh, const Substitution& sigma) {
  // Bound occurrences stay untouched: drop bound variables from sigma, then
  // alpha-rename any bound variable that would capture an incoming image.
  std::set<VarId> bound(sh.bound.begin(), sh.bound.end());
  Substitution effective;
  std::set<VarId> incoming;
  std::set<VarId> frees;
  {
    auto fv = free_vars(sh);
    frees.insert(fv.begin(), fv.end());
  }
  for (const auto& [from, to] : sigma.entries()) {
    if (bound.count(from) || !frees.count(from)) continue;
    effective.set(from, to);
    incoming.insert(to);
  }
  SymbolicHeap out = sh;
  std::vector<std::pair<VarId, VarId>> renames;
  FreshNames fresh;
  auto reserve_all = [&](const std::set<VarId>& vs) {
    for (VarId v : vs) fresh.reserve(v);
  };
  reserve_all(frees);
  reserve_all(bound);
  reserve_all(incoming);
  for (VarId v : effective.image()) fresh.reserve(v);
  Substitution rename;
  for (VarId b : sh.bound) {
    if (incoming.count(b)) {
      VarId nb = fresh.fresh_var(symbols::name(b));
      rename.set(b, nb);
    }
  }
  if (!rename.empty()) {
    for (auto& b : out.bound) b = rename(b);
    out.atoms = apply_substitution(out.atoms, rename);
  }
  out.atoms = apply_substitution(out.atoms, effective);
  return out;
}

Formula apply_substitution(const Formula& f, const Substitution& sigma) {
  Formula out;
  out.disjuncts.reserve(f.disjuncts.size());
  for (const SymbolicHeap& sh : f.disjuncts) out.disjuncts.push_back(apply_substitution(sh, sigma));
  return out;
}

SymbolicHeap unfold_step(const SymbolicHeap& sh, size_t atom_index, const Rule& rule,
                         FreshNames& fresh) {
  if (atom_index >= sh.atoms.size() || !std::holds_alternative<PredAtom>(sh.atoms[atom_index])) {
    throw NotAPredicateAtom("unfold_step: atom at index " + std::to_string(atom_index) +
                            " is not a predicate atom");
  }
  const PredAtom& call = std::get<PredAtom>(sh.atoms[atom_index]);
  if (call.pred != rule.head || call.args.size() != rule.params.size()) {
    throw RuleHeadMismatch("unfold_step: rule head " + symbols::name(rule.head) +
                           " does not match atom " + symbols::name(call.pred));
  }
  for (VarId v : free_vars(sh)) fresh.reserve(v);
  for (VarId v : sh.bound) fresh.reserve(v);
  for (VarId v : call.args) fresh.reserve(v);

  Substitution inst;
  for (size_t i = 0; i < rule.params.size(); ++i) inst.set(rule.params[i], call.args[i]);
  std::vector<VarId> introduced;
  for (VarId e : rule.existentials()) {
    VarId ne = e;
    if (fresh.used(symbols::name(e))) {
      ne = fresh.fresh_var(symbols::name(e));
    } else {
      fresh.reserve(e);
    }
    inst.set(e, ne);
    introduced.push_back(ne);
  }

  SymbolicHeap out;
  out.bound = sh.bound;
  out.bound.insert(out.bound.end(), introduced.begin(), introduced.end());
  out.atoms.reserve(sh.atoms.size() + rule.body.size() - 1);
  for (size_t i = 0; i < sh.atoms.size(); ++i) {
    if (i == atom_index) {
      for (const Atom& a : rule.body) out.atoms.push_back(apply_substitution(a, inst));
    } else {
      out.atoms.push_back(sh.atoms[i]);
    }
  }
  return out;
}

GeneralFormulaPtr gf_atom(Atom a) {
  return std::make_shared<GeneralFormula>(GeneralFormula{GeneralFormula::Leaf{std::move(a)}});
}
GeneralFormulaPtr gf_star(std::vector<GeneralFormulaPtr> parts) {
  return std::make_shared<GeneralFormula>(GeneralFormula{GeneralFormula::Star{std::move(parts)}});
}
GeneralFormulaPtr gf_or(std::vector<GeneralFormulaPtr> parts) {
  return std::make_shared<GeneralFormula>(GeneralFormula{GeneralFormula::Or{std::move(parts)}});
}
GeneralFormulaPtr gf_exists(std::vector<VarId> vars, GeneralFormulaPtr body) {
  return std::make_shared<GeneralFormula>(
      GeneralFormula{GeneralFormula::Exists{std::move(vars), std::move(body)}});
}

namespace {

void collect_gf_names(const GeneralFormulaPtr& gf, FreshNames& fresh) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, GeneralFormula::Leaf>) {
          std::vector<VarId> vs;
          std::set<VarId> seen;
          collect_free_vars(n.atom, vs, seen);
          for (VarId v : vs) fresh.reserve(v);
        } else if constexpr (std::is_same_v<T, GeneralFormula::Exists>) {
          for (VarId v : n.vars) fresh.reserve(v);
          collect_gf_names(n.body, fresh);
        } else {
          for (const auto& p : n.parts) collect_gf_names(p, fresh);
        }
      },
      gf->node);
}

SymbolicHeap merge_sheaps(const SymbolicHeap& a, const SymbolicHeap& b, FreshNames& fresh) {
  // Rename b's bound variables apart from everything visible in a and b.
  Substitution rename;
  std::set<VarId> clash;
  for (VarId v : free_vars(a)) clash.insert(v);
  for (VarId v : a.bound) clash.insert(v);
  for (VarId v : free_vars(b)) clash.insert(v);
  SymbolicHeap bb = b;
  for (VarId& v : bb.bound) {
    if (clash.count(v)) {
      VarId nv = fresh.fresh_var(symbols::name(v));
      rename.set(v, nv);
      v = nv;
    }
  }
  if (!rename.empty()) bb.atoms = apply_substitution(bb.atoms, rename);
  SymbolicHeap out;
  out.bound = a.bound;
  out.bound.insert(out.bound.end(), bb.bound.begin(), bb.bound.end());
  out.atoms = a.atoms;
  out.atoms.insert(out.atoms.end(), bb.atoms.begin(), bb.atoms.end());
  return out;
}

Formula dnf_rec(const GeneralFormulaPtr& gf, FreshNames& fresh) {
  return std::visit(
      [&](const auto& n) -> Formula {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, GeneralFormula::Leaf>) {
          return Formula{{SymbolicHeap{{}, {n.atom}}}};
        } else if constexpr (std::is_same_v<T, GeneralFormula::Or>) {
          Formula out;
          for (const auto& p : n.parts) {
            Formula sub = dnf_rec(p, fresh);
            out.disjuncts.insert(out.disjuncts.end(), sub.disjuncts.begin(), sub.disjuncts.end());
          }
          return out;
        } else if constexpr (std::is_same_v<T, GeneralFormula::Star>) {
          Formula acc = dnf_rec(n.parts.at(0), fresh);
          for (size_t i = 1; i < n.parts.size(); ++i) {
            Formula next = dnf_rec(n.parts[i], fresh);
            Formula merged;
            for (const SymbolicHeap& x : acc.disjuncts) {
              for (const SymbolicHeap& y : next.disjuncts) {
                merged.disjuncts.push_back(merge_sheaps(x, y, fresh));
              }
            }
            acc = std::move(merged);
          }
          return acc;
        } else {
          Formula body = dnf_rec(n.body, fresh);
          for (SymbolicHeap& sh : body.disjuncts) {
            std::set<VarId> fv;
            {
              auto v = free_vars(sh);
              fv.insert(v.begin(), v.end());
            }
            std::vector<VarId> front;
            for (VarId v : n.vars) {
              if (!fv.count(v)) continue;  // vacuous quantifier
              front.push_back(v);
            }
            front.insert(front.end(), sh.bound.begin(), sh.bound.end());
            sh.bound = std::move(front);
          }
          return body;
        }
      },
      gf->node);
}

}  // namespace

Formula to_dnf(const GeneralFormulaPtr& gf) {
  FreshNames fresh;
  collect_gf_names(gf, fresh);
  return dnf_rec(gf, fresh);
}

uint64_t size_of(const Atom& atom) {
  return std::visit(
      [](const auto& a) -> uint64_t {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, EqAtom> || std::is_same_v<T, DiseqAtom>) {
          return 3;
        } else if constexpr (std::is_same_v<T, PointsToAtom>) {
          return 2 + a.fields.size();
        } else {
          return 1 + a.args.size();
        }
      },
      atom);
}

uint64_t size_of(const SymbolicHeap& sh) {
  uint64_t s = 2 * sh.bound.size();
  for (const Atom& a : sh.atoms) s += size_of(a);
  s += sh.atoms.empty() ? 0 : sh.atoms.size() - 1;  // separating conjunctions
  return s;
}

uint64_t size_of(const Formula& f) {
  uint64_t s = f.disjuncts.empty() ? 0 : f.disjuncts.size() - 1;
  for (const SymbolicHeap& sh : f.disjuncts) s += size_of(sh);
  return s;
}

uint64_t rule_body_size(const Rule& r) {
  uint64_t s = 0;
  for (const Atom& a : r.body) s += size_of(a);
  s += r.body.empty() ? 0 : r.body.size() - 1;
  return s;
}

Measure measure(const Sid& sid) {
  Measure m;
  for (PredId p : sid.order) {
    for (const Rule& r : sid.rules(p)) {
      uint64_t rs = rule_body_size(r) + r.params.size();
      m.size += rs;
      m.width = std::max(m.width, rs);
    }
  }
  return m;
}

Measure measure(const EntailmentProblem& p) {
  Measure sid_m = measure(p.sid);
  Measure m;
  uint64_t sl = size_of(p.lhs);
  uint64_t sr = size_of(p.rhs);
  m.size = sl + sr + sid_m.size;
  m.width = std::max({sl, sr, sid_m.width});
  return m;
}

namespace {

void validate_atom(const Atom& atom, const Sid& sid, Sid& decls) {
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, PointsToAtom>) {
          if (a.fields.size() != sid.record_width) {
            throw WidthMismatch("points-to of width " + std::to_string(a.fields.size()) +
                                " in a layer of width " + std::to_string(sid.record_width));
          }
        } else if constexpr (std::is_same_v<T, PredAtom>) {
          decls.declare(a.pred, static_cast<uint32_t>(a.args.size()));
          if (sid.declared(a.pred) && sid.arity(a.pred) != a.args.size()) {
            throw ArityMismatch("predicate " + symbols::name(a.pred) + " used with arity " +
                                std::to_string(a.args.size()));
          }
        }
      },
      atom);
}

}  // namespace

void validate(const EntailmentProblem& p) {
  Sid decls;  // arity consistency across both formulas
  for (const Formula* f : {&p.lhs, &p.rhs}) {
    for (const SymbolicHeap& sh : f->disjuncts) {
      if (sh.atoms.empty()) throw Error("empty symbolic heap");
      std::set<VarId> b;
      for (VarId v : sh.bound) {
        if (!b.insert(v).second) {
          throw RebindingError("variable " + symbols::name(v) + " bound twice");
        }
      }
      for (const Atom& a : sh.atoms) validate_atom(a, p.sid, decls);
    }
  }
  for (const SymbolicHeap& sh : p.lhs.disjuncts) {
    if (!sh.bound.empty()) throw Error("left-hand side must be quantifier-free");
  }
  for (PredId pr : p.sid.order) {
    const PredDef& def = p.sid.defs.at(pr);
    for (const Rule& r : def.rules) {
      if (r.params.size() != def.arity) {
        throw ArityMismatch("rule head arity mismatch for " + symbols::name(pr));
      }
      std::set<VarId> ps;
      for (VarId v : r.params) {
        if (!ps.insert(v).second) {
          throw RebindingError("rule head parameter " + symbols::name(v) + " repeated");
        }
      }
      for (const Atom& a : r.body) validate_atom(a, p.sid, decls);
    }
  }
}

}  // namespace slent
