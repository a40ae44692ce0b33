#include "slent/analysis.hpp"

#include <algorithm>

#include "slent/printer.hpp"
#include "slent/semantics.hpp"

namespace slent {

namespace {

std::vector<PredId> formula_pred_occurrences(const Formula& f) {
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

std::set<uint32_t> full_positions(uint32_t arity) {
  std::set<uint32_t> out;
  for (uint32_t i = 1; i <= arity; ++i) out.insert(i);
  return out;
}

}  // namespace

std::set<PredId> preds_closure(const std::vector<PredId>& roots, const Sid& sid) {
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

std::set<PredId> preds_closure(const Formula& f, const Sid& sid) {
  return preds_closure(formula_pred_occurrences(f), sid);
}

const std::set<uint32_t>& profile_at(const FvProfile& lambda, PredId p) {
  static const std::set<uint32_t> empty;
  auto it = lambda.find(p);
  return it == lambda.end() ? empty : it->second;
}

std::set<VarId> vargs(const std::vector<Atom>& atoms, const FvProfile& lambda) {
  std::set<VarId> out;
  for (const Atom& a : atoms) {
    if (const auto* call = std::get_if<PredAtom>(&a)) {
      for (uint32_t i : profile_at(lambda, call->pred)) {
        if (i >= 1 && i <= call->args.size()) out.insert(call->args[i - 1]);
      }
    }
  }
  return out;
}

std::set<VarId> vargs(const Formula& f, const FvProfile& lambda) {
  std::set<VarId> out;
  for (const SymbolicHeap& sh : f.disjuncts) {
    auto part = vargs(sh.atoms, lambda);
    out.insert(part.begin(), part.end());
  }
  return out;
}

std::set<VarId> vargs(const PredAtom& head, const FvProfile& lambda) {
  std::set<VarId> out;
  for (uint32_t i : profile_at(lambda, head.pred)) {
    if (i >= 1 && i <= head.args.size()) out.insert(head.args[i - 1]);
  }
  return out;
}

namespace {

FvProfile initial_profile(const Formula& psi, const Sid& sid) {
  FvProfile lambda;
  for (PredId p : sid.order) lambda[p] = full_positions(sid.arity(p));
  for (const SymbolicHeap& sh : psi.disjuncts) {
    for (const Atom& a : sh.atoms) {
      if (const auto* call = std::get_if<PredAtom>(&a)) {
        if (!lambda.count(call->pred)) {
          lambda[call->pred] = full_positions(static_cast<uint32_t>(call->args.size()));
        }
      }
    }
  }
  return lambda;
}

// Deletes positions required by condition 1 (lambda-positions of psi must be
// free in psi). Returns true on change.
bool sweep_condition1(const Formula& psi, const std::set<VarId>& fv_psi, FvProfile& lambda) {
  bool changed = false;
  for (const SymbolicHeap& sh : psi.disjuncts) {
    for (const Atom& a : sh.atoms) {
      const auto* call = std::get_if<PredAtom>(&a);
      if (!call) continue;
      auto& positions = lambda[call->pred];
      for (auto it = positions.begin(); it != positions.end();) {
        VarId arg = call->args[*it - 1];
        if (!fv_psi.count(arg)) {
          it = positions.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
  }
  return changed;
}

// Condition 2 over the rules of preds(psi): a lambda-position argument of a
// body atom must be a lambda-position parameter of the head.
bool sweep_condition2(const Sid& sid, const std::set<PredId>& reach,
                      const std::vector<PredId>& order, FvProfile& lambda) {
  bool changed = false;
  for (PredId p : order) {
    if (!reach.count(p)) continue;
    for (const Rule& r : sid.rules(p)) {
      const auto& head_positions = profile_at(lambda, p);
      for (const Atom& a : r.body) {
        const auto* call = std::get_if<PredAtom>(&a);
        if (!call) continue;
        auto& positions = lambda[call->pred];
        for (auto it = positions.begin(); it != positions.end();) {
          VarId y = call->args[*it - 1];
          bool ok = false;
          for (uint32_t j : head_positions) {
            if (r.params[j - 1] == y) {
              ok = true;
              break;
            }
          }
          if (!ok) {
            it = positions.erase(it);
            changed = true;
          } else {
            ++it;
          }
        }
      }
    }
  }
  return changed;
}

}  // namespace

FvProfile compute_fv_profile_ordered(const Formula& psi, const Sid& sid,
                                     const std::vector<PredId>& sweep_order) {
  FvProfile lambda = initial_profile(psi, sid);
  std::set<VarId> fv_psi = free_var_set(psi);
  std::set<PredId> reach = preds_closure(psi, sid);
  bool changed = true;
  while (changed) {
    changed = sweep_condition1(psi, fv_psi, lambda);
    changed = sweep_condition2(sid, reach, sweep_order, lambda) || changed;
  }
  return lambda;
}

FvProfile compute_fv_profile(const Formula& psi, const Sid& sid) {
  return compute_fv_profile_ordered(psi, sid, sid.order);
}

bool profile_satisfies_conditions(const Formula& psi, const Sid& sid, const FvProfile& lambda) {
  std::set<VarId> fv_psi = free_var_set(psi);
  for (VarId v : vargs(psi, lambda)) {
    if (!fv_psi.count(v)) return false;
  }
  std::set<PredId> reach = preds_closure(psi, sid);
  for (PredId p : reach) {
    for (const Rule& r : sid.rules(p)) {
      const auto& head_positions = profile_at(lambda, p);
      for (const Atom& a : r.body) {
        const auto* call = std::get_if<PredAtom>(&a);
        if (!call) continue;
        for (uint32_t i : profile_at(lambda, call->pred)) {
          bool ok = false;
          for (uint32_t j : head_positions) {
            if (r.params[j - 1] == call->args[i - 1]) {
              ok = true;
              break;
            }
          }
          if (!ok) return false;
        }
      }
    }
  }
  return true;
}

std::set<VarId> allocated_vars(const std::vector<Atom>& atoms) {
  std::set<VarId> out;
  for (const Atom& a : atoms) {
    if (const auto* pt = std::get_if<PointsToAtom>(&a)) out.insert(pt->src);
  }
  // close under equality chains
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Atom& a : atoms) {
      if (const auto* eq = std::get_if<EqAtom>(&a)) {
        if (out.count(eq->lhs) && !out.count(eq->rhs)) {
          out.insert(eq->rhs);
          changed = true;
        } else if (out.count(eq->rhs) && !out.count(eq->lhs)) {
          out.insert(eq->lhs);
          changed = true;
        }
      }
    }
  }
  return out;
}

std::set<VarId> allocated_vars(const SymbolicHeap& sh) { return allocated_vars(sh.atoms); }

namespace {

// Allocated-closure of a rule body under current must-alloc sets: points-to
// sources, arguments at must-alloc positions of body atoms, then equality
// chains.
std::set<VarId> rule_alloc_closure(const Rule& r, const MustAllocSets& must_alloc) {
  std::set<VarId> base;
  for (const Atom& a : r.body) {
    if (const auto* pt = std::get_if<PointsToAtom>(&a)) base.insert(pt->src);
    if (const auto* call = std::get_if<PredAtom>(&a)) {
      auto it = must_alloc.find(call->pred);
      if (it == must_alloc.end()) continue;
      for (uint32_t i : it->second) {
        if (i >= 1 && i <= call->args.size()) base.insert(call->args[i - 1]);
      }
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Atom& a : r.body) {
      if (const auto* eq = std::get_if<EqAtom>(&a)) {
        if (base.count(eq->lhs) && base.insert(eq->rhs).second) changed = true;
        if (base.count(eq->rhs) && base.insert(eq->lhs).second) changed = true;
      }
    }
  }
  return base;
}

}  // namespace

MustAllocSets must_alloc_params(const Sid& sid, const std::set<PredId>& preds) {
  MustAllocSets sets;
  for (PredId p : preds) {
    sets[p] = full_positions(sid.declared(p) ? sid.arity(p) : 0);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (PredId p : sid.order) {
      if (!preds.count(p)) continue;
      auto& positions = sets[p];
      if (positions.empty()) continue;
      for (const Rule& r : sid.rules(p)) {
        std::set<VarId> closure = rule_alloc_closure(r, sets);
        for (auto it = positions.begin(); it != positions.end();) {
          if (!closure.count(r.params[*it - 1])) {
            it = positions.erase(it);
            changed = true;
          } else {
            ++it;
          }
        }
      }
    }
  }
  return sets;
}

std::optional<RuleShape> progressing_shape(const Rule& r) {
  if (r.params.empty()) return std::nullopt;
  RuleShape shape{nullptr, {}};
  for (const Atom& a : r.body) {
    if (const auto* pt = std::get_if<PointsToAtom>(&a)) {
      if (shape.pts) return std::nullopt;  // two points-to atoms
      shape.pts = pt;
    } else {
      shape.rho.push_back(&a);
    }
  }
  if (!shape.pts || shape.pts->src != r.params[0]) return std::nullopt;
  return shape;
}

bool is_progressing(const Rule& r) { return progressing_shape(r).has_value(); }

namespace {

std::set<VarId> field_vars(const PointsToAtom& pt) {
  std::set<VarId> out;
  for (Term t : pt.fields) {
    if (!t.is_nil()) out.insert(t.as_var());
  }
  return out;
}

PredAtom head_atom(const Rule& r) { return PredAtom{r.head, r.params}; }

}  // namespace

bool is_connected(const Rule& r) {
  auto shape = progressing_shape(r);
  if (!shape) return false;
  std::set<VarId> fields = field_vars(*shape->pts);
  for (const Atom* a : shape->rho) {
    if (const auto* call = std::get_if<PredAtom>(a)) {
      if (call->args.empty() || !fields.count(call->args[0])) return false;
    }
  }
  return true;
}

bool is_lambda_connected(const Rule& r, const FvProfile& lambda) {
  auto shape = progressing_shape(r);
  if (!shape) return false;
  std::set<VarId> allowed = field_vars(*shape->pts);
  for (VarId v : vargs(head_atom(r), lambda)) allowed.insert(v);
  for (const Atom* a : shape->rho) {
    if (const auto* call = std::get_if<PredAtom>(a)) {
      if (call->args.empty() || !allowed.count(call->args[0])) return false;
    }
  }
  return true;
}

bool is_lambda_restricted(const Rule& r, const FvProfile& lambda) {
  auto shape = progressing_shape(r);
  std::vector<Atom> rho;
  if (shape) {
    for (const Atom* a : shape->rho) rho.push_back(*a);
  } else {
    for (const Atom& a : r.body) {
      if (!std::holds_alternative<PointsToAtom>(a)) rho.push_back(a);
    }
  }
  std::set<VarId> v_set = vargs(head_atom(r), lambda);
  for (const Atom& a : rho) {
    if (const auto* d = std::get_if<DiseqAtom>(&a)) {
      if (!v_set.count(d->lhs) && !v_set.count(d->rhs)) return false;
    }
  }
  for (VarId v : vargs(rho, lambda)) {
    if (!v_set.count(v)) return false;
  }
  return true;
}

bool is_established(const Rule& r, const MustAllocSets& must_alloc) {
  std::set<VarId> closure = rule_alloc_closure(r, must_alloc);
  for (VarId e : r.existentials()) {
    if (!closure.count(e)) return false;
  }
  return true;
}

std::optional<std::string> lambda_restricted_violation(const Formula& f, const FvProfile& lambda,
                                                       const std::set<VarId>& v_set) {
  for (const SymbolicHeap& sh : f.disjuncts) {
    for (const Atom& a : sh.atoms) {
      if (const auto* d = std::get_if<DiseqAtom>(&a)) {
        if (!v_set.count(d->lhs) && !v_set.count(d->rhs)) return print(a);
      }
    }
  }
  for (VarId v : vargs(f, lambda)) {
    if (!v_set.count(v)) {
      return "lambda-position variable " + symbols::name(v) + " outside the tracked set";
    }
  }
  return std::nullopt;
}

namespace {

SideFlags classify_side(const Sid& sid, const std::set<PredId>& preds, const FvProfile& lambda,
                        const MustAllocSets& must_alloc, std::vector<Violation>& violations) {
  SideFlags flags;
  auto note = [&](PredId p, uint32_t idx, const char* cond, std::string witness) {
    violations.push_back(Violation{p, idx, cond, std::move(witness)});
  };
  for (PredId p : sid.order) {
    if (!preds.count(p)) continue;
    const auto& rules = sid.rules(p);
    for (uint32_t i = 0; i < rules.size(); ++i) {
      const Rule& r = rules[i];
      if (!is_progressing(r)) {
        flags.progressing = false;
        note(p, i + 1, "progressing", print(r));
      }
      if (!is_connected(r)) {
        flags.connected = false;
        // witness: the first offending body atom, when identifiable
        std::string w = print(r);
        if (auto shape = progressing_shape(r)) {
          std::set<VarId> fields = field_vars(*shape->pts);
          for (const Atom* a : shape->rho) {
            if (const auto* call = std::get_if<PredAtom>(a)) {
              if (call->args.empty() || !fields.count(call->args[0])) {
                w = print(*a);
                break;
              }
            }
          }
        }
        note(p, i + 1, "connected", w);
      }
      if (!is_established(r, must_alloc)) {
        flags.established = false;
        std::string w;
        std::set<VarId> closure = rule_alloc_closure(r, must_alloc);
        for (VarId e : r.existentials()) {
          if (!closure.count(e)) {
            w = symbols::name(e);
            break;
          }
        }
        note(p, i + 1, "established", w);
      }
      if (!is_lambda_connected(r, lambda)) {
        flags.lambda_connected = false;
        note(p, i + 1, "lambda-connected", print(r));
      }
      if (!is_lambda_restricted(r, lambda)) {
        flags.lambda_restricted = false;
        note(p, i + 1, "lambda-restricted", print(r));
      }
    }
  }
  return flags;
}

}  // namespace

ClassificationReport classify_problem(const EntailmentProblem& p) {
  ClassificationReport rep;
  rep.lambda_rhs = compute_fv_profile(p.rhs, p.sid);
  rep.lambda_lhs = compute_fv_profile(p.lhs, p.sid);
  rep.left_preds = preds_closure(p.lhs, p.sid);
  rep.right_preds = preds_closure(p.rhs, p.sid);
  MustAllocSets left_alloc = must_alloc_params(p.sid, rep.left_preds);
  MustAllocSets right_alloc = must_alloc_params(p.sid, rep.right_preds);
  rep.left = classify_side(p.sid, rep.left_preds, rep.lambda_lhs, left_alloc, rep.violations);
  rep.right = classify_side(p.sid, rep.right_preds, rep.lambda_rhs, right_alloc, rep.violations);

  for (PredId q : p.sid.order) {
    const auto& rules = p.sid.rules(q);
    for (uint32_t i = 0; i < rules.size(); ++i) {
      if (!is_progressing(rules[i])) {
        rep.all_rules_progressing = false;
        if (!rep.left_preds.count(q) && !rep.right_preds.count(q)) {
          rep.violations.push_back(Violation{q, i + 1, "progressing", print(rules[i])});
        }
      }
    }
  }

  std::set<VarId> fv_lhs = free_var_set(p.lhs);
  if (auto w = lambda_restricted_violation(p.rhs, rep.lambda_rhs, fv_lhs)) {
    rep.psi_restricted = false;
    rep.violations.push_back(Violation{PredId{0}, 0, "psi-restricted", *w});
  }

  bool right_ok = true;
  for (PredId q : rep.right_preds) {
    for (const Rule& r : p.sid.rules(q)) {
      right_ok = right_ok && is_lambda_connected(r, rep.lambda_rhs) &&
                 is_lambda_restricted(r, rep.lambda_rhs);
    }
  }
  rep.safe = rep.all_rules_progressing && rep.psi_restricted && right_ok;

  {
    std::set<std::tuple<PredId, uint32_t, std::string>> seen;
    std::vector<Violation> unique;
    for (Violation& v : rep.violations) {
      if (seen.emplace(v.pred, v.rule, v.condition).second) unique.push_back(std::move(v));
    }
    rep.violations = std::move(unique);
  }
  return rep;
}

Established exact_establishment(const Rule& r, const Sid& sid, const MustAllocSets& must_alloc,
                                uint32_t depth, std::string* witness) {
  bool fixpoint_says = is_established(r, must_alloc);
  std::vector<VarId> exvars = r.existentials();
  SymbolicHeap body{{}, r.body};
  for (const SymbolicHeap& unfolding : predicate_less_unfoldings(body, sid, depth)) {
    std::set<VarId> alloc = allocated_vars(unfolding.atoms);
    for (VarId e : exvars) {
      if (!alloc.count(e)) {
        if (witness) *witness = symbols::name(e) + " unallocated in: " + print(unfolding);
        if (fixpoint_says) {
          throw Error("established fixpoint contradicted by unfolding: " + print(unfolding));
        }
        return Established::No;
      }
    }
  }
  return fixpoint_says ? Established::Yes : Established::Unknown;
}

}  // namespace slent
