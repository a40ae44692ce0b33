#include "slent/reduction.hpp"

#include <algorithm>
#include <sstream>

#include "slent/printer.hpp"

namespace slent {

namespace {

std::set<std::string> taken_pred_names(const NormalizedProblem& n) {
  std::set<std::string> out;
  for (PredId p : n.problem.sid.order) out.insert(symbols::name(p));
  out.insert(n.ctx.bottom_name);
  return out;
}

std::string unique_name(const std::set<std::string>& taken, const std::string& base) {
  if (!taken.count(base)) return base;
  for (uint32_t k = 1;; ++k) {
    std::string c = base + "#" + std::to_string(k);
    if (!taken.count(c)) return c;
  }
}

std::string mask_bits(uint32_t mask, uint32_t n) {
  std::string s;
  for (uint32_t i = 0; i < n; ++i) s += (mask >> i & 1) ? '1' : '0';
  return s;
}

std::vector<uint32_t> mask_positions(uint32_t mask) {
  std::vector<uint32_t> out;
  for (uint32_t i = 0; mask >> i; ++i) {
    if (mask >> i & 1) out.push_back(i + 1);
  }
  return out;
}

uint64_t sat_mul(uint64_t a, uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

uint64_t sat_pow(uint64_t base, uint64_t exp) {
  uint64_t r = 1;
  for (uint64_t i = 0; i < exp; ++i) r = sat_mul(r, base);
  return r;
}

std::vector<VarId> rule_vars(const Rule& r) {
  std::vector<VarId> out = r.params;
  std::set<VarId> seen(out.begin(), out.end());
  for (const Atom& a : r.body) collect_free_vars(a, out, seen);
  return out;
}

// All substitutions with domain a subset of `vars` and images in `targets`,
// enumerated as an odometer (last variable fastest; per variable: unmapped,
// then targets in order).
std::vector<Substitution> enumerate_sigmas(const std::vector<VarId>& vars,
                                           const std::vector<VarId>& targets) {
  std::vector<Substitution> out;
  std::vector<size_t> digits(vars.size(), 0);  // 0 = unmapped, k = targets[k-1]
  for (;;) {
    Substitution sigma;
    for (size_t i = 0; i < vars.size(); ++i) {
      if (digits[i] > 0) sigma.set(vars[i], targets[digits[i] - 1]);
    }
    out.push_back(std::move(sigma));
    size_t i = vars.size();
    while (i > 0) {
      --i;
      if (digits[i] < targets.size()) {
        ++digits[i];
        std::fill(digits.begin() + i + 1, digits.end(), 0);
        break;
      }
      if (i == 0) return out;
      digits[i] = 0;
    }
    if (vars.empty()) return out;
  }
}

// Canonical body text with parameters and existentials renumbered; used to
// deduplicate generated rules up to existential renaming.
std::string canonical_rule_key(const Rule& r) {
  std::map<VarId, std::string> names;
  for (size_t i = 0; i < r.params.size(); ++i) names[r.params[i]] = "p" + std::to_string(i);
  size_t next = 0;
  auto nm = [&](VarId v) -> const std::string& {
    auto it = names.find(v);
    if (it == names.end()) it = names.emplace(v, "e" + std::to_string(next++)).first;
    return it->second;
  };
  std::ostringstream os;
  os << r.params.size() << "|";
  for (const Atom& a : r.body) {
    std::visit(
        [&](const auto& at) {
          using T = std::decay_t<decltype(at)>;
          if constexpr (std::is_same_v<T, EqAtom>) {
            os << "=" << nm(at.lhs) << "," << nm(at.rhs);
          } else if constexpr (std::is_same_v<T, DiseqAtom>) {
            os << "!" << nm(at.lhs) << "," << nm(at.rhs);
          } else if constexpr (std::is_same_v<T, PointsToAtom>) {
            os << ">" << nm(at.src) << ":";
            for (Term t : at.fields) os << (t.is_nil() ? std::string("0") : nm(t.as_var())) << ",";
          } else {
            os << "@" << symbols::name(at.pred) << "(";
            for (VarId v : at.args) os << nm(v) << ",";
            os << ")";
          }
          os << ";";
        },
        a);
  }
  return os.str();
}

void rename_rule_vars_apart(Rule& r, const std::set<VarId>& avoid) {
  std::vector<VarId> vars = rule_vars(r);
  Substitution rename;
  FreshNames fresh;
  for (VarId v : vars) fresh.reserve(v);
  for (VarId v : avoid) fresh.reserve(v);
  for (VarId v : vars) {
    if (avoid.count(v)) rename.set(v, fresh.fresh_var(symbols::name(v)));
  }
  if (rename.empty()) return;
  for (VarId& v : r.params) v = rename(v);
  r.body = apply_substitution(r.body, rename);
}

// Replaces the points-to atoms of a formula by calls to per-pattern helper
// predicates (one per side and nil mask), adding their defining rules.
void strip_points_to(Formula& f, Sid& sid, const std::string& base,
                     const std::set<VarId>& w_set, std::set<std::string>& taken) {
  std::map<uint32_t, PredId> by_mask;
  for (SymbolicHeap& sh : f.disjuncts) {
    for (Atom& a : sh.atoms) {
      const auto* pt = std::get_if<PointsToAtom>(&a);
      if (!pt) continue;
      uint32_t mask = 0;
      for (size_t i = 0; i < pt->fields.size(); ++i) {
        if (pt->fields[i].is_nil()) mask |= 1u << i;
      }
      auto it = by_mask.find(mask);
      if (it == by_mask.end()) {
        std::string name = base;
        if (mask != 0) name += "_n" + mask_bits(mask, static_cast<uint32_t>(pt->fields.size()));
        name = unique_name(taken, name);
        taken.insert(name);
        PredId pred = symbols::pred(name);
        Rule rule;
        rule.head = pred;
        FreshNames fresh;
        for (VarId v : w_set) fresh.reserve(v);
        VarId src = fresh.fresh_var("x");
        rule.params.push_back(src);
        PointsToAtom cell{src, {}};
        for (size_t i = 0; i < pt->fields.size(); ++i) {
          if (mask >> i & 1) {
            cell.fields.push_back(Term::nil());
          } else {
            VarId y = fresh.fresh_var("y" + std::to_string(i + 1));
            rule.params.push_back(y);
            cell.fields.push_back(Term::var(y));
          }
        }
        rule.body.push_back(std::move(cell));
        sid.add_rule(std::move(rule));
        it = by_mask.emplace(mask, pred).first;
      }
      PredAtom call{it->second, {pt->src}};
      for (Term t : pt->fields) {
        if (!t.is_nil()) call.args.push_back(t.as_var());
      }
      a = std::move(call);
    }
  }
}

Formula rename_formula_preds(const Formula& f, const std::map<PredId, PredId>& map) {
  Formula out = f;
  for (SymbolicHeap& sh : out.disjuncts) {
    for (Atom& a : sh.atoms) {
      if (auto* call = std::get_if<PredAtom>(&a)) {
        auto it = map.find(call->pred);
        if (it != map.end()) call->pred = it->second;
      }
    }
  }
  return out;
}

}  // namespace

NormalizedProblem normalize(const EntailmentProblem& input, const NormalizeOptions& opts) {
  validate(input);
  ClassificationReport rep = classify_problem(input);
  if (!rep.safe && !opts.force) throw NotSafe(std::move(rep));

  NormalizedProblem n;
  n.problem = input;
  EntailmentProblem& p = n.problem;
  p.recompute_free_vars();

  // nu > 0: closed problems get one dummy free variable
  if (p.free_vars.empty()) {
    FreshNames fresh;
    for (const Formula* f : {&p.lhs, &p.rhs}) {
      for (const SymbolicHeap& sh : f->disjuncts) {
        for (VarId v : sh.bound) fresh.reserve(v);
      }
    }
    VarId d = fresh.fresh_var("w");
    p.lhs.disjuncts.front().atoms.push_back(EqAtom{d, d});
    p.recompute_free_vars();
  }
  std::set<VarId> w_set(p.free_vars.begin(), p.free_vars.end());

  // the free variables must not occur in the SID
  for (PredId q : p.sid.order) {
    for (Rule& r : p.sid.defs.at(q).rules) rename_rule_vars_apart(r, w_set);
  }

  // points-to atoms in the formulas become helper predicate calls
  std::set<std::string> taken;
  for (PredId q : p.sid.order) taken.insert(symbols::name(q));
  strip_points_to(p.lhs, p.sid, "pt__l", w_set, taken);
  strip_points_to(p.rhs, p.sid, "pt__r", w_set, taken);

  // disjoint predicate cones: shared predicates get right-hand-side copies
  std::set<PredId> left = preds_closure(p.lhs, p.sid);
  std::set<PredId> right = preds_closure(p.rhs, p.sid);
  std::vector<PredId> shared;
  for (PredId q : p.sid.order) {
    if (left.count(q) && right.count(q)) shared.push_back(q);
  }
  if (!shared.empty()) {
    std::map<PredId, PredId> copy;
    for (PredId q : shared) {
      std::string name = unique_name(taken, symbols::name(q) + "__r");
      taken.insert(name);
      copy[q] = symbols::pred(name);
    }
    auto rename_atoms = [&](std::vector<Atom>& atoms) {
      for (Atom& a : atoms) {
        if (auto* call = std::get_if<PredAtom>(&a)) {
          auto it = copy.find(call->pred);
          if (it != copy.end()) call->pred = it->second;
        }
      }
    };
    for (PredId q : shared) {
      for (const Rule& r : p.sid.rules(q)) {
        Rule dup = r;
        dup.head = copy.at(q);
        rename_atoms(dup.body);
        p.sid.add_rule(std::move(dup));
      }
    }
    for (PredId q : right) {
      if (copy.count(q)) continue;
      for (Rule& r : p.sid.defs.at(q).rules) rename_atoms(r.body);
    }
    p.rhs = rename_formula_preds(p.rhs, copy);
    right = preds_closure(p.rhs, p.sid);
  }
  n.left_preds = left;
  n.right_preds = right;

  // body predicate atoms of left-cone rules must not be rooted at a head
  // parameter: replace the root by a fresh z and conjoin z = root
  for (PredId q : p.sid.order) {
    if (!n.left_preds.count(q)) continue;
    for (Rule& r : p.sid.defs.at(q).rules) {
      std::set<VarId> params(r.params.begin(), r.params.end());
      FreshNames fresh;
      for (VarId v : rule_vars(r)) fresh.reserve(v);
      for (VarId v : w_set) fresh.reserve(v);
      std::vector<Atom> extra;
      for (Atom& a : r.body) {
        auto* call = std::get_if<PredAtom>(&a);
        if (!call || call->args.empty() || !params.count(call->args[0])) continue;
        VarId z = fresh.fresh_var("z");
        extra.push_back(EqAtom{z, call->args[0]});
        call->args[0] = z;
      }
      r.body.insert(r.body.end(), extra.begin(), extra.end());
    }
  }

  // uniform existential count
  uint32_t mu = 0;
  auto in_cone = [&](PredId q) { return n.left_preds.count(q) || n.right_preds.count(q); };
  for (PredId q : p.sid.order) {
    if (!in_cone(q)) continue;
    for (const Rule& r : p.sid.rules(q)) {
      mu = std::max(mu, static_cast<uint32_t>(r.existentials().size()));
    }
  }
  for (PredId q : p.sid.order) {
    if (!in_cone(q)) continue;
    for (Rule& r : p.sid.defs.at(q).rules) {
      uint32_t have = static_cast<uint32_t>(r.existentials().size());
      FreshNames fresh;
      for (VarId v : rule_vars(r)) fresh.reserve(v);
      for (VarId v : w_set) fresh.reserve(v);
      for (uint32_t k = have; k < mu; ++k) {
        VarId u = fresh.fresh_var("u");
        r.body.push_back(EqAtom{u, u});
      }
    }
  }

  n.lambda = compute_fv_profile(p.rhs, p.sid);
  n.ctx.kappa = p.sid.record_width;
  n.ctx.nu = static_cast<uint32_t>(p.free_vars.size());
  n.ctx.mu = mu;
  n.ctx.w = p.free_vars;
  n.ctx.bottom_name = unique_name(taken, "bot__");
  n.ctx.bottom = symbols::pred(n.ctx.bottom_name);
  p.mu = mu;
  return n;
}

PredId right_decorated_pred(const NormalizedProblem& n, PredId p) {
  return symbols::pred(unique_name(taken_pred_names(n), symbols::name(p) + "__hat"));
}

PredId left_decorated_pred(const NormalizedProblem& n, PredId p, uint32_t x_mask) {
  uint32_t arity = n.problem.sid.arity(p);
  return symbols::pred(unique_name(taken_pred_names(n),
                                   symbols::name(p) + "__X_" + mask_bits(x_mask, arity)));
}

DecorationTable decoration_table(const NormalizedProblem& n) {
  DecorationTable table;
  table[n.ctx.bottom] = {1};
  for (PredId p : n.problem.sid.order) {
    if (!n.left_preds.count(p)) continue;
    uint32_t arity = n.problem.sid.arity(p);
    for (uint32_t mask = 0; mask < (1u << arity); ++mask) {
      auto positions = mask_positions(mask);
      table[left_decorated_pred(n, p, mask)] =
          std::set<uint32_t>(positions.begin(), positions.end());
    }
  }
  return table;
}

Formula decorate_consequent(const Formula& psi, const NormalizedProblem& n) {
  Formula out = psi;
  for (SymbolicHeap& sh : out.disjuncts) {
    for (Atom& a : sh.atoms) {
      if (auto* call = std::get_if<PredAtom>(&a)) {
        call->pred = right_decorated_pred(n, call->pred);
        call->args.insert(call->args.end(), n.ctx.w.begin(), n.ctx.w.end());
      }
    }
  }
  return out;
}

namespace {

struct Decorator {
  const NormalizedProblem& n;

  Atom right(const Atom& a) const {
    if (const auto* call = std::get_if<PredAtom>(&a)) {
      PredAtom out{right_decorated_pred(n, call->pred), call->args};
      out.args.insert(out.args.end(), n.ctx.w.begin(), n.ctx.w.end());
      return out;
    }
    return a;
  }

  Atom left(const Atom& a, uint32_t x_mask) const {
    const auto& call = std::get<PredAtom>(a);
    PredAtom out{left_decorated_pred(n, call.pred, x_mask), call.args};
    out.args.insert(out.args.end(), n.ctx.w.begin(), n.ctx.w.end());
    return out;
  }
};

std::vector<std::pair<std::string, std::string>> sigma_record(const Substitution& sigma) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [from, to] : sigma.entries()) {
    out.emplace_back(symbols::name(from), symbols::name(to));
  }
  return out;
}

}  // namespace

Sid build_right_sid(const NormalizedProblem& n, GenerationLog* log, const BuildOptions& opts) {
  const Sid& src = n.problem.sid;
  const ContextConstants& ctx = n.ctx;
  Decorator deco{n};
  GenerationLog scratch;
  GenerationLog& L = log ? *log : scratch;

  Sid out;
  out.record_width = ctx.kappa + ctx.nu + ctx.mu;
  out.declare(ctx.bottom, 1);

  for (PredId p : src.order) {
    if (!n.right_preds.count(p)) continue;
    PredId hat = right_decorated_pred(n, p);
    out.declare(hat, src.arity(p) + ctx.nu);
    std::set<std::string> dedup;
    const auto& rules = src.rules(p);
    for (uint32_t ri = 0; ri < rules.size(); ++ri) {
      const Rule& r = rules[ri];
      auto shape = progressing_shape(r);
      if (!shape) {
        throw Error("right-cone rule is not progressing: " + print(r));
      }
      std::vector<Atom> rho;
      for (const Atom* a : shape->rho) rho.push_back(*a);

      std::vector<VarId> sigma_dom;
      for (VarId v : free_vars_of_atoms(rho)) {
        if (v != r.params[0]) sigma_dom.push_back(v);
      }
      FreshNames fresh;
      for (VarId v : rule_vars(r)) fresh.reserve(v);
      for (VarId v : ctx.w) fresh.reserve(v);
      std::vector<VarId> zs;
      for (uint32_t i = 0; i < ctx.mu; ++i) zs.push_back(fresh.fresh_var("z"));

      uint64_t rule_candidates = 0;
      for (const Substitution& sigma : enumerate_sigmas(sigma_dom, ctx.w)) {
        for (uint32_t imask = 0; imask < (1u << ctx.mu); ++imask) {
          if (++rule_candidates > opts.budget_per_rule) {
            throw CombinatorialBudgetExceeded("more than " +
                                              std::to_string(opts.budget_per_rule) +
                                              " candidates for rule: " + print(r));
          }
          ++L.candidates;
          ++L.sigma_i_pairs;
          Rule cand;
          cand.head = hat;
          cand.params = r.params;
          cand.params.insert(cand.params.end(), ctx.w.begin(), ctx.w.end());

          PointsToAtom pt{r.params[0], shape->pts->fields};
          for (VarId w : ctx.w) pt.fields.push_back(Term::var(w));
          for (VarId z : zs) pt.fields.push_back(Term::var(z));
          cand.body.push_back(apply_substitution(Atom{pt}, sigma));
          for (const Atom& a : rho) {
            cand.body.push_back(apply_substitution(deco.right(a), sigma));
          }
          for (uint32_t i = 0; i < ctx.mu; ++i) {
            if (imask >> i & 1) cand.body.push_back(PredAtom{ctx.bottom, {zs[i]}});
          }
          for (const auto& [x, to] : sigma.entries()) cand.body.push_back(EqAtom{x, to});

          CandidateRecord rec;
          rec.pred = hat;
          rec.source_pred = p;
          rec.source_rule = ri + 1;
          rec.sigma = sigma_record(sigma);
          rec.i_set = mask_positions(imask);
          rec.rule_text = print(cand);
          if (!is_connected(cand)) {
            rec.reason = "not-connected";
          } else if (!dedup.insert(canonical_rule_key(cand)).second) {
            rec.reason = "duplicate";
          } else {
            rec.kept = true;
            ++L.kept;
            out.add_rule(cand);
          }
          L.entries.push_back(std::move(rec));
        }
      }
    }
  }
  return out;
}

Sid build_left_sid(const NormalizedProblem& n, GenerationLog* log, const BuildOptions& opts) {
  const Sid& src = n.problem.sid;
  const ContextConstants& ctx = n.ctx;
  Decorator deco{n};
  DecorationTable table = decoration_table(n);
  GenerationLog scratch;
  GenerationLog& L = log ? *log : scratch;

  Sid out;
  out.record_width = ctx.kappa + ctx.nu + ctx.mu;
  out.declare(ctx.bottom, 1);

  for (PredId p : src.order) {
    if (!n.left_preds.count(p)) continue;
    uint32_t arity = src.arity(p);
    for (uint32_t mask = 0; mask < (1u << arity); ++mask) {
      out.declare(left_decorated_pred(n, p, mask), arity + ctx.nu);
    }
    const auto& rules = src.rules(p);
    std::map<PredId, std::set<std::string>> dedup;
    for (uint32_t ri = 0; ri < rules.size(); ++ri) {
      const Rule& r = rules[ri];
      auto shape = progressing_shape(r);
      if (!shape) {
        throw Error("left-cone rule is not progressing: " + print(r));
      }
      std::vector<Atom> rho;
      for (const Atom* a : shape->rho) rho.push_back(*a);
      std::vector<VarId> zs = r.existentials();
      if (zs.size() != ctx.mu) {
        throw Error("rule existential count " + std::to_string(zs.size()) +
                    " differs from mu=" + std::to_string(ctx.mu) + ": " + print(r));
      }
      std::vector<VarId> targets = r.params;
      targets.insert(targets.end(), ctx.w.begin(), ctx.w.end());
      targets.insert(targets.end(), zs.begin(), zs.end());

      std::vector<Substitution> sigmas = enumerate_sigmas(zs, targets);
      for (const Substitution& sigma : sigmas) {
        L.sigma_i_pairs += uint64_t{1} << (ctx.mu - sigma.entries().size());
      }

      uint64_t rule_candidates = 0;
      for (uint32_t x_mask = 0; x_mask < (1u << arity); ++x_mask) {
        PredId head = left_decorated_pred(n, p, x_mask);
        for (const Substitution& sigma : sigmas) {
          uint32_t forbidden = 0;
          for (uint32_t i = 0; i < ctx.mu; ++i) {
            if (sigma.lookup(zs[i])) forbidden |= 1u << i;
          }
          std::vector<Atom> rho_sigma = apply_substitution(rho, sigma);
          std::vector<size_t> call_sites;
          for (size_t i = 0; i < rho_sigma.size(); ++i) {
            if (std::holds_alternative<PredAtom>(rho_sigma[i])) call_sites.push_back(i);
          }
          std::vector<uint32_t> deco_masks(call_sites.size(), 0);
          for (;;) {
            for (uint32_t imask = 0; imask < (1u << ctx.mu); ++imask) {
              if (imask & forbidden) continue;
              if (++rule_candidates > opts.budget_per_rule) {
                throw CombinatorialBudgetExceeded(
                    "more than " + std::to_string(opts.budget_per_rule) +
                    " candidates for rule: " + print(r));
              }
              ++L.candidates;

              Rule cand;
              cand.head = head;
              cand.params = r.params;
              cand.params.insert(cand.params.end(), ctx.w.begin(), ctx.w.end());
              PointsToAtom pt{r.params[0], shape->pts->fields};
              for (VarId w : ctx.w) pt.fields.push_back(Term::var(w));
              for (VarId z : zs) pt.fields.push_back(Term::var(z));
              cand.body.push_back(apply_substitution(Atom{pt}, sigma));
              for (size_t i = 0, site = 0; i < rho_sigma.size(); ++i) {
                if (site < call_sites.size() && call_sites[site] == i) {
                  cand.body.push_back(deco.left(rho_sigma[i], deco_masks[site]));
                  ++site;
                } else {
                  cand.body.push_back(rho_sigma[i]);
                }
              }
              for (uint32_t i = 0; i < ctx.mu; ++i) {
                if (imask >> i & 1) cand.body.push_back(PredAtom{ctx.bottom, {zs[i]}});
              }

              CandidateRecord rec;
              rec.pred = head;
              rec.source_pred = p;
              rec.source_rule = ri + 1;
              rec.sigma = sigma_record(sigma);
              rec.i_set = mask_positions(imask);
              rec.x_set = mask_positions(x_mask);
              for (uint32_t dm : deco_masks) rec.deco.push_back(mask_positions(dm));
              rec.rule_text = print(cand);

              std::set<VarId> alloc_body = alloc_set_decorated(cand.body, table);
              std::set<VarId> alloc_head;
              for (uint32_t i : mask_positions(x_mask)) alloc_head.insert(r.params[i - 1]);
              bool well_defined = alloc_head.count(r.params[0]) > 0;
              for (VarId v : alloc_head) well_defined = well_defined && alloc_body.count(v) > 0;
              if (well_defined) {
                std::set<VarId> params(cand.params.begin(), cand.params.end());
                for (VarId v : free_vars_of_atoms(cand.body)) {
                  if (!alloc_body.count(v) && !params.count(v)) {
                    well_defined = false;
                    break;
                  }
                }
              }
              if (!well_defined) {
                rec.reason = "not-well-defined";
              } else if (!dedup[head].insert(canonical_rule_key(cand)).second) {
                rec.reason = "duplicate";
              } else {
                rec.kept = true;
                ++L.kept;
                out.add_rule(cand);
              }
              L.entries.push_back(std::move(rec));
            }
            // next decoration (odometer over the call sites)
            size_t site = call_sites.size();
            bool bumped = false;
            while (site > 0) {
              --site;
              const auto& call = std::get<PredAtom>(rho_sigma[call_sites[site]]);
              uint32_t limit = (1u << call.args.size()) - 1;
              if (deco_masks[site] < limit) {
                ++deco_masks[site];
                std::fill(deco_masks.begin() + site + 1, deco_masks.end(), 0);
                bumped = true;
                break;
              }
              deco_masks[site] = 0;
            }
            if (!bumped) break;
          }
        }
      }
    }
  }
  return out;
}

std::vector<Formula> enumerate_decorations(const Formula& phi, const NormalizedProblem& n) {
  Decorator deco{n};
  // collect predicate atom sites across all disjuncts
  std::vector<std::pair<size_t, size_t>> sites;  // (disjunct, atom)
  for (size_t d = 0; d < phi.disjuncts.size(); ++d) {
    const auto& atoms = phi.disjuncts[d].atoms;
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (std::holds_alternative<PredAtom>(atoms[i])) sites.emplace_back(d, i);
    }
  }
  std::vector<uint32_t> masks(sites.size(), 0);
  std::vector<Formula> out;
  for (;;) {
    Formula variant = phi;
    for (size_t s = 0; s < sites.size(); ++s) {
      Atom& a = variant.disjuncts[sites[s].first].atoms[sites[s].second];
      a = deco.left(a, masks[s]);
    }
    out.push_back(std::move(variant));
    size_t s = sites.size();
    bool bumped = false;
    while (s > 0) {
      --s;
      const auto& call = std::get<PredAtom>(phi.disjuncts[sites[s].first].atoms[sites[s].second]);
      uint32_t limit = (1u << call.args.size()) - 1;
      if (masks[s] < limit) {
        ++masks[s];
        std::fill(masks.begin() + s + 1, masks.end(), 0);
        bumped = true;
        break;
      }
      masks[s] = 0;
    }
    if (!bumped) break;
  }
  return out;
}

std::set<VarId> alloc_set_decorated(const std::vector<Atom>& atoms, const DecorationTable& table) {
  std::set<VarId> out;
  for (const Atom& a : atoms) {
    if (const auto* pt = std::get_if<PointsToAtom>(&a)) out.insert(pt->src);
    if (const auto* call = std::get_if<PredAtom>(&a)) {
      auto it = table.find(call->pred);
      if (it == table.end()) continue;
      for (uint32_t i : it->second) {
        if (i >= 1 && i <= call->args.size()) out.insert(call->args[i - 1]);
      }
    }
  }
  return out;
}

std::set<VarId> alloc_set_decorated(const Formula& f, const DecorationTable& table) {
  std::set<VarId> out;
  for (const SymbolicHeap& sh : f.disjuncts) {
    auto part = alloc_set_decorated(sh.atoms, table);
    out.insert(part.begin(), part.end());
  }
  return out;
}

EntailmentProblem ReducedProblem::instance_problem(size_t k) const {
  EntailmentProblem p;
  p.lhs = instances.at(k);
  p.rhs = psi_hat;
  p.sid = rhat;
  p.mu = normalized.ctx.mu;
  p.recompute_free_vars();
  return p;
}

ReducedProblem reduce_safe_to_pce(const EntailmentProblem& input, const ReduceOptions& opts) {
  ReducedProblem out;
  out.normalized = normalize(input, opts.normalize);
  const NormalizedProblem& n = out.normalized;
  const ContextConstants& ctx = n.ctx;

  out.psi_hat = decorate_consequent(n.problem.rhs, n);
  Sid right = build_right_sid(n, &out.right_log, opts.build);
  Sid left = build_left_sid(n, &out.left_log, opts.build);
  out.table = decoration_table(n);
  {
    uint64_t predicted = 1;
    for (const SymbolicHeap& sh : n.problem.lhs.disjuncts) {
      for (const Atom& a : sh.atoms) {
        if (const auto* call = std::get_if<PredAtom>(&a)) {
          predicted = sat_mul(predicted, uint64_t{1} << call->args.size());
        }
      }
    }
    if (predicted > opts.build.budget_per_rule) {
      throw CombinatorialBudgetExceeded("antecedent has " + std::to_string(predicted) +
                                        " decorations");
    }
  }
  out.instances = enumerate_decorations(n.problem.lhs, n);

  Sid& rhat = out.rhat;
  rhat.record_width = ctx.kappa + ctx.nu + ctx.mu;
  {
    FreshNames fresh;
    for (VarId v : ctx.w) fresh.reserve(v);
    VarId x = fresh.fresh_var("x");
    Rule bottom_rule;
    bottom_rule.head = ctx.bottom;
    bottom_rule.params.push_back(x);
    PointsToAtom cell{x, std::vector<Term>(rhat.record_width, Term::nil())};
    bottom_rule.body.push_back(std::move(cell));
    rhat.add_rule(std::move(bottom_rule));
  }
  auto merge = [&](const Sid& part) {
    for (PredId p : part.order) {
      if (p == ctx.bottom) continue;
      rhat.declare(p, part.arity(p));
      for (const Rule& r : part.rules(p)) rhat.add_rule(r);
    }
  };
  merge(left);
  merge(right);

  // measured counts against the generation bounds
  uint64_t left_rule_count = 0;
  uint64_t max_arity = 0;
  for (PredId p : n.problem.sid.order) {
    if (!n.left_preds.count(p)) continue;
    left_rule_count += n.problem.sid.rules(p).size();
    max_arity = std::max<uint64_t>(max_arity, n.problem.sid.arity(p));
  }
  out.bounds.decor_r_measured = out.left_log.sigma_i_pairs;
  out.bounds.decor_r_candidates = out.left_log.candidates;
  out.bounds.decor_r_bound =
      sat_mul(left_rule_count, sat_mul(uint64_t{1} << ctx.mu,
                                       sat_pow(max_arity + ctx.nu + ctx.mu, ctx.nu)));
  out.bounds.decor_phi_measured = out.instances.size();
  uint64_t atom_count = 0;
  uint64_t phi_max_arity = 0;
  for (const SymbolicHeap& sh : n.problem.lhs.disjuncts) {
    for (const Atom& a : sh.atoms) {
      if (const auto* call = std::get_if<PredAtom>(&a)) {
        ++atom_count;
        phi_max_arity = std::max<uint64_t>(phi_max_arity, call->args.size());
      }
    }
  }
  out.bounds.decor_phi_bound = sat_pow(2, sat_mul(phi_max_arity, atom_count));
  return out;
}

}  // namespace slent
