#include "slent/expansion.hpp"

#include <algorithm>

namespace slent {

std::vector<Loc> LocMapping::map_tuple(const std::vector<Loc>& t) const {
  std::vector<Loc> out;
  out.reserve(t.size());
  for (Loc l : t) out.push_back((*this)(l));
  return out;
}

Store apply_mapping(const LocMapping& gamma, const Store& s) {
  Store out;
  for (const auto& [v, l] : s.vars) out.bind(v, gamma(l));
  return out;
}

Heap apply_mapping(const LocMapping& gamma, const Heap& h) {
  Heap out;
  out.width = h.width;
  for (const auto& [l, fs] : h.cells) {
    Loc target = gamma(l);
    if (out.cells.count(target)) {
      throw NonInjectiveOnDomain("mapping collapses two allocated locations onto " +
                                 std::to_string(target));
    }
    out.cells.emplace(target, gamma.map_tuple(fs));
  }
  return out;
}

Structure apply_mapping(const LocMapping& gamma, const Structure& st) {
  return Structure{apply_mapping(gamma, st.store), apply_mapping(gamma, st.heap)};
}

namespace {

bool all_bot(const std::vector<Loc>& fields) {
  return std::all_of(fields.begin(), fields.end(), [](Loc l) { return l == kBot; });
}

}  // namespace

Heap truncate(const Heap& hprime, uint32_t kappa) {
  if (hprime.width < kappa && !hprime.cells.empty()) {
    throw WidthMismatch("cannot truncate width " + std::to_string(hprime.width) + " to " +
                        std::to_string(kappa));
  }
  Heap out;
  out.width = kappa;
  for (const auto& [l, fs] : hprime.cells) {
    if (all_bot(fs)) continue;
    out.cells.emplace(l, std::vector<Loc>(fs.begin(), fs.begin() + kappa));
  }
  return out;
}

MainAux split_main_aux(const Heap& hprime) {
  MainAux out;
  out.main.width = out.aux.width = hprime.width;
  for (const auto& [l, fs] : hprime.cells) {
    (all_bot(fs) ? out.aux : out.main).cells.emplace(l, fs);
  }
  return out;
}

std::optional<ExpansionWitness> check_expansion(const Store& s, const Heap& hprime, const Heap& h,
                                                const LocMapping& gamma,
                                                const ExpansionContext& ctx) {
  uint32_t wide = ctx.kappa + ctx.nu + ctx.mu;
  if (!hprime.cells.empty() && hprime.width != wide) {
    throw WidthMismatch("expanded heap width " + std::to_string(hprime.width) + ", expected " +
                        std::to_string(wide));
  }
  if (!h.cells.empty() && h.width != ctx.kappa) {
    throw WidthMismatch("base heap width " + std::to_string(h.width) + ", expected " +
                        std::to_string(ctx.kappa));
  }
  std::vector<Loc> w_locs;
  w_locs.reserve(ctx.w.size());
  for (VarId v : ctx.w) w_locs.push_back(s.loc(v));

  MainAux parts = split_main_aux(hprime);

  // (1) injectivity on the main domain, (2) image = dom(h)
  std::set<Loc> image;
  for (const auto& [l, fs] : parts.main.cells) {
    if (!image.insert(gamma(l)).second) return std::nullopt;
  }
  std::set<Loc> dom_h;
  for (const auto& [l, fs] : h.cells) dom_h.insert(l);
  if (image != dom_h) return std::nullopt;

  // (3) main cells carry (a, s(w), b) with gamma(a) = h(gamma(l))
  for (const auto& [l, fs] : parts.main.cells) {
    for (uint32_t i = 0; i < ctx.nu; ++i) {
      if (fs[ctx.kappa + i] != w_locs[i]) return std::nullopt;
    }
    std::vector<Loc> head(fs.begin(), fs.begin() + ctx.kappa);
    if (gamma.map_tuple(head) != h.cells.at(gamma(l))) return std::nullopt;
  }

  // (4) each aux cell hangs off the trailing mu fields of some main cell
  ExpansionWitness witness{parts.main, parts.aux, {}};
  for (const auto& [l, fs] : parts.aux.cells) {
    bool found = false;
    for (const auto& [ml, mfs] : parts.main.cells) {  // ascending: smallest wins
      for (uint32_t i = 0; i < ctx.mu; ++i) {
        if (mfs[ctx.kappa + ctx.nu + i] == l) {
          witness.connections.emplace(l, ml);
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (!found) return std::nullopt;
  }
  return witness;
}

}  // namespace slent
