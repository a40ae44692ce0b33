#include "support/canonical.hpp"

#include <algorithm>
#include <set>
#include <vector>

namespace slent::testing {

namespace {

// Canonical stores: each variable takes an already-used location or the next
// fresh one.
bool enum_stores(const std::vector<VarId>& vars, size_t idx, Loc used_max, Store& store,
                 const std::function<bool(const Store&, Loc)>& k) {
  if (idx == vars.size()) return k(store, used_max);
  for (Loc cand = 1; cand <= used_max + 1; ++cand) {
    store.bind(vars[idx], cand);
    if (!enum_stores(vars, idx + 1, std::max(used_max, cand), store, k)) return false;
  }
  store.vars.erase(vars[idx]);
  return true;
}

// Root sets: a subset of the already-introduced locations plus a run of
// fresh ones.
bool enum_roots(const std::vector<Loc>& existing, uint32_t count, Loc used_max,
                const std::function<bool(const std::vector<Loc>&, Loc)>& k) {
  size_t n = existing.size();
  for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
    std::vector<Loc> roots;
    for (size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) roots.push_back(existing[i]);
    }
    if (roots.size() > count) continue;
    uint32_t fresh = count - static_cast<uint32_t>(roots.size());
    Loc top = used_max;
    for (uint32_t i = 0; i < fresh; ++i) roots.push_back(++top);
    std::sort(roots.begin(), roots.end());
    if (!k(roots, top)) return false;
  }
  return true;
}

// Free field slots: Bot (where allowed), anything already introduced, or the
// next fresh location.
bool enum_slots(std::vector<Loc>& slots, const std::vector<bool>& allow_bot, size_t idx,
                Loc used_max, const std::function<bool(const std::vector<Loc>&, Loc)>& k) {
  if (idx == slots.size()) return k(slots, used_max);
  for (Loc cand = allow_bot[idx] ? 0 : 1; cand <= used_max + 1; ++cand) {
    slots[idx] = cand;
    if (!enum_slots(slots, allow_bot, idx + 1, std::max(used_max, cand), k)) return false;
  }
  return true;
}

}  // namespace

bool for_each_id_expansion(const ExpansionContext& ctx, uint32_t max_cells,
                           const std::function<bool(const Structure&)>& visit) {
  const uint32_t width = ctx.kappa + ctx.nu + ctx.mu;
  Store store;
  return enum_stores(ctx.w, 0, 0, store, [&](const Store& s, Loc store_max) {
    std::vector<Loc> w_locs;
    for (VarId v : ctx.w) w_locs.push_back(s.loc(v));
    std::vector<Loc> existing = s.image();
    for (uint32_t main_count = 0; main_count <= max_cells; ++main_count) {
      bool go = enum_roots(existing, main_count, store_max, [&](const std::vector<Loc>& roots,
                                                                Loc root_max) {
        std::set<Loc> root_set(roots.begin(), roots.end());
        const uint32_t free_per_cell = ctx.kappa + ctx.mu;
        std::vector<Loc> slots(size_t{main_count} * free_per_cell, 0);
        // aux-pointer slots never hold Bot: the decorated rules fill them
        // with variables, and no store maps a variable to Bot
        std::vector<bool> allow_bot(slots.size(), false);
        for (uint32_t c = 0; c < main_count; ++c) {
          for (uint32_t i = 0; i < ctx.kappa; ++i) {
            allow_bot[size_t{c} * free_per_cell + i] = true;
          }
        }
        return enum_slots(slots, allow_bot, 0, root_max, [&](const std::vector<Loc>& vals, Loc) {
          Structure st;
          st.store = s;
          st.heap.width = width;
          std::set<Loc> b_values;
          for (uint32_t c = 0; c < main_count; ++c) {
            std::vector<Loc> fields;
            const Loc* cell = vals.data() + size_t{c} * free_per_cell;
            for (uint32_t i = 0; i < ctx.kappa; ++i) fields.push_back(cell[i]);
            for (Loc wl : w_locs) fields.push_back(wl);
            for (uint32_t i = 0; i < ctx.mu; ++i) {
              fields.push_back(cell[ctx.kappa + i]);
              if (cell[ctx.kappa + i] != kBot) b_values.insert(cell[ctx.kappa + i]);
            }
            st.heap.put(roots[c], std::move(fields));
          }
          // aux cells hang off the b-fields and are not already allocated
          std::vector<Loc> aux_pool;
          for (Loc l : b_values) {
            if (!root_set.count(l)) aux_pool.push_back(l);
          }
          uint32_t aux_budget = max_cells - main_count;
          size_t pool = aux_pool.size();
          for (uint64_t amask = 0; amask < (uint64_t{1} << pool); ++amask) {
            if (static_cast<uint32_t>(__builtin_popcountll(amask)) > aux_budget) continue;
            Structure with_aux = st;
            for (size_t i = 0; i < pool; ++i) {
              if (amask >> i & 1) {
                with_aux.heap.put(aux_pool[i], std::vector<Loc>(width, kBot));
              }
            }
            if (!visit(with_aux)) return false;
          }
          return true;
        });
      });
      if (!go) return false;
    }
    return true;
  });
}

bool for_each_canonical_structure(const std::vector<VarId>& vars, uint32_t width,
                                  uint32_t max_cells,
                                  const std::function<bool(const Structure&)>& visit) {
  Store store;
  return enum_stores(vars, 0, 0, store, [&](const Store& s, Loc store_max) {
    std::vector<Loc> existing = s.image();
    for (uint32_t cells = 0; cells <= max_cells; ++cells) {
      bool go = enum_roots(existing, cells, store_max,
                           [&](const std::vector<Loc>& roots, Loc root_max) {
        std::vector<Loc> slots(size_t{cells} * width, 0);
        std::vector<bool> allow_bot(slots.size(), true);
        return enum_slots(slots, allow_bot, 0, root_max, [&](const std::vector<Loc>& vals, Loc) {
          Structure st;
          st.store = s;
          st.heap.width = width;
          for (uint32_t c = 0; c < cells; ++c) {
            std::vector<Loc> fields(vals.begin() + size_t{c} * width,
                                    vals.begin() + size_t{c + 1} * width);
            st.heap.put(roots[c], std::move(fields));
          }
          return visit(st);
        });
      });
      if (!go) return false;
    }
    return true;
  });
}

}  // namespace slent::testing
