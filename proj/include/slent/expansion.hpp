#pragma once

#include <map>
#include <optional>

#include "slent/semantics.hpp"

namespace slent {

/// Total location mapping stored as a finite override of the identity.
/// Bot is always fixed.
struct LocMapping {
  std::map<Loc, Loc> overrides;

  Loc operator()(Loc l) const {
    auto it = overrides.find(l);
    return it == overrides.end() ? l : it->second;
  }
  std::vector<Loc> map_tuple(const std::vector<Loc>& t) const;
  bool is_identity() const { return overrides.empty(); }
};

Store apply_mapping(const LocMapping& gamma, const Store& s);
/// Requires gamma injective on dom(h); throws NonInjectiveOnDomain.
Heap apply_mapping(const LocMapping& gamma, const Heap& h);
Structure apply_mapping(const LocMapping& gamma, const Structure& st);

/// Drops the all-Bot cells and the extra record fields, recovering a
/// kappa-width heap.
Heap truncate(const Heap& hprime, uint32_t kappa);

struct MainAux {
  Heap main;  // cells with a non-Bot tuple
  Heap aux;   // cells holding the all-Bot tuple
};
MainAux split_main_aux(const Heap& hprime);

struct ExpansionContext {
  uint32_t kappa = 0;
  uint32_t nu = 0;
  uint32_t mu = 0;
  std::vector<VarId> w;
};

struct ExpansionWitness {
  Heap main, aux;
  std::map<Loc, Loc> connections;  // aux location -> chosen main cell
};

/// Checks whether (s, hprime) is a gamma-expansion of (s, h): gamma is
/// injective on the main part and maps its domain onto dom(h); every main
/// cell carries (a, s(w), b) with gamma(a) = h(gamma(l)); every aux cell is
/// all-Bot and hangs off the trailing mu fields of some main cell. Ties on
/// the connection choice go to the smallest main location.
std::optional<ExpansionWitness> check_expansion(const Store& s, const Heap& hprime, const Heap& h,
                                                const LocMapping& gamma,
                                                const ExpansionContext& ctx);

}  // namespace slent
