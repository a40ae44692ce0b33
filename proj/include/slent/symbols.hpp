#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>

namespace slent {

/// Interned variable name. Ordering follows intern order, which makes every
/// container iteration deterministic for a fixed sequence of inputs.
struct VarId {
  uint32_t id = 0;
  auto operator<=>(const VarId&) const = default;
};

/// Interned predicate name.
struct PredId {
  uint32_t id = 0;
  auto operator<=>(const PredId&) const = default;
};

/// Process-wide symbol table. Variables and predicates live in separate
/// namespaces. Thread-safe.
namespace symbols {
VarId var(std::string_view name);
PredId pred(std::string_view name);
const std::string& name(VarId v);
const std::string& name(PredId p);
}  // namespace symbols

/// Deterministic fresh-name source. A requested base name is returned as-is
/// when unused, otherwise the smallest `base#k` suffix (k = 1, 2, ...) that is
/// still free. Every produced or reserved name is added to the used set.
class FreshNames {
 public:
  void reserve(std::string_view name);
  void reserve(VarId v);
  bool used(std::string_view name) const;
  VarId fresh_var(std::string_view base);
  std::string fresh_name(std::string_view base);

 private:
  std::set<std::string, std::less<>> used_;
};

/// Strips a trailing `#k` counter from a name, so regenerated names do not
/// stack suffixes (`z#1` -> base `z`).
std::string_view fresh_base(std::string_view name);

}  // namespace slent

template <>
struct std::hash<slent::VarId> {
  size_t operator()(slent::VarId v) const noexcept { return std::hash<uint32_t>{}(v.id); }
};

template <>
struct std::hash<slent::PredId> {
  size_t operator()(slent::PredId p) const noexcept { return std::hash<uint32_t>{}(p.id); }
};
