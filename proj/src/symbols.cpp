#include "slent/symbols.hpp"

#include <cctype>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace slent {
namespace {

class Table {
 public:
  uint32_t intern(std::string_view name) {
    std::lock_guard lock(mutex_);
    auto it = index_.find(std::string(name));
    if (it != index_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
  }

  const std::string& name(uint32_t id) const {
    std::lock_guard lock(mutex_);
    return names_.at(id);
  }

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, uint32_t> index_;
};

Table& var_table() {
  static Table t;
  return t;
}

Table& pred_table() {
  static Table t;
  return t;
}

}  // namespace

namespace symbols {

VarId var(std::string_view name) { return VarId{var_table().intern(name)}; }
PredId pred(std::string_view name) { return PredId{pred_table().intern(name)}; }
const std::string& name(VarId v) { return var_table().name(v.id); }
const std::string& name(PredId p) { return pred_table().name(p.id); }

}  // namespace symbols

void FreshNames::reserve(std::string_view name) { used_.emplace(name); }

void FreshNames::reserve(VarId v) { reserve(symbols::name(v)); }

bool FreshNames::used(std::string_view name) const { return used_.find(name) != used_.end(); }

std::string FreshNames::fresh_name(std::string_view base) {
  std::string stem(fresh_base(base));
  if (!used(stem)) {
    used_.insert(stem);
    return stem;
  }
  for (uint32_t k = 1;; ++k) {
    std::string candidate = stem + "#" + std::to_string(k);
    if (!used(candidate)) {
      used_.insert(candidate);
      return candidate;
    }
  }
}

VarId FreshNames::fresh_var(std::string_view base) { return symbols::var(fresh_name(base)); }

std::string_view fresh_base(std::string_view name) {
  auto pos = name.rfind('#');
  if (pos == std::string_view::npos || pos == 0 || pos + 1 == name.size()) return name;
  for (size_t i = pos + 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return name;
  }
  return name.substr(0, pos);
}

}  // namespace slent
