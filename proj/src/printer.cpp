#include "slent/printer.hpp"

#include <sstream>

namespace slent {

std::string print(const Term& t) { return t.is_nil() ? "nil" : symbols::name(t.as_var()); }

std::string print(const Atom& atom) {
  std::ostringstream os;
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, EqAtom>) {
          os << symbols::name(a.lhs) << " = " << symbols::name(a.rhs);
        } else if constexpr (std::is_same_v<T, DiseqAtom>) {
          os << symbols::name(a.lhs) << " != " << symbols::name(a.rhs);
        } else if constexpr (std::is_same_v<T, PointsToAtom>) {
          os << symbols::name(a.src) << " -> (";
          for (size_t i = 0; i < a.fields.size(); ++i) {
            if (i) os << ",";
            os << print(a.fields[i]);
          }
          os << ")";
        } else {
          os << symbols::name(a.pred) << "(";
          for (size_t i = 0; i < a.args.size(); ++i) {
            if (i) os << ",";
            os << symbols::name(a.args[i]);
          }
          os << ")";
        }
      },
      atom);
  return os.str();
}

std::string print(const SymbolicHeap& sh) {
  std::ostringstream os;
  if (!sh.bound.empty()) {
    os << "exists";
    for (VarId v : sh.bound) os << " " << symbols::name(v);
    os << " . ";
  }
  for (size_t i = 0; i < sh.atoms.size(); ++i) {
    if (i) os << " * ";
    os << print(sh.atoms[i]);
  }
  return os.str();
}

std::string print(const Formula& f) {
  std::ostringstream os;
  for (size_t i = 0; i < f.disjuncts.size(); ++i) {
    if (i) os << " \\/ ";
    os << print(f.disjuncts[i]);
  }
  return os.str();
}

std::string print(const Rule& r) {
  std::ostringstream os;
  os << symbols::name(r.head) << "(";
  for (size_t i = 0; i < r.params.size(); ++i) {
    if (i) os << ",";
    os << symbols::name(r.params[i]);
  }
  os << ") <= ";
  for (size_t i = 0; i < r.body.size(); ++i) {
    if (i) os << " * ";
    os << print(r.body[i]);
  }
  return os.str();
}

std::string print_rules(const Sid& sid) {
  std::ostringstream os;
  for (PredId p : sid.order) {
    for (const Rule& r : sid.rules(p)) os << print(r) << ";\n";
  }
  return os.str();
}

std::string print(const EntailmentProblem& p) {
  std::ostringstream os;
  os << "fields " << p.sid.record_width << ";\n";
  os << print_rules(p.sid);
  os << "entail " << print(p.lhs) << " |- " << print(p.rhs) << "\n";
  return os.str();
}

}  // namespace slent
