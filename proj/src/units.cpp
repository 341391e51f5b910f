#include "susyqm/units.hpp"

#include "susyqm/errors.hpp"

namespace susyqm {

namespace {

enum class Unit { hartree, cm1 };

Unit parse_unit(const std::string& name) {
  if (name == "hartree") return Unit::hartree;
  if (name == "cm-1") return Unit::cm1;
  throw UnsupportedUnit("unknown unit '" + name + "' (supported: hartree, cm-1)");
}

}  // namespace

double unit_convert(double value, const std::string& from, const std::string& to) {
  const Unit uf = parse_unit(from);
  const Unit ut = parse_unit(to);
  if (uf == ut) return value;
  if (uf == Unit::hartree && ut == Unit::cm1) return value * HARTREE_CM1;
  return value / HARTREE_CM1;
}

}  // namespace susyqm
