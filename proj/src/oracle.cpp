#include "dataspace/oracle.hpp"

#include "dataspace/pattern.hpp"

namespace dataspace::oracle {

assertion_bag aggregate_from_scratch(std::span<const assertion_set> asserted) {
  assertion_bag bag;
  for (const auto& s : asserted)
    for (const auto& a : s)
      ++bag[a];
  return bag;
}

assertion_set visible_from_scratch(std::span<const assertion_set> asserted,
                                   const assertion_set& own) {
  std::vector<pattern> interests;
  for (const auto& a : own)
    if (a.is_record() && a.label() == "observe" && a.arity() == 1)
      interests.push_back(a[0]);
  assertion_set out;
  for (const auto& s : asserted)
    for (const auto& a : s)
      for (const auto& p : interests)
        if (intersect(p, a)) {
          out.insert(a);
          break;
        }
  return out;
}

} // namespace dataspace::oracle
