#include "dataspace/patch.hpp"

#include "dataspace/codec.hpp"
#include "dataspace/pattern.hpp"

#include <algorithm>
#include <iterator>

namespace dataspace {

assertion_set set_union(const assertion_set& x, const assertion_set& y) {
  assertion_set out;
  std::set_union(x.begin(), x.end(), y.begin(), y.end(),
                 std::inserter(out, out.end()));
  return out;
}

assertion_set set_difference(const assertion_set& x, const assertion_set& y) {
  assertion_set out;
  std::set_difference(x.begin(), x.end(), y.begin(), y.end(),
                      std::inserter(out, out.end()));
  return out;
}

assertion_set set_intersection(const assertion_set& x,
                               const assertion_set& y) {
  assertion_set out;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(),
                        std::inserter(out, out.end()));
  return out;
}

void check_disjoint(const patch& p) {
  auto both = set_intersection(p.added, p.removed);
  if (!both.empty())
    throw invalid_term("patch adds and removes " + both.begin()->to_string());
}

assertion_set apply_patch(const assertion_set& s, const patch& p) {
  return set_union(set_difference(s, p.removed), p.added);
}

patch seq_patches(const patch& first, const patch& second) {
  return patch{
    set_union(set_difference(first.added, second.removed), second.added),
    set_union(set_difference(first.removed, second.added), second.removed),
  };
}

patch clamp_patch(const patch& p, const assertion_set& current) {
  return patch{set_difference(p.added, current),
               set_intersection(p.removed, current)};
}

assertion_set interests_of(const assertion_set& s) {
  assertion_set out;
  for (const auto& a : s)
    if (is_observe(a))
      out.insert(a[0]);
  return out;
}

assertion_set visible(const assertion_set& aggregate,
                      const assertion_set& interests) {
  assertion_set out;
  if (interests.empty())
    return out;
  for (const auto& a : aggregate)
    if (std::any_of(interests.begin(), interests.end(),
                    [&](const pattern& p) { return overlaps(p, a); }))
      out.insert(out.end(), a);
  return out;
}

patch delta(const assertion_set& before, const assertion_set& after) {
  return patch{set_difference(after, before), set_difference(before, after)};
}

assertion_set support(const assertion_bag& bag) {
  assertion_set out;
  for (const auto& [a, n] : bag)
    if (n > 0)
      out.insert(out.end(), a);
  return out;
}

nlohmann::ordered_json to_json(const patch& p) {
  auto added = nlohmann::ordered_json::array();
  for (const auto& a : p.added)
    added.push_back(to_json(a));
  auto removed = nlohmann::ordered_json::array();
  for (const auto& a : p.removed)
    removed.push_back(to_json(a));
  nlohmann::ordered_json j;
  j["added"] = std::move(added);
  j["removed"] = std::move(removed);
  return j;
}

patch patch_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object() || !j.contains("added") || !j.contains("removed")
      || !j["added"].is_array() || !j["removed"].is_array())
    throw malformed_text("not a patch: " + j.dump());
  patch p;
  for (const auto& a : j["added"])
    p.added.insert(from_json(a));
  for (const auto& a : j["removed"])
    p.removed.insert(from_json(a));
  return p;
}

} // namespace dataspace
