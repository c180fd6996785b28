#pragma once

#include "dataspace/value.hpp"

#include <json.hpp>

#include <map>

namespace dataspace {

/// A state change notification: assertions to add and to remove. The two
/// sets are disjoint.
struct patch {
  assertion_set added;
  assertion_set removed;

  bool empty() const noexcept {
    return added.empty() && removed.empty();
  }

  friend bool operator==(const patch&, const patch&) = default;
};

/// Throws `invalid_term` if the sets of `p` overlap.
void check_disjoint(const patch& p);

/// `(s \ p.removed) ∪ p.added`
assertion_set apply_patch(const assertion_set& s, const patch& p);

/// The patch equivalent to applying `first` and then `second`.
patch seq_patches(const patch& first, const patch& second);

/// Drops additions already in `current` and removals not in `current`.
patch clamp_patch(const patch& p, const assertion_set& current);

/// `{ p | observe(p) ∈ s }`
assertion_set interests_of(const assertion_set& s);

/// Elements of `aggregate` overlapping at least one interest. Assertions are
/// returned whole, not narrowed to the interest.
assertion_set visible(const assertion_set& aggregate,
                      const assertion_set& interests);

/// The clamped patch turning `before` into `after`.
patch delta(const assertion_set& before, const assertion_set& after);

// -- set helpers ---------------------------------------------------------------

assertion_set set_union(const assertion_set& x, const assertion_set& y);
assertion_set set_difference(const assertion_set& x, const assertion_set& y);
assertion_set set_intersection(const assertion_set& x, const assertion_set& y);

/// Multiset of assertions with positive counts.
using assertion_bag = std::map<pattern, std::size_t>;

/// Support of the bag.
assertion_set support(const assertion_bag& bag);

/// `{"added":[...],"removed":[...]}` with canonically ordered elements.
nlohmann::ordered_json to_json(const patch& p);

patch patch_from_json(const nlohmann::ordered_json& j);

} // namespace dataspace
