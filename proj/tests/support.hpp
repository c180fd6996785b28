#pragma once

// Test-only oracles and generators. Nothing here calls intersect, visible or
// the patch algebra; the oracles are written directly against the term
// structure so they can check those functions.

#include "dataspace/value.hpp"

#include <random>
#include <vector>

namespace dataspace::test {

/// Structural match of a pattern against a ground value.
inline bool oracle_match(const term& p, const term& v) {
  if (p.is_wildcard())
    return true;
  if (p.kind() != v.kind())
    return false;
  if (p.is_atom())
    return p == v;
  if (p.label() != v.label() || p.arity() != v.arity())
    return false;
  for (std::size_t i = 0; i < p.arity(); ++i)
    if (!oracle_match(p[i], v[i]))
      return false;
  return true;
}

/// Atoms used by the finite universes below.
inline std::vector<term> small_atoms() {
  return {num(1), num(2), sym("a"), str("s")};
}

/// Every ground value of depth <= 3 over the atoms above and the record
/// shapes f/1 and g/2.
inline std::vector<term> ground_universe() {
  auto level1 = small_atoms();
  std::vector<term> level2 = level1;
  for (const auto& x : level1)
    level2.push_back(rec("f", {x}));
  for (const auto& x : level1)
    for (const auto& y : level1)
      level2.push_back(rec("g", {x, y}));
  std::vector<term> level3 = level2;
  for (const auto& x : level2)
    level3.push_back(rec("f", {x}));
  for (const auto& x : level2)
    for (const auto& y : level2)
      level3.push_back(rec("g", {x, y}));
  return level3;
}

/// Random pattern of depth <= `depth` over the universe grammar.
inline term random_pattern(std::mt19937_64& rng, int depth,
                           double wildcard_weight = 0.3) {
  std::uniform_real_distribution<double> coin{0.0, 1.0};
  if (coin(rng) < wildcard_weight)
    return wild();
  auto atoms = small_atoms();
  if (depth <= 1 || coin(rng) < 0.4)
    return atoms[std::uniform_int_distribution<std::size_t>{
      0, atoms.size() - 1}(rng)];
  if (coin(rng) < 0.5)
    return rec("f", {random_pattern(rng, depth - 1, wildcard_weight)});
  return rec("g", {random_pattern(rng, depth - 1, wildcard_weight),
                   random_pattern(rng, depth - 1, wildcard_weight)});
}

inline term random_ground(std::mt19937_64& rng, int depth) {
  return random_pattern(rng, depth, 0.0);
}

/// Subset of `universe` with each element included with probability 1/2.
inline std::set<term> random_subset(std::mt19937_64& rng,
                                    const std::vector<term>& universe) {
  std::set<term> out;
  std::bernoulli_distribution pick{0.5};
  for (const auto& u : universe)
    if (pick(rng))
      out.insert(u);
  return out;
}

} // namespace dataspace::test
