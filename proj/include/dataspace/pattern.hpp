#pragma once

#include "dataspace/value.hpp"

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace dataspace {

/// Raised by `compile_surface` when a binder name repeats.
class duplicate_binder : public error {
public:
  using error::error;
};

/// Unifies two patterns. Returns the most specific pattern matching exactly
/// the ground values matched by both, or `std::nullopt` when no ground value
/// matches both. Labels never unify with wildcards.
std::optional<pattern> intersect(const pattern& p, const pattern& q);

/// True iff ground value `v` is matched by `p`.
bool matches(const pattern& p, const value& v);

/// True iff some ground value is matched by both patterns.
bool overlaps(const pattern& p, const pattern& q);

/// A pattern with capture nodes marking the sub-trees to extract.
class projection {
public:
  /// Throws `invalid_term` if `t` contains binders or nested captures.
  explicit projection(term t);

  const term& get() const noexcept {
    return term_;
  }

  /// The projection with every `capture(sub)` replaced by `sub`.
  const pattern& erased() const noexcept {
    return erased_;
  }

  std::size_t capture_count() const noexcept {
    return captures_;
  }

private:
  term term_;
  pattern erased_;
  std::size_t captures_ = 0;
};

/// One extracted value per capture position, left to right.
using capture_tuple = std::vector<pattern>;

/// Result marker: some matching assertion had a wildcard inside a capture
/// position, so the set of capture tuples would be infinite.
struct capture_unbounded {
  pattern assertion;
};

using projection_result = std::variant<std::set<capture_tuple>,
                                       capture_unbounded>;

/// Extracts capture tuples from every element of `s` that overlaps the
/// projection.
projection_result project_assertions(const assertion_set& s,
                                     const projection& proj);

/// A pattern written with `$name` binders and `_` wildcards.
class surface_pattern {
public:
  /// Throws `invalid_term` if `t` contains captures.
  explicit surface_pattern(term t);

  const term& get() const noexcept {
    return term_;
  }

private:
  term term_;
};

struct compiled_pattern {
  /// Binders erased to wildcards.
  pattern subscription;
  /// Binders replaced by `capture(_)`.
  dataspace::projection extraction;
  /// Binder names, left to right.
  std::vector<std::string> names;
};

/// Splits a surface pattern into its subscription and extraction parts.
/// Throws `duplicate_binder` if a binder name occurs twice.
compiled_pattern compile_surface(const surface_pattern& sp);

} // namespace dataspace
