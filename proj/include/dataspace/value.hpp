#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dataspace {

/// Base class for every error thrown by the runtime.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a term violates a structural invariant at construction.
class invalid_term : public error {
public:
  using error::error;
};

/// Node kinds, listed in canonical order.
enum class kind : std::uint8_t {
  wildcard,
  boolean,
  integer,
  string,
  symbol,
  record,
  capture,
  bind,
};

/// Immutable tree shared by values, patterns, projections and surface
/// patterns. The grammar a particular term belongs to is a property of the
/// nodes it contains:
///
/// - ground value: atoms and records only
/// - pattern: ground value grammar plus wildcards
/// - projection: pattern grammar plus captures (never nested)
/// - surface pattern: pattern grammar plus named binders
///
/// Copies share structure. Equality is structural and `<=>` is the total
/// canonical order: wildcard, then atoms (boolean, integer, string, symbol),
/// then records ordered by label, arity and fields.
class term {
public:
  /// The default term is the wildcard.
  term();

  static term wildcard();
  static term boolean(bool b);
  static term integer(std::int64_t i);
  static term string(std::string s);
  static term symbol(std::string s);
  static term record(std::string label, std::vector<term> fields);
  static term capture(term sub);
  static term bind(std::string name);

  dataspace::kind kind() const noexcept;

  bool is_wildcard() const noexcept {
    return kind() == kind::wildcard;
  }
  bool is_atom() const noexcept;
  bool is_record() const noexcept {
    return kind() == kind::record;
  }
  bool is_capture() const noexcept {
    return kind() == kind::capture;
  }
  bool is_bind() const noexcept {
    return kind() == kind::bind;
  }

  /// True when the term contains no wildcard, capture or binder.
  bool is_ground() const noexcept;

  /// True when the term contains no capture or binder.
  bool is_pattern() const noexcept;

  bool has_captures() const noexcept;
  bool has_binders() const noexcept;

  bool as_boolean() const;
  std::int64_t as_integer() const;

  /// Text of a string or symbol atom, the label of a record, or the name of
  /// a binder.
  const std::string& text() const;

  const std::string& label() const;

  /// Record fields; for a capture the single element is the captured
  /// sub-pattern.
  std::span<const term> fields() const noexcept;

  std::size_t arity() const noexcept {
    return fields().size();
  }

  const term& operator[](std::size_t i) const;

  friend bool operator==(const term& x, const term& y) noexcept;
  friend std::strong_ordering operator<=>(const term& x,
                                          const term& y) noexcept;

  /// Human-readable rendering, e.g. `account(70)`, `file("a", _)`.
  std::string to_string() const;

private:
  struct node;
  explicit term(std::shared_ptr<const node> n);
  std::shared_ptr<const node> node_;
};

/// A ground term.
using value = term;

/// A term that may contain wildcards but no captures or binders.
using pattern = term;

/// Finite set of assertions with structural equality, iterated in canonical
/// order.
using assertion_set = std::set<pattern>;

/// Record label reserved for projection captures in the text encoding.
inline constexpr std::string_view capture_label = "?!";

/// Record label used for assertions of interest.
inline constexpr std::string_view observe_label = "observe";

// -- construction shorthands --------------------------------------------------

inline term wild() {
  return term::wildcard();
}

inline term sym(std::string s) {
  return term::symbol(std::move(s));
}

inline term str(std::string s) {
  return term::string(std::move(s));
}

inline term num(std::int64_t i) {
  return term::integer(i);
}

inline term boolean(bool b) {
  return term::boolean(b);
}

inline term rec(std::string label, std::vector<term> fields = {}) {
  return term::record(std::move(label), std::move(fields));
}

inline term cap(term sub = term::wildcard()) {
  return term::capture(std::move(sub));
}

inline term bind(std::string name) {
  return term::bind(std::move(name));
}

/// `observe(p)`: interest in assertions and messages matching `p`.
term observe(term p);

/// Returns true if `t` is a record `observe(x)`.
bool is_observe(const term& t) noexcept;

} // namespace dataspace
