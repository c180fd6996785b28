#include "dataspace/pattern.hpp"

#include <algorithm>

namespace dataspace {

namespace {

void require_pattern(const term& t, const char* what) {
  if (!t.is_pattern())
    throw invalid_term(std::string{what}
                       + " requires a pattern without captures or binders: "
                       + t.to_string());
}

// Both arguments are patterns; the recursion never sees captures.
std::optional<pattern> unify(const pattern& p, const pattern& q) {
  if (p.is_wildcard())
    return q;
  if (q.is_wildcard())
    return p;
  if (p.kind() != q.kind())
    return std::nullopt;
  if (p.is_atom())
    return p == q ? std::optional<pattern>{p} : std::nullopt;
  // Records.
  if (p.label() != q.label() || p.arity() != q.arity())
    return std::nullopt;
  if (p.is_ground() && q.is_ground())
    return p == q ? std::optional<pattern>{p} : std::nullopt;
  std::vector<term> fields;
  fields.reserve(p.arity());
  for (std::size_t i = 0; i < p.arity(); ++i) {
    auto f = unify(p[i], q[i]);
    if (!f)
      return std::nullopt;
    fields.push_back(std::move(*f));
  }
  return term::record(p.label(), std::move(fields));
}

term erase_captures(const term& t, std::size_t& count) {
  switch (t.kind()) {
    case kind::capture:
      ++count;
      return t[0];
    case kind::record: {
      if (!t.has_captures())
        return t;
      std::vector<term> fields;
      fields.reserve(t.arity());
      for (const auto& f : t.fields())
        fields.push_back(erase_captures(f, count));
      return term::record(t.label(), std::move(fields));
    }
    default:
      return t;
  }
}

// Walks the projection alongside the unified result. Returns false when a
// capture position holds a non-ground sub-tree.
bool extract(const term& proj, const pattern& unified, capture_tuple& out) {
  if (proj.is_capture()) {
    if (!unified.is_ground())
      return false;
    out.push_back(unified);
    return true;
  }
  if (!proj.is_record() || !proj.has_captures())
    return true;
  for (std::size_t i = 0; i < proj.arity(); ++i)
    if (!extract(proj[i], unified[i], out))
      return false;
  return true;
}

void collect_binders(const term& t, std::vector<std::string>& names) {
  if (t.is_bind()) {
    if (std::find(names.begin(), names.end(), t.text()) != names.end())
      throw duplicate_binder("binder $" + t.text() + " occurs more than once");
    names.push_back(t.text());
  } else if (t.is_record()) {
    for (const auto& f : t.fields())
      collect_binders(f, names);
  }
}

term replace_binders(const term& t, bool with_capture) {
  if (t.is_bind())
    return with_capture ? term::capture(term::wildcard()) : term::wildcard();
  if (!t.is_record() || !t.has_binders())
    return t;
  std::vector<term> fields;
  fields.reserve(t.arity());
  for (const auto& f : t.fields())
    fields.push_back(replace_binders(f, with_capture));
  return term::record(t.label(), std::move(fields));
}

} // namespace

std::optional<pattern> intersect(const pattern& p, const pattern& q) {
  require_pattern(p, "intersect");
  require_pattern(q, "intersect");
  return unify(p, q);
}

bool matches(const pattern& p, const value& v) {
  if (!v.is_ground())
    throw invalid_term("matches requires a ground value: " + v.to_string());
  auto r = intersect(p, v);
  return r && *r == v;
}

bool overlaps(const pattern& p, const pattern& q) {
  return intersect(p, q).has_value();
}

projection::projection(term t) : term_(std::move(t)) {
  if (term_.has_binders())
    throw invalid_term("projection may not contain binders: "
                       + term_.to_string());
  erased_ = erase_captures(term_, captures_);
}

projection_result project_assertions(const assertion_set& s,
                                     const projection& proj) {
  std::set<capture_tuple> result;
  for (const auto& a : s) {
    auto unified = intersect(proj.erased(), a);
    if (!unified)
      continue;
    capture_tuple tuple;
    tuple.reserve(proj.capture_count());
    if (!extract(proj.get(), *unified, tuple))
      return capture_unbounded{a};
    result.insert(std::move(tuple));
  }
  return result;
}

surface_pattern::surface_pattern(term t) : term_(std::move(t)) {
  if (term_.has_captures())
    throw invalid_term("surface pattern may not contain captures: "
                       + term_.to_string());
}

compiled_pattern compile_surface(const surface_pattern& sp) {
  std::vector<std::string> names;
  collect_binders(sp.get(), names);
  return compiled_pattern{replace_binders(sp.get(), false),
                          projection{replace_binders(sp.get(), true)},
                          std::move(names)};
}

} // namespace dataspace
