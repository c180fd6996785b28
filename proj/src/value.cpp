#include "dataspace/value.hpp"

#include <algorithm>
#include <variant>

namespace dataspace {

struct term::node {
  dataspace::kind kind = kind::wildcard;
  std::variant<std::monostate, bool, std::int64_t, std::string> payload;
  std::vector<term> fields;
  bool ground = false;
  bool captures = false;
  bool binders = false;
};

term::term() : term(wildcard()) {
  // nop
}

term::term(std::shared_ptr<const node> n) : node_(std::move(n)) {
  // nop
}

term term::wildcard() {
  static const auto instance = std::make_shared<const node>();
  return term{instance};
}

term term::boolean(bool b) {
  auto n = std::make_shared<node>();
  n->kind = kind::boolean;
  n->payload = b;
  n->ground = true;
  return term{std::move(n)};
}

term term::integer(std::int64_t i) {
  auto n = std::make_shared<node>();
  n->kind = kind::integer;
  n->payload = i;
  n->ground = true;
  return term{std::move(n)};
}

term term::string(std::string s) {
  auto n = std::make_shared<node>();
  n->kind = kind::string;
  n->payload = std::move(s);
  n->ground = true;
  return term{std::move(n)};
}

term term::symbol(std::string s) {
  if (s.empty())
    throw invalid_term("symbol must not be empty");
  auto n = std::make_shared<node>();
  n->kind = kind::symbol;
  n->payload = std::move(s);
  n->ground = true;
  return term{std::move(n)};
}

term term::record(std::string label, std::vector<term> fields) {
  if (label.empty())
    throw invalid_term("record label must not be empty");
  if (label == capture_label)
    throw invalid_term("record label '?!' is reserved for captures");
  auto n = std::make_shared<node>();
  n->kind = kind::record;
  n->payload = std::move(label);
  n->ground = true;
  for (const auto& f : fields) {
    n->ground = n->ground && f.is_ground();
    n->captures = n->captures || f.has_captures();
    n->binders = n->binders || f.has_binders();
  }
  if (n->captures && n->binders)
    throw invalid_term("a term may not mix captures and binders");
  n->fields = std::move(fields);
  return term{std::move(n)};
}

term term::capture(term sub) {
  if (!sub.is_pattern())
    throw invalid_term("capture sub-pattern may not contain captures or "
                       "binders");
  auto n = std::make_shared<node>();
  n->kind = kind::capture;
  n->captures = true;
  n->fields.push_back(std::move(sub));
  return term{std::move(n)};
}

term term::bind(std::string name) {
  if (name.empty())
    throw invalid_term("binder name must not be empty");
  auto n = std::make_shared<node>();
  n->kind = kind::bind;
  n->payload = std::move(name);
  n->binders = true;
  return term{std::move(n)};
}

kind term::kind() const noexcept {
  return node_->kind;
}

bool term::is_atom() const noexcept {
  switch (kind()) {
    case kind::boolean:
    case kind::integer:
    case kind::string:
    case kind::symbol:
      return true;
    default:
      return false;
  }
}

bool term::is_ground() const noexcept {
  return node_->ground;
}

bool term::is_pattern() const noexcept {
  return !node_->captures && !node_->binders;
}

bool term::has_captures() const noexcept {
  return node_->captures;
}

bool term::has_binders() const noexcept {
  return node_->binders;
}

bool term::as_boolean() const {
  if (kind() != kind::boolean)
    throw invalid_term("not a boolean: " + to_string());
  return std::get<bool>(node_->payload);
}

std::int64_t term::as_integer() const {
  if (kind() != kind::integer)
    throw invalid_term("not an integer: " + to_string());
  return std::get<std::int64_t>(node_->payload);
}

const std::string& term::text() const {
  if (auto* s = std::get_if<std::string>(&node_->payload))
    return *s;
  throw invalid_term("term carries no text: " + to_string());
}

const std::string& term::label() const {
  if (kind() != kind::record)
    throw invalid_term("not a record: " + to_string());
  return text();
}

std::span<const term> term::fields() const noexcept {
  return node_->fields;
}

const term& term::operator[](std::size_t i) const {
  if (i >= node_->fields.size())
    throw invalid_term("field index out of range in " + to_string());
  return node_->fields[i];
}

bool operator==(const term& x, const term& y) noexcept {
  return (x <=> y) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const term& x, const term& y) noexcept {
  if (x.node_ == y.node_)
    return std::strong_ordering::equal;
  if (auto c = x.kind() <=> y.kind(); c != 0)
    return c;
  const auto& xp = x.node_->payload;
  const auto& yp = y.node_->payload;
  switch (x.kind()) {
    case kind::wildcard:
      return std::strong_ordering::equal;
    case kind::boolean:
      return std::get<bool>(xp) <=> std::get<bool>(yp);
    case kind::integer:
      return std::get<std::int64_t>(xp) <=> std::get<std::int64_t>(yp);
    case kind::string:
    case kind::symbol:
    case kind::bind:
      return std::get<std::string>(xp).compare(std::get<std::string>(yp))
             <=> 0;
    case kind::record:
      if (auto c = std::get<std::string>(xp).compare(std::get<std::string>(yp))
                   <=> 0;
          c != 0)
        return c;
      if (auto c = x.arity() <=> y.arity(); c != 0)
        return c;
      [[fallthrough]];
    case kind::capture:
      return std::lexicographical_compare_three_way(
        x.node_->fields.begin(), x.node_->fields.end(),
        y.node_->fields.begin(), y.node_->fields.end());
  }
  return std::strong_ordering::equal;
}

namespace {

void render(const term& t, std::string& out) {
  switch (t.kind()) {
    case kind::wildcard:
      out += '_';
      break;
    case kind::boolean:
      out += t.as_boolean() ? "#t" : "#f";
      break;
    case kind::integer:
      out += std::to_string(t.as_integer());
      break;
    case kind::string:
      out += '"';
      for (char c : t.text()) {
        if (c == '"' || c == '\\')
          out += '\\';
        out += c;
      }
      out += '"';
      break;
    case kind::symbol:
      out += '\'';
      out += t.text();
      break;
    case kind::bind:
      out += '$';
      out += t.text();
      break;
    case kind::capture:
      out += "?!(";
      render(t[0], out);
      out += ')';
      break;
    case kind::record: {
      out += t.label();
      out += '(';
      bool first = true;
      for (const auto& f : t.fields()) {
        if (!first)
          out += ", ";
        first = false;
        render(f, out);
      }
      out += ')';
      break;
    }
  }
}

} // namespace

std::string term::to_string() const {
  std::string out;
  render(*this, out);
  return out;
}

term observe(term p) {
  return term::record(std::string{observe_label}, {std::move(p)});
}

bool is_observe(const term& t) noexcept {
  return t.is_record() && t.arity() == 1 && t.text() == observe_label;
}

} // namespace dataspace
