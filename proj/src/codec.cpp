#include "dataspace/codec.hpp"

namespace dataspace {

namespace {

using json = nlohmann::ordered_json;

bool needs_escape(const std::string& s) {
  return s == "_" || s == capture_label
         || (!s.empty() && (s.front() == '\'' || s.front() == '\\'));
}

term decode_string(const std::string& s) {
  if (s == "_")
    return term::wildcard();
  if (!s.empty() && s.front() == '\'')
    return term::symbol(s.substr(1));
  if (!s.empty() && s.front() == '\\')
    return term::string(s.substr(1));
  return term::string(s);
}

} // namespace

json to_json(const term& t) {
  switch (t.kind()) {
    case kind::wildcard:
      return "_";
    case kind::boolean:
      return t.as_boolean();
    case kind::integer:
      return t.as_integer();
    case kind::string:
      return needs_escape(t.text()) ? "\\" + t.text() : t.text();
    case kind::symbol:
      return "'" + t.text();
    case kind::capture:
      return json::array({std::string{capture_label}, to_json(t[0])});
    case kind::record: {
      auto arr = json::array({t.label()});
      for (const auto& f : t.fields())
        arr.push_back(to_json(f));
      return arr;
    }
    case kind::bind:
      break;
  }
  throw malformed_text("binder $" + t.text() + " has no text encoding");
}

term from_json(const json& j) {
  try {
    switch (j.type()) {
      case json::value_t::boolean:
        return term::boolean(j.get<bool>());
      case json::value_t::number_integer:
        return term::integer(j.get<std::int64_t>());
      case json::value_t::number_unsigned: {
        auto u = j.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(INT64_MAX))
          throw malformed_text("integer out of range: " + j.dump());
        return term::integer(static_cast<std::int64_t>(u));
      }
      case json::value_t::string:
        return decode_string(j.get<std::string>());
      case json::value_t::array: {
        if (j.empty() || !j[0].is_string())
          throw malformed_text("record needs a string label: " + j.dump());
        auto label = j[0].get<std::string>();
        if (label == capture_label) {
          if (j.size() != 2)
            throw malformed_text("capture takes one argument: " + j.dump());
          return term::capture(from_json(j[1]));
        }
        std::vector<term> fields;
        fields.reserve(j.size() - 1);
        for (std::size_t i = 1; i < j.size(); ++i)
          fields.push_back(from_json(j[i]));
        return term::record(std::move(label), std::move(fields));
      }
      default:
        throw malformed_text("unsupported JSON value: " + j.dump());
    }
  } catch (const invalid_term& e) {
    throw malformed_text(e.what());
  }
}

std::string canonical_encode(const term& t) {
  return to_json(t).dump();
}

term canonical_decode(std::string_view text) {
  auto j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw malformed_text("not valid JSON: " + std::string{text});
  return from_json(j);
}

} // namespace dataspace
