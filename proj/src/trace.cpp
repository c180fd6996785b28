#include "dataspace/trace.hpp"

#include "dataspace/codec.hpp"

#include <array>
#include <utility>

namespace dataspace {

namespace {

constexpr std::array<std::pair<trace_kind, std::string_view>, 7> kind_names{{
  {trace_kind::spawn, "spawn"},
  {trace_kind::quit, "quit"},
  {trace_kind::crash, "crash"},
  {trace_kind::message, "message"},
  {trace_kind::patch_out, "patch-out"},
  {trace_kind::patch_in, "patch-in"},
  {trace_kind::event_message, "event-message"},
}};

} // namespace

std::string_view to_string(trace_kind k) noexcept {
  for (auto [kind, name] : kind_names)
    if (kind == k)
      return name;
  return "?";
}

std::optional<trace_kind> parse_trace_kind(std::string_view s) noexcept {
  for (auto [kind, name] : kind_names)
    if (name == s)
      return kind;
  return std::nullopt;
}

std::string to_line(const trace_entry& e) {
  nlohmann::ordered_json j;
  j["seq"] = e.seq;
  j["actor"] = e.actor;
  j["kind"] = std::string{to_string(e.kind)};
  j["data"] = e.data;
  return j.dump();
}

trace_entry parse_line(std::string_view line) {
  auto j = nlohmann::ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw malformed_text("trace line is not a JSON object: "
                         + std::string{line});
  if (!j.contains("seq") || !j["seq"].is_number_unsigned()
      || !j.contains("actor") || !j["actor"].is_string()
      || !j.contains("kind") || !j["kind"].is_string() || !j.contains("data"))
    throw malformed_text("trace line lacks seq/actor/kind/data: "
                         + std::string{line});
  auto kind = parse_trace_kind(j["kind"].get<std::string>());
  if (!kind)
    throw malformed_text("unknown trace kind: " + j["kind"].dump());
  return trace_entry{j["seq"].get<std::uint64_t>(),
                     j["actor"].get<std::string>(), *kind, j["data"]};
}

void trace_log::record(std::string actor, trace_kind kind,
                       nlohmann::ordered_json data) {
  entries_.push_back(
    trace_entry{entries_.size(), std::move(actor), kind, std::move(data)});
}

std::string trace_log::to_ndjson() const {
  std::string out;
  for (const auto& e : entries_) {
    out += to_line(e);
    out += '\n';
  }
  return out;
}

std::vector<trace_entry> parse_trace(std::string_view text) {
  std::vector<trace_entry> out;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos)
      continue;
    auto e = parse_line(line);
    if (e.seq != out.size())
      throw malformed_text("trace sequence number " + std::to_string(e.seq)
                           + " out of order, expected "
                           + std::to_string(out.size()));
    out.push_back(std::move(e));
  }
  return out;
}

} // namespace dataspace
