#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dataspace {

enum class trace_kind {
  spawn,
  quit,
  crash,
  message,
  patch_out,
  patch_in,
  event_message,
};

std::string_view to_string(trace_kind k) noexcept;

std::optional<trace_kind> parse_trace_kind(std::string_view s) noexcept;

/// One line of a trace. `data` holds the canonical encoding of the entry's
/// payload: the actor name for `spawn`, null for `quit`, the reason for
/// `crash`, the message body for `message`, a patch for `patch-in` and
/// `patch-out`, and the printed value for `event-message`.
struct trace_entry {
  std::uint64_t seq = 0;
  std::string actor;
  trace_kind kind = trace_kind::spawn;
  nlohmann::ordered_json data;

  friend bool operator==(const trace_entry&, const trace_entry&) = default;
};

/// `{"seq":..,"actor":..,"kind":..,"data":..}` on a single line.
std::string to_line(const trace_entry& e);

/// Throws `malformed_text` on a line that is not a trace entry.
trace_entry parse_line(std::string_view line);

/// Append-only trace. Shared between a network and the networks nested in
/// it, so sequence numbers are global to one run.
class trace_log {
public:
  void record(std::string actor, trace_kind kind, nlohmann::ordered_json data);

  const std::vector<trace_entry>& entries() const noexcept {
    return entries_;
  }

  std::size_t size() const noexcept {
    return entries_.size();
  }

  /// Newline-delimited JSON, one entry per line, LF terminated.
  std::string to_ndjson() const;

private:
  std::vector<trace_entry> entries_;
};

/// Parses newline-delimited trace text, skipping blank lines. Checks that
/// sequence numbers start at 0 and increase by one.
std::vector<trace_entry> parse_trace(std::string_view text);

} // namespace dataspace
