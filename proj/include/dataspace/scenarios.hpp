#pragma once

#include "dataspace/network.hpp"
#include "dataspace/trace.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dataspace::scenarios {

/// A deterministic reproduction of one worked example.
struct scenario {
  std::string name;
  std::string summary;
  std::function<void(network&)> build;
  std::size_t max_steps = 500;

  /// File name of the committed golden trace.
  std::string golden() const {
    return name + ".ndjson";
  }
};

/// Every scenario, in listing order.
const std::vector<scenario>& all();

/// Looks a scenario up by name; null if unknown.
const scenario* find(std::string_view name);

struct run_result {
  std::string trace;
  std::size_t steps = 0;
  assertion_set final_aggregate;
};

/// Builds the scenario in a fresh network and runs it to quiescence.
/// Propagates `non_quiescent` and, in verifying mode, `visibility_divergence`.
run_result run(const scenario& s, network_options opts = {},
               std::optional<std::size_t> max_steps = std::nullopt);

/// Replays `patch-out` entries and returns the sequence of distinct aggregate
/// snapshots restricted to assertions overlapping `lens`. Starts with the
/// empty snapshot.
std::vector<assertion_set> snapshots(const std::vector<trace_entry>& trace,
                                     const pattern& lens);

/// True iff both traces yield the same snapshot sequence under `lens`.
bool traces_equivalent(const std::vector<trace_entry>& a,
                       const std::vector<trace_entry>& b, const pattern& lens);

/// Values printed by `actor` (its `event-message` entries), in order.
std::vector<value> printed_by(const std::vector<trace_entry>& trace,
                              std::string_view actor);

/// Bodies of every sent message, in order.
std::vector<value> sent_messages(const std::vector<trace_entry>& trace);

// Actor builders, exposed for tests.

/// `deposit` amounts sent by the updater in the bank-account scenarios.
inline constexpr std::int64_t first_deposit = 100;
inline constexpr std::int64_t second_deposit = -30;

/// Content written by the file-system scenarios' writer.
inline constexpr std::string_view novel_text = "It was a dark and stormy night";

void build_bank_account_plain(network& net);
void build_bank_account_reactive(network& net);
void build_counter(network& net, bool interrupt);
void build_file_system_plain(network& net);
void build_file_system_reactive(network& net);

} // namespace dataspace::scenarios
