#pragma once

#include "dataspace/patch.hpp"
#include "dataspace/trace.hpp"
#include "dataspace/value.hpp"

#include <any>
#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace dataspace {

/// Position of an actor in the network hierarchy. The ground network itself
/// has the empty path, rendered as `g`; its first child is `g/0`.
class actor_id {
public:
  actor_id() = default;

  explicit actor_id(std::vector<std::uint32_t> path) : path_(std::move(path)) {
    // nop
  }

  const std::vector<std::uint32_t>& path() const noexcept {
    return path_;
  }

  actor_id child(std::uint32_t index) const;

  /// Index within the containing network. Throws on the ground id.
  std::uint32_t index() const;

  std::string to_string() const;

  friend auto operator<=>(const actor_id&, const actor_id&) = default;

private:
  std::vector<std::uint32_t> path_;
};

// -- events --------------------------------------------------------------------

struct patch_event {
  dataspace::patch patch;

  friend bool operator==(const patch_event&, const patch_event&) = default;
};

struct message_event {
  value body;

  friend bool operator==(const message_event&, const message_event&) = default;
};

using event = std::variant<patch_event, message_event>;

// -- actions -------------------------------------------------------------------

struct action;
struct behaviour;

struct patch_action {
  dataspace::patch patch;
};

/// Routed to every actor with a matching interest. The body must be ground.
struct message_action {
  value body;
};

struct spawn_action {
  std::shared_ptr<const behaviour> beh;
  std::any state;
  std::vector<action> startup;
  std::string name;
};

struct quit_action {};

/// Records `output` in the trace as console output of the acting actor.
struct print_action {
  value output;
};

struct action : std::variant<patch_action, message_action, spawn_action,
                             quit_action, print_action> {
  using variant::variant;
};

// -- behaviours ----------------------------------------------------------------

struct continue_with {
  std::any state;
  std::vector<action> actions;
};

struct unchanged {};

struct failure {
  std::string reason;
};

using step_result = std::variant<continue_with, unchanged, failure>;

/// Leaf actor behaviour. `step` maps an event and the private state to a
/// result. `boot`, when set, runs once at spawn after the startup actions
/// and learns the actor's own id.
struct behaviour {
  std::function<step_result(const event&, const std::any&)> step;
  std::function<step_result(const actor_id&, const std::any&)> boot;
};

// -- termination ---------------------------------------------------------------

struct termination {
  bool crashed = false;
  std::string detail;

  static termination clean() {
    return {};
  }

  static termination crash(std::string detail) {
    return {true, std::move(detail)};
  }
};

/// Thrown by `run_until_quiescent` when the step budget runs out.
class non_quiescent : public error {
public:
  explicit non_quiescent(std::size_t max_steps);

  std::size_t max_steps() const noexcept {
    return max_steps_;
  }

private:
  std::size_t max_steps_;
};

/// Thrown in verifying mode when incremental bookkeeping disagrees with a
/// from-scratch recomputation.
class visibility_divergence : public error {
public:
  using error::error;
};

enum class dispatch_status { dispatched, quiescent };

struct network_options {
  /// Recompute aggregate counts and visibility from scratch after every
  /// dispatch and throw `visibility_divergence` on any difference.
  bool verify = false;
  /// When set, each dispatch picks a random actor with pending events and
  /// delivers its oldest one. Otherwise one global FIFO is used.
  std::optional<std::uint64_t> shuffle_seed;
};

/// A network actor: an actor table, the aggregate dataspace, an event queue
/// and a trace. All mutation happens inside `spawn`, `interpret_action`,
/// `terminate_actor` and `dispatch_one`; a network is confined to one thread.
class network {
public:
  explicit network(network_options opts = {});

  network(const network&) = delete;
  network& operator=(const network&) = delete;

  /// Registers a leaf actor, interprets its startup actions in order, then
  /// runs the behaviour's boot hook, if any.
  actor_id spawn(std::shared_ptr<const behaviour> beh, std::any state,
                 std::vector<action> startup, std::string name = {});

  /// Registers a network actor whose children share a private dataspace.
  /// `startup` is interpreted inside the nested network. Nothing crosses the
  /// boundary in either direction.
  actor_id spawn_nested_network(std::vector<action> startup,
                                std::string name = {});

  /// Interprets one action on behalf of `who`, a direct child.
  void interpret_action(const actor_id& who, action act);

  /// Retracts everything `who` asserts, drops its queued events and removes
  /// it. Terminating a nested network first terminates its children.
  void terminate_actor(const actor_id& who, termination reason);

  /// Delivers the next queued event. When this network's own queue is empty
  /// a nested network with pending work is stepped instead.
  dispatch_status dispatch_one();

  /// Dispatches until quiescent and returns the number of dispatches.
  /// Throws `non_quiescent` if work remains after `max_steps` dispatches.
  std::size_t run_until_quiescent(std::size_t max_steps);

  // -- introspection -----------------------------------------------------------

  const actor_id& id() const noexcept {
    return self_;
  }

  bool quiescent() const;

  std::size_t actor_count() const noexcept {
    return actors_.size();
  }

  std::vector<actor_id> actors() const;

  bool contains(const actor_id& who) const;

  const assertion_set& asserted(const actor_id& who) const;

  const assertion_set& last_visible(const actor_id& who) const;

  /// Current aggregate as a set.
  const assertion_set& aggregate() const noexcept {
    return aggregate_set_;
  }

  const assertion_bag& aggregate_bag() const noexcept {
    return aggregate_;
  }

  /// Queued events in delivery order (FIFO order).
  std::vector<std::pair<actor_id, event>> pending() const;

  /// The nested network hosted by `who`, or null for a leaf actor.
  network* nested(const actor_id& who);

  const trace_log& trace() const noexcept {
    return *trace_;
  }

  /// Checks the aggregate-count and visibility invariants of this network
  /// and every nested one against a from-scratch recomputation. Throws
  /// `visibility_divergence`.
  void verify() const;

private:
  struct actor_record {
    std::string name;
    std::shared_ptr<const behaviour> beh;
    std::any state;
    assertion_set asserted;
    assertion_set last_visible;
    std::shared_ptr<network> nested;
  };

  network(actor_id self, std::shared_ptr<trace_log> trace,
          network_options opts);

  actor_id register_actor(std::string name, std::shared_ptr<const behaviour> beh,
                          std::any state, std::shared_ptr<network> nested);
  actor_record& record_of(const actor_id& who);
  const actor_record& record_of(const actor_id& who) const;
  actor_record* find(std::uint32_t index);
  void run_actions(std::uint32_t index, std::vector<action> actions);
  void apply_result(std::uint32_t index, step_result result);
  void interpret_patch(std::uint32_t index, patch p);
  void interpret_message(std::uint32_t index, const value& body);
  void refresh_visibility();
  void enqueue(std::uint32_t index, event e);
  std::string path_of(std::uint32_t index) const;

  actor_id self_;
  network_options opts_;
  std::shared_ptr<trace_log> trace_;
  std::map<std::uint32_t, actor_record> actors_;
  assertion_bag aggregate_;
  assertion_set aggregate_set_;
  std::deque<std::pair<std::uint32_t, event>> queue_;
  std::uint32_t next_child_ = 0;
  std::mt19937_64 rng_;
};

} // namespace dataspace
