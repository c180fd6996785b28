#pragma once

#include "dataspace/network.hpp"
#include "dataspace/pattern.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

// Reactive actors: sequential scripts that block in `state` forms while the
// state's facets (maintained assertions and event handlers) stay live. The
// layer compiles down to plain behaviours for `dataspace::network`.

namespace dataspace::reactive {

/// Raised when a user pattern or assert facet uses a reserved record label.
class reserved_label : public error {
public:
  using error::error;
};

/// Raised when an on-facet body yields the wrong number of values.
class fold_arity_error : public error {
public:
  using error::error;
};

/// Raised when a termination clause body tries to enter a state.
class blocking_termination : public error {
public:
  using error::error;
};

/// Label of the record a blocking state's actor asserts to hand its result
/// values back to the suspended script.
inline constexpr std::string_view state_result_label = "state-result";

using env = std::map<std::string, value>;
using values = std::vector<value>;

struct step;
using script = std::vector<step>;
struct state_spec;

/// Effect sink handed to facet bodies, termination bodies and script steps.
/// Everything a body does is appended, in order, to one action list.
class context {
public:
  explicit context(std::vector<action>& out) : out_(&out) {
    // nop
  }

  void send(value body);

  void print(value output);

  /// Starts a new reactive actor running `s` with `bindings` in scope.
  void spawn(script s, env bindings = {}, std::string name = {});

  /// Starts `spec` in a detached child actor seeded with the bindings
  /// currently in scope. Does not wait: the state's result values are bound
  /// to `result_names` for `then`, which runs inside the child once the
  /// state terminates. Only allowed from on-facet bodies.
  void enter_state(state_spec spec, script then = {},
                   std::vector<std::string> result_names = {},
                   std::string name = {});

  void emit(action act) {
    out_->push_back(std::move(act));
  }

  void emit_patch(patch p) {
    if (!p.empty())
      out_->push_back(patch_action{std::move(p)});
  }

  /// Bindings visible to the body currently running.
  const env& bindings() const;

  std::vector<action>& actions() noexcept {
    return *out_;
  }

private:
  friend class state_group;
  friend class actor_runtime;

  std::vector<action>* out_;
  const env* scope_ = nullptr;
  bool may_enter_state_ = false;
};

enum class event_kind { message, asserted, retracted, rising_edge };

/// The trigger of an on facet or termination clause.
class event_spec {
public:
  /// Each factory throws `reserved_label` for patterns mentioning the
  /// state-result label.
  static event_spec message(term surface);
  static event_spec asserted(term surface);
  static event_spec retracted(term surface);
  static event_spec rising_edge(std::function<bool(const env&)> predicate);

  event_kind kind() const noexcept {
    return kind_;
  }

  /// Compiled surface pattern; empty for rising-edge specs.
  const std::optional<compiled_pattern>& compiled() const noexcept {
    return compiled_;
  }

  const std::function<bool(const env&)>& predicate() const noexcept {
    return predicate_;
  }

  /// The assertion of interest this spec contributes, if any:
  /// `observe(subscription)`.
  std::optional<pattern> interest() const;

private:
  friend class actor_runtime;

  static event_spec make(event_kind k, term surface, bool check_reserved);

  event_kind kind_ = event_kind::message;
  std::optional<compiled_pattern> compiled_;
  std::function<bool(const env&)> predicate_;
};

/// Body of an on facet or termination clause. On-facet bodies return the new
/// collected values; termination bodies return the state's result values.
using body_fn = std::function<values(context&, const env&)>;

/// Keeps `make(bindings)` asserted while the state runs.
struct assert_facet {
  std::function<pattern(const env&)> make;
};

struct on_facet {
  event_spec spec;
  body_fn body;
};

using facet = std::variant<assert_facet, on_facet>;

struct termination_clause {
  event_spec spec;
  body_fn body;
};

struct collect_binding {
  std::string name;
  std::function<value(const env&)> init;
};

/// A `state` form. `until` has one termination clause and `forever` none.
struct state_spec {
  std::vector<collect_binding> collect;
  std::vector<facet> facets;
  std::vector<termination_clause> terminations;
};

inline facet asserting(std::function<pattern(const env&)> make) {
  return assert_facet{std::move(make)};
}

inline facet on(event_spec spec, body_fn body) {
  return on_facet{std::move(spec), std::move(body)};
}

inline termination_clause when(event_spec spec, body_fn body) {
  return termination_clause{std::move(spec), std::move(body)};
}

inline collect_binding collect(std::string name, value initial) {
  return {std::move(name),
          [initial = std::move(initial)](const env&) { return initial; }};
}

inline collect_binding collect(std::string name,
                               std::function<value(const env&)> init) {
  return {std::move(name), std::move(init)};
}

// -- scripts -------------------------------------------------------------------

struct send_step {
  std::function<value(const env&)> body;
};

/// Blocks the script until the state terminates, then binds the result
/// values to `bind` in order.
struct state_step {
  std::function<state_spec(const env&)> spec;
  std::vector<std::string> bind;
};

/// Arbitrary effect over the script's bindings.
struct custom_step {
  std::function<void(context&, env&)> effect;
};

struct step : std::variant<send_step, state_step, custom_step> {
  using variant::variant;
};

inline step send(value body) {
  return send_step{[body = std::move(body)](const env&) { return body; }};
}

inline step send(std::function<value(const env&)> body) {
  return send_step{std::move(body)};
}

inline step print(std::function<value(const env&)> output) {
  return custom_step{[output = std::move(output)](context& ctx, env& e) {
    ctx.print(output(e));
  }};
}

inline step enter(state_spec spec, std::vector<std::string> bind = {}) {
  return state_step{[spec = std::move(spec)](const env&) { return spec; },
                    std::move(bind)};
}

inline step enter(std::function<state_spec(const env&)> spec,
                  std::vector<std::string> bind = {}) {
  return state_step{std::move(spec), std::move(bind)};
}

inline step custom(std::function<void(context&, env&)> effect) {
  return custom_step{std::move(effect)};
}

// -- runtime -------------------------------------------------------------------

/// Reference-counted multiplexer of one actor's facet assertions. The actor's
/// asserted set is the support of the bag; patches are produced only on
/// 0 <-> 1 count transitions.
class mux {
public:
  /// Adds one claim per element and returns the assertions that appeared.
  patch add(const std::vector<pattern>& claims);

  /// Drops one claim per element and returns the assertions that vanished.
  patch remove(const std::vector<pattern>& claims);

  /// Replaces `before` by `after` without transient retractions of shared
  /// elements.
  patch replace(const std::vector<pattern>& before,
                const std::vector<pattern>& after);

  const assertion_bag& bag() const noexcept {
    return bag_;
  }

  assertion_set asserted() const {
    return support(bag_);
  }

private:
  assertion_bag bag_;
};

/// A running instance of a `state` form: collected values, live facets,
/// termination clauses and rising-edge baselines.
class state_group {
public:
  /// Evaluates the collect initialisers against `lexical`.
  state_group(state_spec spec, env lexical);

  /// Contributes the group's assertions to `m`, appending the resulting
  /// patch to `ctx`, and records rising-edge baselines. Returns result
  /// values if a termination clause is already satisfied.
  std::optional<values> install(mux& m, context& ctx);

  /// Folds one event through the on facets, refreshes assert facets, then
  /// checks termination clauses in declaration order. Returns result values
  /// if the state terminates. Sets `matched` if any body or clause ran.
  std::optional<values> handle_event(const event& e, mux& m, context& ctx,
                                     bool& matched);

  /// Withdraws every contribution from `m` and appends the patch to `ctx`.
  void teardown(mux& m, context& ctx);

  const values& collected() const noexcept {
    return collected_;
  }

  /// Lexical bindings overlaid with the collected values.
  env scope() const;

  /// Current contribution: assert-facet outputs plus the interests of every
  /// message/asserted/retracted spec.
  std::vector<pattern> contributions() const;

private:
  using binding_list = std::vector<std::pair<std::string, value>>;

  std::vector<pattern> assert_outputs() const;
  std::vector<pattern> interests() const;
  void run_on_body(const on_facet& f, const binding_list& binds,
                   context& ctx);
  std::optional<values> check_terminations(const event* e, context& ctx,
                                           bool& matched);
  values run_termination(const termination_clause& c,
                         const binding_list& binds, context& ctx);

  state_spec spec_;
  env lexical_;
  values collected_;
  std::vector<pattern> asserted_now_;
  std::vector<bool> facet_edges_;
  std::vector<bool> termination_edges_;
  bool installed_ = false;
};

/// True if a rising-edge predicate that already holds when its state is
/// installed fires immediately.
bool rising_edge_fires_at_install() noexcept;

/// Behaviour shared by every reactive actor. The private state is a
/// `std::shared_ptr<actor_runtime>`.
std::shared_ptr<const behaviour> synthesize_behaviour();

/// Spawn action for a reactive actor running `s`.
spawn_action make_actor(script s, env bindings = {}, std::string name = {});

/// Spawns a reactive actor into `net`. The script runs synchronously until it
/// completes (the actor quits) or blocks in a state.
actor_id reactive_actor(network& net, script s, env bindings = {},
                        std::string name = {});

} // namespace dataspace::reactive
