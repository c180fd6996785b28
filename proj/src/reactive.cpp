#include "dataspace/reactive.hpp"

#include "dataspace/codec.hpp"

#include <algorithm>

namespace dataspace::reactive {

namespace {

bool mentions_label(const term& t, std::string_view label) {
  if (!t.is_record() && !t.is_capture())
    return false;
  if (t.is_record() && t.label() == label)
    return true;
  return std::any_of(t.fields().begin(), t.fields().end(),
                     [&](const term& f) { return mentions_label(f, label); });
}

void check_not_reserved(const term& t) {
  if (mentions_label(t, state_result_label))
    throw reserved_label("label '" + std::string{state_result_label}
                         + "' is reserved: " + t.to_string());
}

using binding_list = std::vector<std::pair<std::string, value>>;

binding_list extract_bindings(const compiled_pattern& cp, const pattern& a) {
  auto result = project_assertions(assertion_set{a}, cp.extraction);
  if (auto* unbounded = std::get_if<capture_unbounded>(&result))
    throw error("CaptureUnbounded: binder position holds a wildcard in "
                + canonical_encode(unbounded->assertion));
  const auto& tuples = std::get<std::set<capture_tuple>>(result);
  binding_list out;
  if (tuples.empty())
    return out;
  const auto& tuple = *tuples.begin();
  for (std::size_t i = 0; i < cp.names.size(); ++i)
    out.emplace_back(cp.names[i], tuple[i]);
  return out;
}

env with_bindings(env base, const binding_list& binds) {
  for (const auto& [name, v] : binds)
    base.insert_or_assign(name, v);
  return base;
}

const pattern* first_overlapping(const pattern& sub, const assertion_set& s) {
  for (const auto& a : s)
    if (overlaps(sub, a))
      return &a;
  return nullptr;
}

} // namespace

// -- context -------------------------------------------------------------------

void context::send(value body) {
  emit(message_action{std::move(body)});
}

void context::print(value output) {
  emit(print_action{std::move(output)});
}

void context::spawn(script s, env bindings, std::string name) {
  auto scope = scope_ ? *scope_ : env{};
  for (auto& [k, v] : bindings)
    scope.insert_or_assign(k, std::move(v));
  emit(make_actor(std::move(s), std::move(scope), std::move(name)));
}

const env& context::bindings() const {
  static const env empty;
  return scope_ ? *scope_ : empty;
}

// -- event_spec ----------------------------------------------------------------

event_spec event_spec::make(event_kind k, term surface, bool check_reserved) {
  if (check_reserved)
    check_not_reserved(surface);
  event_spec spec;
  spec.kind_ = k;
  spec.compiled_ = compile_surface(surface_pattern{std::move(surface)});
  return spec;
}

event_spec event_spec::message(term surface) {
  return make(event_kind::message, std::move(surface), true);
}

event_spec event_spec::asserted(term surface) {
  return make(event_kind::asserted, std::move(surface), true);
}

event_spec event_spec::retracted(term surface) {
  return make(event_kind::retracted, std::move(surface), true);
}

event_spec event_spec::rising_edge(std::function<bool(const env&)> predicate) {
  if (!predicate)
    throw error("rising-edge requires a predicate");
  event_spec spec;
  spec.kind_ = event_kind::rising_edge;
  spec.predicate_ = std::move(predicate);
  return spec;
}

std::optional<pattern> event_spec::interest() const {
  if (!compiled_)
    return std::nullopt;
  return observe(compiled_->subscription);
}

// -- mux -----------------------------------------------------------------------

patch mux::add(const std::vector<pattern>& claims) {
  patch p;
  for (const auto& a : claims)
    if (++bag_[a] == 1)
      p.added.insert(a);
  return p;
}

patch mux::remove(const std::vector<pattern>& claims) {
  patch p;
  for (const auto& a : claims) {
    auto i = bag_.find(a);
    if (i == bag_.end())
      throw error("mux: removing unclaimed assertion " + a.to_string());
    if (--i->second == 0) {
      bag_.erase(i);
      p.removed.insert(a);
    }
  }
  return p;
}

patch mux::replace(const std::vector<pattern>& before,
                   const std::vector<pattern>& after) {
  // Adding first keeps shared elements above zero throughout.
  auto up = add(after);
  auto down = remove(before);
  return patch{set_difference(up.added, down.removed),
               set_difference(down.removed, up.added)};
}

// -- state_group ---------------------------------------------------------------

bool rising_edge_fires_at_install() noexcept {
  return true;
}

state_group::state_group(state_spec spec, env lexical)
  : spec_(std::move(spec)), lexical_(std::move(lexical)) {
  collected_.reserve(spec_.collect.size());
  for (const auto& c : spec_.collect)
    collected_.push_back(c.init(lexical_));
  facet_edges_.assign(spec_.facets.size(), false);
  termination_edges_.assign(spec_.terminations.size(), false);
}

env state_group::scope() const {
  auto out = lexical_;
  for (std::size_t i = 0; i < spec_.collect.size(); ++i)
    out.insert_or_assign(spec_.collect[i].name, collected_[i]);
  return out;
}

std::vector<pattern> state_group::assert_outputs() const {
  std::vector<pattern> out;
  auto s = scope();
  for (const auto& f : spec_.facets)
    if (auto* af = std::get_if<assert_facet>(&f)) {
      auto p = af->make(s);
      if (!p.is_pattern())
        throw invalid_term("assert facet produced a non-pattern: "
                           + p.to_string());
      check_not_reserved(p);
      out.push_back(std::move(p));
    }
  return out;
}

std::vector<pattern> state_group::interests() const {
  std::vector<pattern> out;
  for (const auto& f : spec_.facets)
    if (auto* of = std::get_if<on_facet>(&f))
      if (auto i = of->spec.interest())
        out.push_back(std::move(*i));
  for (const auto& t : spec_.terminations)
    if (auto i = t.spec.interest())
      out.push_back(std::move(*i));
  return out;
}

std::vector<pattern> state_group::contributions() const {
  auto out = asserted_now_;
  auto more = interests();
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

std::optional<values> state_group::install(mux& m, context& ctx) {
  if (installed_)
    throw error("state group installed twice");
  installed_ = true;
  asserted_now_ = assert_outputs();
  ctx.emit_patch(m.add(contributions()));
  auto s = scope();
  for (std::size_t i = 0; i < spec_.facets.size(); ++i)
    if (auto* of = std::get_if<on_facet>(&spec_.facets[i]);
        of && of->spec.kind() == event_kind::rising_edge)
      facet_edges_[i] = of->spec.predicate()(s);
  bool matched = false;
  return check_terminations(nullptr, ctx, matched);
}

void state_group::run_on_body(const on_facet& f, const binding_list& binds,
                              context& ctx) {
  auto scope_now = with_bindings(scope(), binds);
  ctx.scope_ = &scope_now;
  ctx.may_enter_state_ = true;
  auto result = f.body(ctx, scope_now);
  ctx.scope_ = nullptr;
  ctx.may_enter_state_ = false;
  if (result.size() != spec_.collect.size())
    throw fold_arity_error("on-facet body returned "
                           + std::to_string(result.size())
                           + " values, state collects "
                           + std::to_string(spec_.collect.size()));
  collected_ = std::move(result);
}

values state_group::run_termination(const termination_clause& c,
                                    const binding_list& binds, context& ctx) {
  auto scope_now = with_bindings(scope(), binds);
  ctx.scope_ = &scope_now;
  ctx.may_enter_state_ = false;
  auto result = c.body(ctx, scope_now);
  ctx.scope_ = nullptr;
  return result;
}

std::optional<values> state_group::handle_event(const event& e, mux& m,
                                                context& ctx, bool& matched) {
  if (!installed_)
    throw error("event delivered to a state group that is not installed");
  const auto* msg = std::get_if<message_event>(&e);
  const auto* pe = std::get_if<patch_event>(&e);
  for (std::size_t i = 0; i < spec_.facets.size(); ++i) {
    const auto* f = std::get_if<on_facet>(&spec_.facets[i]);
    if (!f)
      continue;
    const auto& spec = f->spec;
    switch (spec.kind()) {
      case event_kind::message:
        if (msg && matches(spec.compiled()->subscription, msg->body)) {
          matched = true;
          run_on_body(*f, extract_bindings(*spec.compiled(), msg->body), ctx);
        }
        break;
      case event_kind::asserted:
      case event_kind::retracted:
        if (pe) {
          const auto& s = spec.kind() == event_kind::asserted
                            ? pe->patch.added
                            : pe->patch.removed;
          for (const auto& a : s)
            if (overlaps(spec.compiled()->subscription, a)) {
              matched = true;
              run_on_body(*f, extract_bindings(*spec.compiled(), a), ctx);
            }
        }
        break;
      case event_kind::rising_edge: {
        bool now = spec.predicate()(scope());
        bool edge = now && !facet_edges_[i];
        facet_edges_[i] = now;
        if (edge) {
          matched = true;
          run_on_body(*f, {}, ctx);
        }
        break;
      }
    }
  }
  auto refreshed = assert_outputs();
  ctx.emit_patch(m.replace(asserted_now_, refreshed));
  asserted_now_ = std::move(refreshed);
  return check_terminations(&e, ctx, matched);
}

std::optional<values> state_group::check_terminations(const event* e,
                                                      context& ctx,
                                                      bool& matched) {
  const auto* msg = e ? std::get_if<message_event>(e) : nullptr;
  const auto* pe = e ? std::get_if<patch_event>(e) : nullptr;
  std::optional<std::size_t> fired;
  binding_list fired_binds;
  for (std::size_t j = 0; j < spec_.terminations.size(); ++j) {
    const auto& spec = spec_.terminations[j].spec;
    bool satisfied = false;
    binding_list binds;
    switch (spec.kind()) {
      case event_kind::rising_edge: {
        bool now = spec.predicate()(scope());
        satisfied = now && !termination_edges_[j]
                    && (e != nullptr || rising_edge_fires_at_install());
        termination_edges_[j] = now;
        break;
      }
      case event_kind::message:
        if (msg && matches(spec.compiled()->subscription, msg->body)) {
          satisfied = true;
          if (!fired)
            binds = extract_bindings(*spec.compiled(), msg->body);
        }
        break;
      case event_kind::asserted:
      case event_kind::retracted:
        if (pe) {
          const auto& s = spec.kind() == event_kind::asserted
                            ? pe->patch.added
                            : pe->patch.removed;
          if (auto* a = first_overlapping(spec.compiled()->subscription, s)) {
            satisfied = true;
            if (!fired)
              binds = extract_bindings(*spec.compiled(), *a);
          }
        }
        break;
    }
    if (satisfied && !fired) {
      fired = j;
      fired_binds = std::move(binds);
    }
  }
  if (!fired)
    return std::nullopt;
  matched = true;
  return run_termination(spec_.terminations[*fired], fired_binds, ctx);
}

void state_group::teardown(mux& m, context& ctx) {
  if (!installed_)
    return;
  installed_ = false;
  ctx.emit_patch(m.remove(contributions()));
  asserted_now_.clear();
}

// -- actor_runtime -------------------------------------------------------------

/// Private state of one reactive actor: its script, the position reached, the
/// bindings in scope, and the state groups it hosts.
class actor_runtime {
public:
  struct resume {
    std::vector<std::string> names;
  };

  struct publish {
    std::string state_id;
  };

  using completion = std::variant<resume, publish>;

  actor_runtime(script s, env bindings)
    : env_(std::move(bindings)), script_(std::move(s)) {
    // nop
  }

  actor_runtime(state_spec spec, completion done, script then, env bindings)
    : env_(std::move(bindings)), script_(std::move(then)), waiting_(true) {
    initial_.emplace(std::move(spec), std::move(done));
  }

  step_result boot(const actor_id& self, std::any me) {
    self_ = self;
    std::vector<action> out;
    context ctx{out};
    if (initial_) {
      auto [spec, done] = std::move(*initial_);
      initial_.reset();
      start_group(std::move(spec), std::move(done), ctx);
    } else {
      run_script(ctx);
    }
    maybe_quit(ctx);
    if (out.empty())
      return unchanged{};
    return continue_with{std::move(me), std::move(out)};
  }

  step_result step(const event& e, std::any me) {
    std::vector<action> out;
    context ctx{out};
    bool matched = false;
    std::vector<std::uint64_t> ids;
    for (const auto& s : groups_)
      ids.push_back(s.id);
    for (auto id : ids) {
      auto* s = find_group(id);
      if (!s)
        continue;
      if (auto result = s->group->handle_event(e, mux_, ctx, matched))
        finish(id, std::move(*result), ctx);
    }
    maybe_quit(ctx);
    if (out.empty() && !matched)
      return unchanged{};
    return continue_with{std::move(me), std::move(out)};
  }

private:
  struct slot {
    std::uint64_t id;
    std::unique_ptr<state_group> group;
    completion done;
  };

  slot* find_group(std::uint64_t id) {
    auto i = std::find_if(groups_.begin(), groups_.end(),
                          [id](const slot& s) { return s.id == id; });
    return i == groups_.end() ? nullptr : &*i;
  }

  void start_group(state_spec spec, completion done, context& ctx) {
    auto id = next_group_++;
    groups_.push_back(slot{
      id, std::make_unique<state_group>(std::move(spec), env_),
      std::move(done)});
    if (auto result = groups_.back().group->install(mux_, ctx))
      finish(id, std::move(*result), ctx);
  }

  void finish(std::uint64_t id, values result, context& ctx) {
    auto i = std::find_if(groups_.begin(), groups_.end(),
                          [id](const slot& s) { return s.id == id; });
    i->group->teardown(mux_, ctx);
    auto done = std::move(i->done);
    groups_.erase(i);
    waiting_ = false;
    if (auto* r = std::get_if<resume>(&done)) {
      if (!r->names.empty() && r->names.size() != result.size())
        throw error("state returned " + std::to_string(result.size())
                    + " values for " + std::to_string(r->names.size())
                    + " names");
      for (std::size_t k = 0; k < r->names.size(); ++k)
        env_.insert_or_assign(r->names[k], result[k]);
      run_script(ctx);
    } else {
      const auto& p = std::get<publish>(done);
      auto answer = term::record(
        std::string{state_result_label},
        {term::string(p.state_id), term::record("values", std::move(result))});
      ctx.emit_patch(mux_.add({answer}));
    }
  }

  void run_script(context& ctx) {
    while (pc_ < script_.size() && !waiting_) {
      const auto& st = script_[pc_++];
      if (auto* s = std::get_if<send_step>(&st)) {
        ctx.send(s->body(env_));
      } else if (auto* c = std::get_if<custom_step>(&st)) {
        ctx.scope_ = &env_;
        ctx.may_enter_state_ = false;
        c->effect(ctx, env_);
        ctx.scope_ = nullptr;
      } else {
        const auto& s2 = std::get<state_step>(st);
        enter_blocking(s2.spec(env_), s2.bind, ctx);
      }
    }
  }

  // The state runs in a fresh actor. The script waits for that actor's
  // state-result assertion; the wait is subscribed before the spawn so an
  // immediate result cannot be missed.
  void enter_blocking(state_spec spec, const std::vector<std::string>& names,
                      context& ctx) {
    auto state_id = self_.to_string() + "#" + std::to_string(next_state_++);
    state_spec wait;
    wait.terminations.push_back(termination_clause{
      event_spec::make(event_kind::asserted,
                       term::record(std::string{state_result_label},
                                    {term::string(state_id), bind("result")}),
                       false),
      [](context&, const env& e) {
        const auto& r = e.at("result");
        return values(r.fields().begin(), r.fields().end());
      }});
    waiting_ = true;
    start_group(std::move(wait), resume{names}, ctx);
    ctx.emit(spawn_action{
      synthesize_behaviour(),
      std::make_shared<actor_runtime>(std::move(spec), publish{state_id},
                                      script{}, env_),
      {},
      "state " + state_id});
  }

  void maybe_quit(context& ctx) {
    if (!quit_ && !waiting_ && pc_ >= script_.size() && groups_.empty()) {
      quit_ = true;
      ctx.emit(quit_action{});
    }
  }


  actor_id self_;
  env env_;
  script script_;
  std::size_t pc_ = 0;
  bool waiting_ = false;
  bool quit_ = false;
  std::optional<std::pair<state_spec, completion>> initial_;
  std::vector<slot> groups_;
  mux mux_;
  std::uint64_t next_group_ = 0;
  std::uint64_t next_state_ = 0;
};

void context::enter_state(state_spec spec, script then,
                          std::vector<std::string> result_names,
                          std::string name) {
  if (!may_enter_state_)
    throw blocking_termination("state may only be entered from an on-facet "
                               "body or a script step");
  emit(spawn_action{
    synthesize_behaviour(),
    std::make_shared<actor_runtime>(std::move(spec),
                                    actor_runtime::resume{
                                      std::move(result_names)},
                                    std::move(then), bindings()),
    {},
    name.empty() ? "detached state" : std::move(name)});
}

std::shared_ptr<const behaviour> synthesize_behaviour() {
  static const auto instance = std::make_shared<const behaviour>(behaviour{
    [](const event& e, const std::any& st) -> step_result {
      auto rt = std::any_cast<std::shared_ptr<actor_runtime>>(st);
      try {
        return rt->step(e, st);
      } catch (const std::exception& ex) {
        return failure{ex.what()};
      }
    },
    [](const actor_id& self, const std::any& st) -> step_result {
      auto rt = std::any_cast<std::shared_ptr<actor_runtime>>(st);
      try {
        return rt->boot(self, st);
      } catch (const std::exception& ex) {
        return failure{ex.what()};
      }
    },
  });
  return instance;
}

spawn_action make_actor(script s, env bindings, std::string name) {
  return spawn_action{
    synthesize_behaviour(),
    std::make_shared<actor_runtime>(std::move(s), std::move(bindings)),
    {},
    std::move(name)};
}

actor_id reactive_actor(network& net, script s, env bindings,
                        std::string name) {
  auto act = make_actor(std::move(s), std::move(bindings), std::move(name));
  return net.spawn(std::move(act.beh), std::move(act.state), {},
                   std::move(act.name));
}

} // namespace dataspace::reactive
