#include "dataspace/network.hpp"

#include "dataspace/codec.hpp"
#include "dataspace/oracle.hpp"
#include "dataspace/pattern.hpp"

#include <algorithm>

namespace dataspace {

// -- actor_id ------------------------------------------------------------------

actor_id actor_id::child(std::uint32_t index) const {
  auto p = path_;
  p.push_back(index);
  return actor_id{std::move(p)};
}

std::uint32_t actor_id::index() const {
  if (path_.empty())
    throw error("the ground network has no index");
  return path_.back();
}

std::string actor_id::to_string() const {
  std::string out = "g";
  for (auto i : path_) {
    out += '/';
    out += std::to_string(i);
  }
  return out;
}

non_quiescent::non_quiescent(std::size_t max_steps)
  : error("network not quiescent after " + std::to_string(max_steps)
          + " dispatches"),
    max_steps_(max_steps) {
  // nop
}

// -- network -------------------------------------------------------------------

network::network(network_options opts)
  : network(actor_id{}, std::make_shared<trace_log>(), opts) {
  // nop
}

network::network(actor_id self, std::shared_ptr<trace_log> trace,
                 network_options opts)
  : self_(std::move(self)),
    opts_(opts),
    trace_(std::move(trace)),
    rng_(opts.shuffle_seed.value_or(0)) {
  // nop
}

std::string network::path_of(std::uint32_t index) const {
  return self_.child(index).to_string();
}

network::actor_record* network::find(std::uint32_t index) {
  auto i = actors_.find(index);
  return i == actors_.end() ? nullptr : &i->second;
}

network::actor_record& network::record_of(const actor_id& who) {
  return const_cast<actor_record&>(std::as_const(*this).record_of(who));
}

const network::actor_record& network::record_of(const actor_id& who) const {
  const auto& p = who.path();
  if (p.size() != self_.path().size() + 1
      || !std::equal(self_.path().begin(), self_.path().end(), p.begin()))
    throw error(who.to_string() + " is not a direct child of "
                + self_.to_string());
  auto i = actors_.find(p.back());
  if (i == actors_.end())
    throw error("no such actor: " + who.to_string());
  return i->second;
}

actor_id network::register_actor(std::string name,
                                 std::shared_ptr<const behaviour> beh,
                                 std::any state,
                                 std::shared_ptr<network> nested) {
  auto index = next_child_++;
  actors_.emplace(index, actor_record{name, std::move(beh), std::move(state),
                                      {}, {}, std::move(nested)});
  trace_->record(path_of(index), trace_kind::spawn, std::move(name));
  return self_.child(index);
}

actor_id network::spawn(std::shared_ptr<const behaviour> beh, std::any state,
                        std::vector<action> startup, std::string name) {
  if (!beh || !beh->step)
    throw error("spawn requires a behaviour with a step function");
  auto id = register_actor(std::move(name), beh, std::move(state), nullptr);
  auto index = id.index();
  run_actions(index, std::move(startup));
  if (beh->boot) {
    if (auto* rec = find(index)) {
      step_result result;
      try {
        result = beh->boot(id, rec->state);
      } catch (const std::exception& e) {
        result = failure{e.what()};
      }
      apply_result(index, std::move(result));
    }
  }
  return id;
}

actor_id network::spawn_nested_network(std::vector<action> startup,
                                       std::string name) {
  auto index = next_child_;
  auto inner = std::shared_ptr<network>(
    new network(self_.child(index), trace_, opts_));
  inner->rng_.seed(opts_.shuffle_seed.value_or(0) + index + 1);
  static const auto inert = std::make_shared<const behaviour>(behaviour{
    [](const event&, const std::any&) -> step_result { return unchanged{}; },
    {},
  });
  auto id = register_actor(std::move(name), inert, {}, inner);
  for (auto& act : startup)
    if (auto* s = std::get_if<spawn_action>(&act))
      inner->spawn(std::move(s->beh), std::move(s->state),
                   std::move(s->startup), std::move(s->name));
    else
      throw error("nested network startup actions must be spawns");
  return id;
}

void network::interpret_action(const actor_id& who, action act) {
  record_of(who);
  std::vector<action> acts;
  acts.push_back(std::move(act));
  run_actions(who.index(), std::move(acts));
}

void network::run_actions(std::uint32_t index, std::vector<action> actions) {
  for (auto& act : actions) {
    if (!find(index))
      return;
    std::visit(
      [&](auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, patch_action>) {
          interpret_patch(index, std::move(a.patch));
        } else if constexpr (std::is_same_v<T, message_action>) {
          interpret_message(index, a.body);
        } else if constexpr (std::is_same_v<T, spawn_action>) {
          spawn(std::move(a.beh), std::move(a.state), std::move(a.startup),
                std::move(a.name));
        } else if constexpr (std::is_same_v<T, quit_action>) {
          terminate_actor(self_.child(index), termination::clean());
        } else {
          trace_->record(path_of(index), trace_kind::event_message,
                         to_json(a.output));
        }
      },
      static_cast<action::variant&>(act));
  }
}

void network::apply_result(std::uint32_t index, step_result result) {
  if (auto* c = std::get_if<continue_with>(&result)) {
    auto* rec = find(index);
    if (!rec)
      return;
    rec->state = std::move(c->state);
    run_actions(index, std::move(c->actions));
  } else if (auto* f = std::get_if<failure>(&result)) {
    if (find(index))
      terminate_actor(self_.child(index), termination::crash(f->reason));
  }
}

void network::interpret_patch(std::uint32_t index, patch p) {
  auto& rec = *find(index);
  if (!set_intersection(p.added, p.removed).empty()) {
    terminate_actor(self_.child(index),
                    termination::crash("InvalidPatch: added and removed "
                                       "sets overlap"));
    return;
  }
  auto clamped = clamp_patch(p, rec.asserted);
  if (clamped.empty())
    return;
  trace_->record(path_of(index), trace_kind::patch_out, to_json(clamped));
  rec.asserted = apply_patch(rec.asserted, clamped);
  for (const auto& a : clamped.removed) {
    auto i = aggregate_.find(a);
    if (--i->second == 0) {
      aggregate_.erase(i);
      aggregate_set_.erase(a);
    }
  }
  for (const auto& a : clamped.added)
    if (++aggregate_[a] == 1)
      aggregate_set_.insert(a);
  refresh_visibility();
}

void network::refresh_visibility() {
  for (auto& [index, rec] : actors_) {
    auto now = visible(aggregate_set_, interests_of(rec.asserted));
    if (now != rec.last_visible) {
      enqueue(index, patch_event{delta(rec.last_visible, now)});
      rec.last_visible = std::move(now);
    }
  }
}

void network::interpret_message(std::uint32_t index, const value& body) {
  if (!body.is_ground()) {
    terminate_actor(self_.child(index),
                    termination::crash("NonGroundMessage: "
                                       + canonical_encode(body)));
    return;
  }
  trace_->record(path_of(index), trace_kind::message, to_json(body));
  for (const auto& [target, rec] : actors_) {
    auto interests = interests_of(rec.asserted);
    if (std::any_of(interests.begin(), interests.end(),
                    [&](const pattern& p) { return matches(p, body); }))
      enqueue(target, message_event{body});
  }
}

void network::enqueue(std::uint32_t index, event e) {
  queue_.emplace_back(index, std::move(e));
}

void network::terminate_actor(const actor_id& who, termination reason) {
  auto& rec = record_of(who);
  auto index = who.index();
  if (rec.nested)
    for (const auto& child : rec.nested->actors())
      if (rec.nested->contains(child))
        rec.nested->terminate_actor(child, reason);
  if (reason.crashed)
    trace_->record(who.to_string(), trace_kind::crash, reason.detail);
  else
    trace_->record(who.to_string(), trace_kind::quit, nullptr);
  if (!rec.asserted.empty())
    interpret_patch(index, patch{{}, rec.asserted});
  actors_.erase(index);
  std::erase_if(queue_, [index](const auto& q) { return q.first == index; });
}

dispatch_status network::dispatch_one() {
  if (queue_.empty()) {
    for (auto& [index, rec] : actors_)
      if (rec.nested && rec.nested->dispatch_one() == dispatch_status::dispatched)
        return dispatch_status::dispatched;
    return dispatch_status::quiescent;
  }
  auto pos = queue_.begin();
  if (opts_.shuffle_seed) {
    std::vector<std::uint32_t> candidates;
    for (const auto& [index, e] : queue_)
      if (std::find(candidates.begin(), candidates.end(), index)
          == candidates.end())
        candidates.push_back(index);
    std::uniform_int_distribution<std::size_t> pick{0, candidates.size() - 1};
    auto chosen = candidates[pick(rng_)];
    pos = std::find_if(queue_.begin(), queue_.end(),
                       [chosen](const auto& q) { return q.first == chosen; });
  }
  auto [index, ev] = std::move(*pos);
  queue_.erase(pos);
  auto* rec = find(index);
  if (!rec)
    return dispatch_status::dispatched;
  if (auto* pe = std::get_if<patch_event>(&ev))
    trace_->record(path_of(index), trace_kind::patch_in, to_json(pe->patch));
  step_result result;
  auto beh = rec->beh;
  try {
    result = beh->step(ev, rec->state);
  } catch (const std::exception& e) {
    result = failure{e.what()};
  }
  apply_result(index, std::move(result));
  if (opts_.verify)
    verify();
  return dispatch_status::dispatched;
}

std::size_t network::run_until_quiescent(std::size_t max_steps) {
  if (max_steps == 0)
    throw error("max_steps must be positive");
  for (std::size_t n = 0; n < max_steps; ++n)
    if (dispatch_one() == dispatch_status::quiescent)
      return n;
  if (!quiescent())
    throw non_quiescent(max_steps);
  return max_steps;
}

bool network::quiescent() const {
  if (!queue_.empty())
    return false;
  return std::all_of(actors_.begin(), actors_.end(), [](const auto& kv) {
    return !kv.second.nested || kv.second.nested->quiescent();
  });
}

std::vector<actor_id> network::actors() const {
  std::vector<actor_id> out;
  out.reserve(actors_.size());
  for (const auto& [index, rec] : actors_)
    out.push_back(self_.child(index));
  return out;
}

bool network::contains(const actor_id& who) const {
  const auto& p = who.path();
  return p.size() == self_.path().size() + 1
         && std::equal(self_.path().begin(), self_.path().end(), p.begin())
         && actors_.count(p.back()) > 0;
}

const assertion_set& network::asserted(const actor_id& who) const {
  return record_of(who).asserted;
}

const assertion_set& network::last_visible(const actor_id& who) const {
  return record_of(who).last_visible;
}

std::vector<std::pair<actor_id, event>> network::pending() const {
  std::vector<std::pair<actor_id, event>> out;
  out.reserve(queue_.size());
  for (const auto& [index, e] : queue_)
    out.emplace_back(self_.child(index), e);
  return out;
}

network* network::nested(const actor_id& who) {
  return record_of(who).nested.get();
}

void network::verify() const {
  std::vector<assertion_set> sets;
  sets.reserve(actors_.size());
  for (const auto& [index, rec] : actors_)
    sets.push_back(rec.asserted);
  if (oracle::aggregate_from_scratch(sets) != aggregate_)
    throw visibility_divergence("aggregate counts diverge in "
                                + self_.to_string());
  for (const auto& [index, rec] : actors_) {
    if (oracle::visible_from_scratch(sets, rec.asserted) != rec.last_visible)
      throw visibility_divergence("visible set of " + path_of(index)
                                  + " diverges from recomputation");
    if (rec.nested)
      rec.nested->verify();
  }
}

} // namespace dataspace
