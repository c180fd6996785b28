#include "dataspace/scenarios.hpp"

#include "dataspace/codec.hpp"
#include "dataspace/pattern.hpp"
#include "dataspace/reactive.hpp"

#include <map>

namespace dataspace::scenarios {

namespace {

using reactive::env;
using reactive::event_spec;
using reactive::values;

std::shared_ptr<const behaviour> make_behaviour(
  std::function<step_result(const event&, const std::any&)> step) {
  return std::make_shared<const behaviour>(behaviour{std::move(step), {}});
}

term account(term balance) {
  return rec("account", {std::move(balance)});
}

term deposit(term amount) {
  return rec("deposit", {std::move(amount)});
}

term file(term name, term content) {
  return rec("file", {std::move(name), std::move(content)});
}

term save(term f) {
  return rec("save", {std::move(f)});
}

term delete_(term name) {
  return rec("delete", {std::move(name)});
}

// -- bank account, plain behaviours ------------------------------------------

step_result bank_manager(const event& e, const std::any& st) {
  auto* msg = std::get_if<message_event>(&e);
  if (!msg || !matches(deposit(wild()), msg->body))
    return unchanged{};
  auto balance = std::any_cast<std::int64_t>(st);
  auto next = balance + msg->body[0].as_integer();
  auto p = seq_patches(patch{{}, {account(num(balance))}},
                       patch{{account(num(next))}, {}});
  return continue_with{next, {patch_action{std::move(p)}}};
}

step_result bank_observer(const event& e, const std::any& st) {
  auto* pe = std::get_if<patch_event>(&e);
  if (!pe)
    return unchanged{};
  static const projection balances{account(cap())};
  auto result = project_assertions(pe->patch.added, balances);
  if (std::holds_alternative<capture_unbounded>(result))
    return failure{"CaptureUnbounded: account balance is a wildcard"};
  std::vector<action> out;
  for (const auto& tuple : std::get<std::set<capture_tuple>>(result))
    out.push_back(print_action{tuple[0]});
  return continue_with{st, std::move(out)};
}

step_result bank_updater(const event& e, const std::any& st) {
  auto* pe = std::get_if<patch_event>(&e);
  if (!pe || pe->patch.added.empty())
    return unchanged{};
  return continue_with{st,
                       {message_action{deposit(num(first_deposit))},
                        message_action{deposit(num(second_deposit))},
                        quit_action{}}};
}

// -- file system, plain behaviours --------------------------------------------

using file_table = std::map<value, value>;

struct observation {
  value name;
  value content;
};

step_result file_observation(const event& e, const std::any& st) {
  auto obs = std::any_cast<observation>(st);
  if (auto* msg = std::get_if<message_event>(&e)) {
    value next = obs.content;
    if (matches(save(file(obs.name, wild())), msg->body))
      next = msg->body[0][1];
    else if (matches(delete_(obs.name), msg->body))
      next = boolean(false);
    else
      return unchanged{};
    auto p = seq_patches(patch{{}, {file(obs.name, obs.content)}},
                         patch{{file(obs.name, next)}, {}});
    obs.content = next;
    return continue_with{obs, {patch_action{std::move(p)}}};
  }
  const auto& pe = std::get<patch_event>(e);
  for (const auto& a : pe.patch.removed)
    if (overlaps(observe(file(obs.name, wild())), a))
      return continue_with{obs, {quit_action{}}};
  return unchanged{};
}

step_result file_system(const event& e, const std::any& st) {
  auto files = std::any_cast<file_table>(st);
  if (auto* msg = std::get_if<message_event>(&e)) {
    if (matches(save(file(wild(), wild())), msg->body))
      files[msg->body[0][0]] = msg->body[0][1];
    else if (matches(delete_(wild()), msg->body))
      files.erase(msg->body[0]);
    else
      return unchanged{};
    return continue_with{std::move(files), {}};
  }
  const auto& pe = std::get<patch_event>(e);
  static const projection names{observe(file(cap(), wild()))};
  auto result = project_assertions(pe.patch.added, names);
  if (std::holds_alternative<capture_unbounded>(result))
    return failure{"CaptureUnbounded: file name is a wildcard"};
  static const auto observer = make_behaviour(file_observation);
  std::vector<action> out;
  for (const auto& tuple : std::get<std::set<capture_tuple>>(result)) {
    const auto& name = tuple[0];
    auto i = files.find(name);
    auto content = i == files.end() ? boolean(false) : i->second;
    out.push_back(spawn_action{
      observer,
      observation{name, content},
      {patch_action{patch{{file(name, content), observe(save(file(name, wild()))),
                           observe(delete_(name)),
                           observe(observe(file(name, wild())))},
                          {}}}},
      "file-observation"});
  }
  if (out.empty())
    return unchanged{};
  return continue_with{std::move(files), std::move(out)};
}

step_result novel_monitor(const event& e, const std::any& st) {
  auto* pe = std::get_if<patch_event>(&e);
  if (!pe)
    return unchanged{};
  static const projection texts{file(str("novel.txt"), cap())};
  auto result = project_assertions(pe->patch.added, texts);
  if (std::holds_alternative<capture_unbounded>(result))
    return failure{"CaptureUnbounded: novel content is a wildcard"};
  std::vector<action> out;
  bool done = false;
  for (const auto& tuple : std::get<std::set<capture_tuple>>(result)) {
    out.push_back(print_action{tuple[0]});
    done = done || tuple[0] == str(std::string{novel_text});
  }
  if (done)
    out.push_back(quit_action{});
  return continue_with{st, std::move(out)};
}

step_result novel_writer(const event& e, const std::any& st) {
  auto* pe = std::get_if<patch_event>(&e);
  if (!pe || pe->patch.added.empty())
    return unchanged{};
  return continue_with{
    st,
    {message_action{save(file(str("novel.txt"), str(std::string{novel_text})))},
     quit_action{}}};
}

// -- file table as a value ------------------------------------------------------

// files(entry(name, content), ...) kept sorted by name.
value table_set(const value& table, const value& name, const value& content) {
  std::map<value, value> m;
  for (const auto& entry : table.fields())
    m.insert_or_assign(entry[0], entry[1]);
  m.insert_or_assign(name, content);
  std::vector<term> entries;
  for (const auto& [k, v] : m)
    entries.push_back(rec("entry", {k, v}));
  return rec("files", std::move(entries));
}

value table_remove(const value& table, const value& name) {
  std::vector<term> entries;
  for (const auto& entry : table.fields())
    if (entry[0] != name)
      entries.push_back(entry);
  return rec("files", std::move(entries));
}

value table_lookup(const value& table, const value& name) {
  for (const auto& entry : table.fields())
    if (entry[0] == name)
      return entry[1];
  return boolean(false);
}

reactive::state_spec file_cache(const value& name) {
  using namespace reactive;
  state_spec s;
  s.collect.push_back(collect("content", [](const env& e) {
    return table_lookup(e.at("files"), e.at("name"));
  }));
  s.facets.push_back(asserting([](const env& e) {
    return file(e.at("name"), e.at("content"));
  }));
  s.facets.push_back(on(event_spec::message(save(file(name, bind("c")))),
                        [](context&, const env& e) -> values {
                          return {e.at("c")};
                        }));
  s.facets.push_back(on(event_spec::message(delete_(name)),
                        [](context&, const env&) -> values {
                          return {boolean(false)};
                        }));
  s.terminations.push_back(
    when(event_spec::retracted(observe(file(name, wild()))),
         [](context&, const env&) -> values { return {}; }));
  return s;
}

} // namespace

// -- builders ------------------------------------------------------------------

void build_bank_account_plain(network& net) {
  net.spawn(make_behaviour(bank_manager), std::int64_t{0},
            {patch_action{patch{{account(num(0)), observe(deposit(wild()))},
                                {}}}},
            "manager");
  net.spawn(make_behaviour(bank_observer), std::monostate{},
            {patch_action{patch{{observe(account(wild()))}, {}}}}, "observer");
  net.spawn(make_behaviour(bank_updater), std::monostate{},
            {patch_action{patch{{observe(observe(deposit(wild())))}, {}}}},
            "updater");
}

void build_bank_account_reactive(network& net) {
  using namespace reactive;
  state_spec manager;
  manager.collect.push_back(collect("balance", num(0)));
  manager.facets.push_back(
    asserting([](const env& e) { return account(e.at("balance")); }));
  manager.facets.push_back(
    on(event_spec::message(deposit(bind("amount"))),
       [](context&, const env& e) -> values {
         return {num(e.at("balance").as_integer()
                     + e.at("amount").as_integer())};
       }));
  reactive_actor(net, {enter(manager)}, {}, "manager");

  state_spec observer;
  observer.facets.push_back(on(event_spec::asserted(account(bind("balance"))),
                               [](context& ctx, const env& e) -> values {
                                 ctx.print(e.at("balance"));
                                 return {};
                               }));
  reactive_actor(net, {enter(observer)}, {}, "observer");

  state_spec wait_for_manager;
  wait_for_manager.terminations.push_back(
    when(event_spec::asserted(observe(deposit(wild()))),
         [](context&, const env&) -> values { return {}; }));
  reactive_actor(net,
                 {enter(wait_for_manager), send(deposit(num(first_deposit))),
                  send(deposit(num(second_deposit)))},
                 {}, "updater");
}

void build_counter(network& net, bool interrupt) {
  using namespace reactive;
  state_spec counting;
  counting.collect.push_back(collect("count", num(0)));
  counting.facets.push_back(asserting(
    [](const env& e) { return rec("incrs-seen-so-far", {e.at("count")}); }));
  counting.facets.push_back(on(event_spec::message(sym("incr")),
                               [](context&, const env& e) -> values {
                                 return {num(e.at("count").as_integer() + 1)};
                               }));
  counting.terminations.push_back(
    when(event_spec::rising_edge(
           [](const env& e) { return e.at("count").as_integer() >= 5; }),
         [](context& ctx, const env& e) -> values {
           ctx.send(sym("too-many"));
           return {e.at("count")};
         }));
  counting.terminations.push_back(
    when(event_spec::message(sym("interrupt")),
         [](context& ctx, const env& e) -> values {
           ctx.send(sym("interrupted"));
           return {e.at("count")};
         }));
  reactive_actor(net,
                 {send(sym("starting")), enter(counting, {"final-count"}),
                  print([](const env& e) { return e.at("final-count"); }),
                  send(sym("finished"))},
                 {}, "counter");

  state_spec wait_for_counter;
  wait_for_counter.terminations.push_back(
    when(event_spec::asserted(observe(sym("incr"))),
         [](context&, const env&) -> values { return {}; }));
  script driver{enter(wait_for_counter)};
  auto incrs = interrupt ? 2 : 5;
  for (int i = 0; i < incrs; ++i)
    driver.push_back(send(sym("incr")));
  if (interrupt)
    driver.push_back(send(sym("interrupt")));
  reactive_actor(net, std::move(driver), {}, "driver");
}

void build_file_system_plain(network& net) {
  net.spawn(make_behaviour(file_system), file_table{},
            {patch_action{patch{{observe(save(file(wild(), wild()))),
                                 observe(delete_(wild())),
                                 observe(observe(file(wild(), wild())))},
                                {}}}},
            "file-system");
  net.spawn(make_behaviour(novel_monitor), std::monostate{},
            {patch_action{patch{{observe(file(str("novel.txt"), wild()))},
                                {}}}},
            "novel-monitor");
  net.spawn(make_behaviour(novel_writer), std::monostate{},
            {patch_action{patch{{observe(observe(save(wild())))}, {}}}},
            "writer");
}

void build_file_system_reactive(network& net) {
  using namespace reactive;
  state_spec fs;
  fs.collect.push_back(collect("files", rec("files")));
  fs.facets.push_back(
    on(event_spec::message(save(file(bind("name"), bind("content")))),
       [](context&, const env& e) -> values {
         return {table_set(e.at("files"), e.at("name"), e.at("content"))};
       }));
  fs.facets.push_back(on(event_spec::message(delete_(bind("name"))),
                         [](context&, const env& e) -> values {
                           return {table_remove(e.at("files"), e.at("name"))};
                         }));
  fs.facets.push_back(
    on(event_spec::asserted(observe(file(bind("name"), wild()))),
       [](context& ctx, const env& e) -> values {
         ctx.enter_state(file_cache(e.at("name")), {}, {}, "file-cache");
         return {e.at("files")};
       }));
  reactive_actor(net, {enter(fs)}, {}, "file-system");

  state_spec monitor;
  monitor.collect.push_back(collect("latest", boolean(false)));
  monitor.facets.push_back(
    on(event_spec::asserted(file(str("novel.txt"), bind("text"))),
       [](context& ctx, const env& e) -> values {
         ctx.print(e.at("text"));
         return {e.at("text")};
       }));
  monitor.terminations.push_back(when(
    event_spec::rising_edge([](const env& e) {
      return e.at("latest") == str(std::string{novel_text});
    }),
    [](context&, const env&) -> values { return {}; }));
  reactive_actor(net, {enter(monitor)}, {}, "novel-monitor");

  state_spec wait_for_store;
  wait_for_store.terminations.push_back(
    when(event_spec::asserted(observe(save(wild()))),
         [](context&, const env&) -> values { return {}; }));
  reactive_actor(
    net,
    {enter(wait_for_store),
     send(save(file(str("novel.txt"), str(std::string{novel_text}))))},
    {}, "writer");
}

// -- registry ------------------------------------------------------------------

const std::vector<scenario>& all() {
  static const std::vector<scenario> instance{
    {"bank-account-plain",
     "bank account with hand-written behaviour functions",
     build_bank_account_plain, 100},
    {"bank-account-reactive", "bank account with reactive facets",
     build_bank_account_reactive, 100},
    {"counter", "counting state ended by a rising edge at five increments",
     [](network& net) { build_counter(net, false); }, 200},
    {"counter-interrupt", "counting state ended by an interrupt message",
     [](network& net) { build_counter(net, true); }, 200},
    {"file-system-plain", "file system with one actor per cache entry",
     build_file_system_plain, 200},
    {"file-system-reactive", "file system with detached until states",
     build_file_system_reactive, 200},
  };
  return instance;
}

const scenario* find(std::string_view name) {
  for (const auto& s : all())
    if (s.name == name)
      return &s;
  return nullptr;
}

run_result run(const scenario& s, network_options opts,
               std::optional<std::size_t> max_steps) {
  network net{opts};
  s.build(net);
  if (opts.verify)
    net.verify();
  run_result out;
  out.steps = net.run_until_quiescent(max_steps.value_or(s.max_steps));
  out.trace = net.trace().to_ndjson();
  out.final_aggregate = net.aggregate();
  return out;
}

// -- trace analysis ------------------------------------------------------------

std::vector<assertion_set> snapshots(const std::vector<trace_entry>& trace,
                                     const pattern& lens) {
  std::map<std::string, assertion_set> per_actor;
  assertion_bag bag;
  std::vector<assertion_set> out{assertion_set{}};
  for (const auto& e : trace) {
    if (e.kind != trace_kind::patch_out)
      continue;
    auto p = patch_from_json(e.data);
    auto& mine = per_actor[e.actor];
    for (const auto& a : p.removed)
      if (mine.erase(a) && --bag[a] == 0)
        bag.erase(a);
    for (const auto& a : p.added)
      if (mine.insert(a).second)
        ++bag[a];
    assertion_set view;
    for (const auto& [a, n] : bag)
      if (overlaps(lens, a))
        view.insert(view.end(), a);
    if (view != out.back())
      out.push_back(std::move(view));
  }
  return out;
}

bool traces_equivalent(const std::vector<trace_entry>& a,
                       const std::vector<trace_entry>& b,
                       const pattern& lens) {
  return snapshots(a, lens) == snapshots(b, lens);
}

std::vector<value> printed_by(const std::vector<trace_entry>& trace,
                              std::string_view actor) {
  std::vector<value> out;
  for (const auto& e : trace)
    if (e.kind == trace_kind::event_message && e.actor == actor)
      out.push_back(from_json(e.data));
  return out;
}

std::vector<value> sent_messages(const std::vector<trace_entry>& trace) {
  std::vector<value> out;
  for (const auto& e : trace)
    if (e.kind == trace_kind::message)
      out.push_back(from_json(e.data));
  return out;
}

} // namespace dataspace::scenarios
