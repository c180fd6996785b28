#include "dataspace/codec.hpp"
#include "dataspace/reactive.hpp"
#include "dataspace/scenarios.hpp"

#include <doctest.h>

using namespace dataspace;
using namespace dataspace::reactive;

namespace {

state_spec counting_spec() {
  state_spec s;
  s.collect.push_back(collect("count", num(0)));
  s.facets.push_back(asserting(
    [](const env& e) { return rec("incrs-seen-so-far", {e.at("count")}); }));
  s.facets.push_back(on(event_spec::message(sym("incr")),
                        [](context&, const env& e) -> values {
                          return {num(e.at("count").as_integer() + 1)};
                        }));
  s.terminations.push_back(
    when(event_spec::rising_edge(
           [](const env& e) { return e.at("count").as_integer() >= 5; }),
         [](context& ctx, const env& e) -> values {
           ctx.send(sym("too-many"));
           return {e.at("count")};
         }));
  return s;
}

event msg(value v) {
  return message_event{std::move(v)};
}

event added(assertion_set s) {
  return patch_event{{std::move(s), {}}};
}

std::vector<patch> patches_in(const std::vector<action>& acts) {
  std::vector<patch> out;
  for (const auto& a : acts)
    if (auto* p = std::get_if<patch_action>(&a))
      out.push_back(p->patch);
  return out;
}

std::vector<value> sent_in(const std::vector<action>& acts) {
  std::vector<value> out;
  for (const auto& a : acts)
    if (auto* m = std::get_if<message_action>(&a))
      out.push_back(m->body);
  return out;
}

std::vector<value> printed(const network& net) {
  std::vector<value> out;
  for (const auto& e : net.trace().entries())
    if (e.kind == trace_kind::event_message)
      out.push_back(from_json(e.data));
  return out;
}

bool crashed_with(const network& net, std::string_view what) {
  for (const auto& e : net.trace().entries())
    if (e.kind == trace_kind::crash
        && e.data.get<std::string>().find(what) != std::string::npos)
      return true;
  return false;
}

/// Plain actor that sends `body` once it sees anyone interested.
void send_when_heard(network& net, value body) {
  auto beh = std::make_shared<const behaviour>(behaviour{
    [body](const event& e, const std::any& st) -> step_result {
      auto* pe = std::get_if<patch_event>(&e);
      if (!pe || pe->patch.added.empty())
        return unchanged{};
      return continue_with{st, {message_action{body}, quit_action{}}};
    },
    {}});
  net.spawn(beh, {}, {patch_action{{{observe(observe(body))}, {}}}});
}

} // namespace

TEST_CASE("mux: reference counting") {
  mux m;
  auto a = sym("a");
  auto b = sym("b");
  CHECK(m.add({a, b}) == patch{{a, b}, {}});
  CHECK(m.add({a}) == patch{});
  CHECK(m.bag().at(a) == 2);
  CHECK(m.remove({a}) == patch{});
  CHECK(m.remove({a}) == patch{{}, {a}});
  CHECK(m.asserted() == assertion_set{b});
  CHECK_THROWS(m.remove({a}));
}

TEST_CASE("mux: replace keeps shared elements") {
  mux m;
  auto a = sym("a");
  auto b = sym("b");
  auto c = sym("c");
  m.add({a, b});
  CHECK(m.replace({a, b}, {b, c}) == patch{{c}, {a}});
  CHECK(m.asserted() == assertion_set{b, c});
  CHECK(m.replace({b, c}, {b, c}) == patch{});
}

TEST_CASE("install: examples") {
  std::vector<action> out;
  context ctx{out};

  state_spec manager;
  manager.collect.push_back(collect("balance", num(0)));
  manager.facets.push_back(on(event_spec::message(rec("deposit", {bind("amount")})),
                              [](context&, const env& e) -> values {
                                return {e.at("balance")};
                              }));
  mux m1;
  state_group g1{manager, {}};
  g1.install(m1, ctx);
  CHECK(m1.asserted() == assertion_set{observe(rec("deposit", {wild()}))});

  state_spec observer;
  observer.facets.push_back(on(event_spec::asserted(rec("account", {bind("balance")})),
                               [](context&, const env&) -> values { return {}; }));
  mux m2;
  state_group g2{observer, {}};
  g2.install(m2, ctx);
  CHECK(m2.asserted() == assertion_set{observe(rec("account", {wild()}))});

  mux m3;
  state_group g3{counting_spec(), {}};
  g3.install(m3, ctx);
  CHECK(m3.asserted() == assertion_set{rec("incrs-seen-so-far", {num(0)}),
                                       observe(sym("incr"))});
  CHECK(patches_in(out).size() == 3);
}

TEST_CASE("handle_event: counter reaches five") {
  std::vector<action> out;
  context ctx{out};
  mux m;
  state_group g{counting_spec(), {}};
  REQUIRE_FALSE(g.install(m, ctx));
  for (int i = 1; i <= 4; ++i) {
    bool matched = false;
    CHECK_FALSE(g.handle_event(msg(sym("incr")), m, ctx, matched));
    CHECK(matched);
  }
  out.clear();
  bool matched = false;
  auto result = g.handle_event(msg(sym("incr")), m, ctx, matched);
  REQUIRE(result);
  CHECK(*result == values{num(5)});
  CHECK(g.collected() == values{num(5)});
  auto ps = patches_in(out);
  REQUIRE(ps.size() == 1);
  CHECK(ps[0] == patch{{rec("incrs-seen-so-far", {num(5)})},
                       {rec("incrs-seen-so-far", {num(4)})}});
  CHECK(sent_in(out) == std::vector<value>{sym("too-many")});

  out.clear();
  g.teardown(m, ctx);
  auto td = patches_in(out);
  REQUIRE(td.size() == 1);
  CHECK(td[0] == patch{{}, {rec("incrs-seen-so-far", {num(5)}),
                            observe(sym("incr"))}});
  CHECK(m.asserted().empty());
}

TEST_CASE("handle_event: updater waits for the manager's interest") {
  std::vector<action> out;
  context ctx{out};
  mux m;
  state_spec wait;
  wait.terminations.push_back(
    when(event_spec::asserted(observe(rec("deposit", {wild()}))),
         [](context&, const env&) -> values { return {}; }));
  state_group g{wait, {}};
  g.install(m, ctx);
  CHECK(m.asserted() == assertion_set{observe(observe(rec("deposit", {wild()})))});
  bool matched = false;
  auto r = g.handle_event(added({observe(rec("deposit", {wild()}))}), m, ctx,
                          matched);
  REQUIRE(r);
  CHECK(r->empty());
}

TEST_CASE("handle_event: unrelated event changes nothing") {
  std::vector<action> out;
  context ctx{out};
  mux m;
  state_group g{counting_spec(), {}};
  g.install(m, ctx);
  out.clear();
  bool matched = false;
  CHECK_FALSE(g.handle_event(msg(sym("other")), m, ctx, matched));
  CHECK_FALSE(matched);
  CHECK(out.empty());
  CHECK(g.collected() == values{num(0)});
}

TEST_CASE("teardown: shared and empty groups") {
  std::vector<action> out;
  context ctx{out};
  mux m;
  auto spec = [] {
    state_spec s;
    s.facets.push_back(on(event_spec::message(rec("deposit", {wild()})),
                          [](context&, const env&) -> values { return {}; }));
    return s;
  };
  state_group a{spec(), {}};
  state_group b{spec(), {}};
  a.install(m, ctx);
  b.install(m, ctx);
  out.clear();
  a.teardown(m, ctx);
  CHECK(patches_in(out).empty());
  CHECK(m.asserted() == assertion_set{observe(rec("deposit", {wild()}))});

  state_group none{state_spec{}, {}};
  none.install(m, ctx);
  out.clear();
  none.teardown(m, ctx);
  CHECK(patches_in(out).empty());
}

TEST_CASE("rising edge fires once per edge") {
  std::vector<action> out;
  context ctx{out};
  mux m;
  state_spec s;
  s.collect.push_back(collect("n", num(0)));
  s.facets.push_back(on(event_spec::message(sym("tick")),
                        [](context&, const env& e) -> values {
                          return {num(e.at("n").as_integer() + 1)};
                        }));
  s.facets.push_back(on(event_spec::message(sym("reset")),
                        [](context&, const env&) -> values { return {num(0)}; }));
  s.facets.push_back(on(event_spec::rising_edge([](const env& e) {
                          return e.at("n").as_integer() >= 2;
                        }),
                        [](context& ctx, const env& e) -> values {
                          ctx.print(sym("edge"));
                          return {e.at("n")};
                        }));
  state_group g{s, {}};
  g.install(m, ctx);
  auto edges = [&] {
    std::size_t n = 0;
    for (const auto& a : out)
      if (std::holds_alternative<print_action>(a))
        ++n;
    return n;
  };
  bool matched = false;
  for (int i = 0; i < 5; ++i)
    g.handle_event(msg(sym("tick")), m, ctx, matched);
  CHECK(edges() == 1);
  g.handle_event(msg(sym("reset")), m, ctx, matched);
  for (int i = 0; i < 3; ++i)
    g.handle_event(msg(sym("tick")), m, ctx, matched);
  CHECK(edges() == 2);
}

TEST_CASE("rising edge already true at install") {
  CHECK(rising_edge_fires_at_install());
  std::vector<action> out;
  context ctx{out};
  mux m;
  state_spec s;
  s.terminations.push_back(
    when(event_spec::rising_edge([](const env&) { return true; }),
         [](context&, const env&) -> values { return {sym("now")}; }));
  state_group g{s, {}};
  auto r = g.install(m, ctx);
  REQUIRE(r);
  CHECK(*r == values{sym("now")});
}

TEST_CASE("asserted fires once per matching assertion") {
  std::vector<action> out;
  context ctx{out};
  mux m;
  state_spec s;
  s.collect.push_back(collect("seen", num(0)));
  s.facets.push_back(on(event_spec::asserted(rec("item", {bind("x")})),
                        [](context&, const env& e) -> values {
                          return {num(e.at("seen").as_integer() + 1)};
                        }));
  s.facets.push_back(on(event_spec::retracted(rec("item", {bind("x")})),
                        [](context&, const env& e) -> values {
                          return {num(e.at("seen").as_integer() + 100)};
                        }));
  state_group g{s, {}};
  g.install(m, ctx);
  bool matched = false;
  g.handle_event(added({rec("item", {num(1)}), rec("item", {num(2)}),
                        rec("item", {num(3)}), rec("other", {num(4)})}),
                 m, ctx, matched);
  CHECK(g.collected() == values{num(3)});
  g.handle_event(patch_event{{{}, {rec("item", {num(1)})}}}, m, ctx, matched);
  CHECK(g.collected() == values{num(103)});
}

TEST_CASE("fold arity is enforced") {
  std::vector<action> out;
  context ctx{out};
  mux m;
  state_spec s;
  s.collect.push_back(collect("n", num(0)));
  s.facets.push_back(on(event_spec::message(sym("go")),
                        [](context&, const env&) -> values {
                          return {num(1), num(2)};
                        }));
  state_group g{s, {}};
  g.install(m, ctx);
  bool matched = false;
  CHECK_THROWS_AS(g.handle_event(msg(sym("go")), m, ctx, matched),
                  fold_arity_error);

  network net;
  reactive_actor(net, {enter(s)}, {}, "bad-fold");
  send_when_heard(net, sym("go"));
  net.run_until_quiescent(50);
  CHECK(crashed_with(net, "on-facet body returned"));
}

TEST_CASE("termination bodies may not block") {
  std::vector<action> out;
  context ctx{out};
  mux m;
  state_spec s;
  s.terminations.push_back(
    when(event_spec::message(sym("stop")),
         [](context& ctx, const env&) -> values {
           ctx.enter_state(state_spec{});
           return {};
         }));
  state_group g{s, {}};
  g.install(m, ctx);
  bool matched = false;
  CHECK_THROWS_AS(g.handle_event(msg(sym("stop")), m, ctx, matched),
                  blocking_termination);
}

TEST_CASE("reserved label is rejected") {
  auto reserved = rec(std::string{state_result_label}, {wild(), wild()});
  CHECK_THROWS_AS(event_spec::asserted(reserved), reserved_label);
  CHECK_THROWS_AS(event_spec::message(observe(reserved)), reserved_label);
  CHECK_THROWS_AS(event_spec::retracted(reserved), reserved_label);

  std::vector<action> out;
  context ctx{out};
  mux m;
  state_spec s;
  s.facets.push_back(asserting([](const env&) {
    return rec(std::string{state_result_label}, {num(1)});
  }));
  state_group g{s, {}};
  CHECK_THROWS_AS(g.install(m, ctx), reserved_label);
}

TEST_CASE("binder over a wildcard assertion crashes the actor") {
  network net;
  state_spec s;
  s.facets.push_back(on(event_spec::asserted(rec("account", {bind("b")})),
                        [](context&, const env&) -> values { return {}; }));
  reactive_actor(net, {enter(s)}, {}, "observer");
  net.spawn(std::make_shared<const behaviour>(behaviour{
              [](const event&, const std::any&) -> step_result {
                return unchanged{};
              },
              {}}),
            {}, {patch_action{{{rec("account", {wild()})}, {}}}});
  net.run_until_quiescent(50);
  CHECK(crashed_with(net, "CaptureUnbounded"));
}

TEST_CASE("reactive_actor: scripts") {
  SUBCASE("first action is the first send") {
    network net;
    scenarios::build_counter(net, false);
    net.run_until_quiescent(200);
    auto sent = scenarios::sent_messages(net.trace().entries());
    REQUIRE_FALSE(sent.empty());
    CHECK(sent.front() == sym("starting"));
    CHECK(sent.back() == sym("finished"));
    auto too_many = std::find(sent.begin(), sent.end(), sym("too-many"));
    CHECK(too_many + 1 == sent.end() - 1);
  }
  SUBCASE("empty script quits at once") {
    network net;
    auto id = reactive_actor(net, {});
    CHECK_FALSE(net.contains(id));
    const auto& es = net.trace().entries();
    REQUIRE(es.size() == 2);
    CHECK(es[0].kind == trace_kind::spawn);
    CHECK(es[1].kind == trace_kind::quit);
  }
  SUBCASE("forever never returns") {
    network net;
    state_spec s;
    s.facets.push_back(on(event_spec::message(sym("x")),
                          [](context&, const env&) -> values { return {}; }));
    auto id = reactive_actor(net, {enter(s), send(sym("after"))});
    net.run_until_quiescent(50);
    CHECK(net.contains(id));
    CHECK(scenarios::sent_messages(net.trace().entries()).empty());
  }
  SUBCASE("failing step crashes the actor") {
    network net;
    auto id = reactive_actor(net, {custom([](context&, env&) {
                               throw std::runtime_error("step failed");
                             })});
    CHECK_FALSE(net.contains(id));
    CHECK(crashed_with(net, "step failed"));
  }
}

TEST_CASE("enter_state: result flows back to the script") {
  network net;
  scenarios::build_counter(net, false);
  net.run_until_quiescent(200);
  CHECK(printed(net) == std::vector<value>{num(5)});
  bool handshake = false;
  for (const auto& e : net.trace().entries())
    if (e.kind == trace_kind::patch_out
        && e.data.dump().find(state_result_label) != std::string::npos)
      handshake = true;
  CHECK(handshake);
}

TEST_CASE("enter_state from a facet body detaches") {
  network net;
  state_spec host;
  host.collect.push_back(collect("n", num(0)));
  host.facets.push_back(on(event_spec::message(sym("go")),
                           [](context& ctx, const env& e) -> values {
                             state_spec child;
                             child.facets.push_back(asserting(
                               [](const env&) { return sym("child-alive"); }));
                             child.terminations.push_back(
                               when(event_spec::message(sym("stop")),
                                    [](context&, const env&) -> values {
                                      return {sym("done")};
                                    }));
                             ctx.enter_state(std::move(child),
                                             {print([](const env& e) {
                                               return e.at("r");
                                             })},
                                             {"r"});
                             return {num(e.at("n").as_integer() + 1)};
                           }));
  auto id = reactive_actor(net, {enter(host)}, {}, "host");
  send_when_heard(net, sym("go"));
  net.run_until_quiescent(50);
  CHECK(net.aggregate().contains(sym("child-alive")));
  send_when_heard(net, sym("stop"));
  net.run_until_quiescent(50);
  CHECK_FALSE(net.aggregate().contains(sym("child-alive")));
  CHECK(printed(net) == std::vector<value>{sym("done")});
  CHECK(net.contains(id));
}

TEST_CASE("facets stay responsive while the script is blocked") {
  network net;
  scenarios::build_counter(net, false);
  for (int i = 0; i < 6; ++i)
    net.dispatch_one();
  auto query = std::make_shared<std::vector<patch>>();
  net.spawn(std::make_shared<const behaviour>(behaviour{
              [query](const event& e, const std::any&) -> step_result {
                if (auto* p = std::get_if<patch_event>(&e))
                  query->push_back(p->patch);
                return unchanged{};
              },
              {}}),
            {}, {patch_action{{{observe(rec("incrs-seen-so-far", {wild()}))}, {}}}});
  net.run_until_quiescent(200);
  REQUIRE(query->size() >= 2);
  CHECK(query->front().added.size() == 1);
  CHECK(query->back().added.empty());
  CHECK(query->back().removed ==
        assertion_set{rec("incrs-seen-so-far", {num(5)})});
}

TEST_CASE("reactive and plain observers see the same balances") {
  network plain;
  scenarios::build_bank_account_plain(plain);
  plain.run_until_quiescent(100);
  network reactive;
  scenarios::build_bank_account_reactive(reactive);
  reactive.run_until_quiescent(100);
  CHECK(printed(plain) == std::vector<value>{num(0), num(100), num(70)});
  CHECK(printed(reactive) == printed(plain));
  CHECK(scenarios::traces_equivalent(plain.trace().entries(),
                                     reactive.trace().entries(),
                                     rec("account", {wild()})));
}

TEST_CASE("saves reach both the table and the live cache") {
  network net;
  scenarios::build_file_system_reactive(net);
  net.run_until_quiescent(200);
  auto late = std::make_shared<std::vector<patch>>();
  net.spawn(std::make_shared<const behaviour>(behaviour{
              [late](const event& e, const std::any&) -> step_result {
                if (auto* p = std::get_if<patch_event>(&e))
                  late->push_back(p->patch);
                return unchanged{};
              },
              {}}),
            {},
            {patch_action{{{observe(rec("file", {str("novel.txt"), wild()}))},
                           {}}}});
  net.run_until_quiescent(200);
  REQUIRE_FALSE(late->empty());
  CHECK(late->front().added ==
        assertion_set{rec("file", {str("novel.txt"),
                                   str(std::string{scenarios::novel_text})})});
}
