#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>

#include "fm/assemble.hpp"
#include "fm/dsl/parse.hpp"
#include "fm/error.hpp"
#include "fm/model.hpp"
#include "fm/sim/control.hpp"
#include "fm/sim/sim.hpp"
#include "fm/validate.hpp"
#include "support/io.hpp"

using namespace fm;
using namespace fm::sim;

namespace {

Model load_model(const std::string& name) {
  auto r = dsl::parse_model(testio::slurp(testio::fixture(name)), name);
  REQUIRE(r.ok());
  return std::move(*r.value);
}

Scenario load_scenario(const std::string& name) {
  auto r = dsl::parse_scenario(testio::slurp(testio::fixture(name)), name);
  REQUIRE(r.ok());
  return std::move(*r.value);
}

/// Labels of the labeled events, in trace order.
std::vector<std::string> labels(const Trace& t) {
  std::vector<std::string> out;
  for (const auto& e : t.events) {
    if (!e.label.empty()) out.push_back(e.label);
  }
  return out;
}

Model chain_model() {
  return assemble({
      AddSphere{"a", "", SphereKind::Entity, {}},
      AddMachine{"", "a", "t", {Stage::Create, Stage::Release, Stage::Transfer}},
      AddFlow{"", {"a.t", Stage::Create}, {"a.t", Stage::Release}},
      AddFlow{"", {"a.t", Stage::Release}, {"a.t", Stage::Transfer}},
  });
}

}  // namespace

TEST_CASE("init_state places things and rejects bad placements") {
  Model m = chain_model();
  SimState st = init_state(
      m, {Placement{{"a.t", Stage::Create}, {{"k", "v"}}, false}});
  REQUIRE(st.things.size() == 1);
  CHECK(st.things[0].location.machine == "a.t");
  CHECK(st.things[0].thing_type == "t");
  CHECK(st.things[0].origin == "a");
  CHECK(st.things[0].payload.at("k") == "v");
  CHECK(st.things[0].fresh);

  CHECK_THROWS_AS(init_state(m, {Placement{{"ghost", Stage::Create}, {}, false}}),
                  Error);
  CHECK_THROWS_AS(init_state(m, {Placement{{"a.t", Stage::Process}, {}, false}}),
                  Error);
}

TEST_CASE("placements accept sphere.thing paths for renamed machines") {
  Model m = assemble({
      AddSphere{"a", "", SphereKind::Entity, {}},
      AddMachine{"box", "a", "t", {Stage::Create, Stage::Release}},
      AddFlow{"", {"box", Stage::Create}, {"box", Stage::Release}},
  });
  SimState st = init_state(m, {Placement{{"a.t", Stage::Create}, {}, false}});
  REQUIRE(st.things.size() == 1);
  CHECK(st.things[0].location.machine == "box");
}

TEST_CASE("flow moves one hop per step and stops at the chain end") {
  Model m = chain_model();
  SimState st = init_state(m, {Placement{{"a.t", Stage::Create}, {}, false}});

  auto s1 = step(m, st);
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].kind == EventKind::Flow);
  CHECK(s1[0].time == 1);
  CHECK(st.things[0].location.stage == Stage::Release);

  auto s2 = step(m, st);
  REQUIRE(s2.size() == 1);
  CHECK(st.things[0].location.stage == Stage::Transfer);

  auto s3 = step(m, st);  // Transfer has no outgoing arc here
  CHECK(s3.empty());
}

TEST_CASE("things move in FIFO order and the first declared arc wins") {
  Model m = assemble({
      AddSphere{"a", "", SphereKind::Entity, {}},
      AddMachine{"", "a", "t",
                 {Stage::Create, Stage::Process, Stage::Release}},
      AddFlow{"", {"a.t", Stage::Create}, {"a.t", Stage::Release}},
      AddFlow{"", {"a.t", Stage::Create}, {"a.t", Stage::Process}},
  });
  SimState st = init_state(m, {Placement{{"a.t", Stage::Create}, {}, false},
                               Placement{{"a.t", Stage::Create}, {}, false}});
  auto events = step(m, st);
  REQUIRE(events.size() == 2);
  CHECK(events[0].thing == 0);  // earlier arrival moves first
  CHECK(events[1].thing == 1);
  // Both took the first declared arc, Create -> Release.
  CHECK(st.things[0].location.stage == Stage::Release);
  CHECK(st.things[1].location.stage == Stage::Release);
}

TEST_CASE("stored things hold their place but can still trigger") {
  Model m = assemble({
      AddSphere{"a", "", SphereKind::Entity, {}},
      AddSphere{"b", "", SphereKind::Entity, {}},
      AddMachine{"", "a", "t", {Stage::Create, Stage::Release}},
      AddMachine{"", "b", "u", {Stage::Create}},
      AddFlow{"", {"a.t", Stage::Create}, {"a.t", Stage::Release}},
      AddTrigger{"", {"a.t", Stage::Create}, {"b.u", Stage::Create}, {}},
  });
  SimState st =
      init_state(m, {Placement{{"a.t", Stage::Create}, {{"tag", "x"}}, true}});

  auto s1 = step(m, st);
  REQUIRE(s1.size() == 1);  // no flow event, just the trigger firing
  CHECK(s1[0].kind == EventKind::Trigger);
  CHECK(st.things[0].location.stage == Stage::Create);  // never moved
  REQUIRE(st.things.size() == 2);
  CHECK(st.things[1].thing_type == "u");
  CHECK(st.things[1].payload.at("tag") == "x");  // payload copied
  CHECK(st.things[1].origin == "a");             // origin = source sphere

  CHECK(step(m, st).empty());  // staleness ends the activity
}

TEST_CASE("activation re-freshens parked things, once per step") {
  Model m = assemble({
      AddSphere{"a", "", SphereKind::Entity, {}},
      AddSphere{"d", "", SphereKind::Entity, {}},
      AddSphere{"b", "", SphereKind::Entity, {}},
      AddSphere{"c", "", SphereKind::Entity, {}},
      AddMachine{"", "a", "t", {Stage::Create, Stage::Release, Stage::Transfer}},
      AddMachine{"", "d", "t", {Stage::Receive, Stage::Process}},
      AddMachine{"", "b", "u", {Stage::Process}},
      AddMachine{"", "c", "w", {Stage::Create}},
      AddFlow{"", {"a.t", Stage::Create}, {"a.t", Stage::Release}},
      AddFlow{"", {"a.t", Stage::Release}, {"a.t", Stage::Transfer}},
      AddFlow{"", {"a.t", Stage::Transfer}, {"d.t", Stage::Receive}},
      AddFlow{"", {"d.t", Stage::Receive}, {"d.t", Stage::Process}},
      AddTrigger{"", {"d.t", Stage::Process}, {"b.u", Stage::Process}, {}},
      AddTrigger{"", {"b.u", Stage::Process}, {"c.w", Stage::Create}, {}},
  });
  REQUIRE(validate(m).ok());
  SimState st = init_state(m, {Placement{{"a.t", Stage::Create}, {}, false},
                               Placement{{"b.u", Stage::Process}, {}, false}});
  Trace t = run(m, st, 50);

  // The parked thing fires its trigger at step 1 (freshly placed), stays
  // silent while the traveller crosses, then fires again at step 4 when the
  // activation trigger marks it fresh.
  std::vector<long long> create_times;
  for (const auto& e : t.events) {
    if (e.region.back().machine == "c.w") create_times.push_back(e.time);
  }
  CHECK(create_times == std::vector<long long>{1, 4});
  CHECK(st.things.size() == 4);

  // The activation event itself carries the triggering thing, not a new one.
  const Event* activation = nullptr;
  for (const auto& e : t.events) {
    if (e.region.back().machine == "b.u") activation = &e;
  }
  REQUIRE(activation != nullptr);
  CHECK(activation->kind == EventKind::Trigger);
  CHECK(activation->thing == 0);  // the traveller
  CHECK(activation->time == 4);
}

TEST_CASE("guards are evaluated once, at the attempt moment") {
  auto build = [](bool blocked_first) {
    std::vector<Directive> dirs = {
        AddSphere{"a", "", SphereKind::Entity, {}},
        AddSphere{"b", "", SphereKind::Entity, {}},
        AddSphere{"c", "", SphereKind::Entity, {}},
        AddMachine{"", "a", "t", {Stage::Create, Stage::Process}},
        AddMachine{"", "b", "u", {Stage::Create}},
        AddMachine{"", "c", "w", {Stage::Create}},
        AddFlow{"", {"a.t", Stage::Create}, {"a.t", Stage::Process}},
    };
    AddTrigger guarded{"tg",
                       {"a.t", Stage::Process},
                       {"b.u", Stage::Create},
                       Guard::counter_cmp("n", Guard::Cmp::Eq, 1)};
    AddTrigger counting{"tc", {"a.t", Stage::Process}, {"c.w", Stage::Create}, {}};
    if (blocked_first) {
      dirs.push_back(guarded);
      dirs.push_back(counting);
    } else {
      dirs.push_back(counting);
      dirs.push_back(guarded);
    }
    return assemble(dirs);
  };
  auto prime = [](const Model& m) {
    SimState st = init_state(m, {Placement{{"a.t", Stage::Create}, {}, false}});
    st.patterns.push_back(
        EventPattern{"made", {}, {{"c.w", Stage::Create}}});
    st.counter_rules.push_back(CounterRule{"n", "made"});
    return st;
  };

  // Guard first: attempted while n == 0, and that attempt is not replayed
  // after the counting trigger raises n within the same step.
  Model m1 = build(true);
  SimState st1 = prime(m1);
  step(m1, st1);
  CHECK(st1.counters.at("n") == 1);
  CHECK(std::none_of(st1.things.begin(), st1.things.end(),
                     [](const ThingInstance& t) { return t.thing_type == "u"; }));

  // Counting first: by the guard's attempt n is already 1, so it fires.
  Model m2 = build(false);
  SimState st2 = prime(m2);
  step(m2, st2);
  CHECK(std::any_of(st2.things.begin(), st2.things.end(),
                    [](const ThingInstance& t) { return t.thing_type == "u"; }));
}

TEST_CASE("cyclic creation chains stop at the firing cap") {
  Model m = assemble({
      AddSphere{"a", "", SphereKind::Entity, {}},
      AddMachine{"", "a", "t", {Stage::Create}},
      AddTrigger{"", {"a.t", Stage::Create}, {"a.t", Stage::Create}, {}},
  });
  SimState st = init_state(m, {Placement{{"a.t", Stage::Create}, {}, false}});
  auto events = step(m, st);
  CHECK(events.size() == 4096);
  CHECK(st.things.size() == 4097);
  CHECK(step(m, st).empty());  // everything is stale next step
}

TEST_CASE("electricity chain quiesces after eight hops") {
  Model m = load_model("electricity.fm");
  SimState st =
      init_state(m, {Placement{{"ps.electricity", Stage::Create}, {}, false}});
  Trace t = run(m, st, 100);
  REQUIRE(t.events.size() == 8);
  for (const auto& e : t.events) CHECK(e.kind == EventKind::Flow);
  for (std::size_t i = 0; i < t.events.size(); ++i)
    CHECK(t.events[i].time == static_cast<long long>(i + 1));
  CHECK(t.events.back().region.back().machine == "home.electricity");
  CHECK(st.things.size() == 1);  // flow conserves things
  CHECK(st.things[0].location.stage == Stage::Arrive);
}

TEST_CASE("healthcare success run hits every milestone in order") {
  Model m = load_model("healthcare.fm");
  REQUIRE(validate(m).ok());
  SimState st = init_state(m, load_scenario("healthcare_success.fms"));
  CHECK(st.counters.at("max_fails") == 0);
  CHECK(st.counters.at("block_data") == 1);

  Trace t = run(m, st, 200);
  CHECK(labels(t) == std::vector<std::string>{"E1", "E2", "E3", "E4",
                                              "login_attempt", "E7", "E8"});
  // E1 is an unguarded trigger, E2 a guarded one; both fire off one reading.
  const Event* e1 = nullptr;
  const Event* e2 = nullptr;
  for (const auto& e : t.events) {
    if (e.label == "E1") e1 = &e;
    if (e.label == "E2") e2 = &e;
  }
  REQUIRE(e1 != nullptr);
  REQUIRE(e2 != nullptr);
  CHECK(e1->kind == EventKind::Trigger);
  CHECK(e2->kind == EventKind::Guard);
  CHECK(e1->time == e2->time);
}

TEST_CASE("healthcare lockout run fails three times then blocks") {
  Model m = load_model("healthcare.fm");
  SimState st = init_state(m, load_scenario("healthcare_fail3.fms"));
  Trace t = run(m, st, 200);
  CHECK(labels(t) ==
        std::vector<std::string>{"E1", "E2", "E3", "E4", "login_attempt", "E5",
                                 "login_attempt", "E5", "login_attempt", "E5",
                                 "E6"});
  // The block cascades within the same step as the third failure.
  const Event* third_e5 = nullptr;
  const Event* e6 = nullptr;
  int e5_count = 0;
  for (const auto& e : t.events) {
    if (e.label == "E5" && ++e5_count == 3) third_e5 = &e;
    if (e.label == "E6") e6 = &e;
  }
  REQUIRE(third_e5 != nullptr);
  REQUIRE(e6 != nullptr);
  CHECK(third_e5->time == e6->time);
  CHECK(third_e5->counters.at("fails") == 3);

  // Things are created only by placement or Create triggers.
  long long creations = 0;
  for (const auto& e : t.events) {
    if (e.kind != EventKind::Flow && e.region.back().stage == Stage::Create)
      ++creations;
  }
  CHECK(static_cast<long long>(st.things.size()) == 1 + creations);
}

TEST_CASE("traces serialize to JSONL and back without loss") {
  Model m = load_model("healthcare.fm");
  SimState st = init_state(m, load_scenario("healthcare_fail3.fms"));
  Trace t = run(m, st, 200);
  REQUIRE_FALSE(t.events.empty());

  std::string text = trace_to_jsonl(t);
  Trace back = trace_from_jsonl(text);
  CHECK(back == t);
  CHECK(trace_to_jsonl(back) == text);

  CHECK_THROWS_AS(trace_from_jsonl("not json\n"), Error);
  CHECK_THROWS_AS(trace_from_jsonl("{\"id\":0}\n"), Error);
  try {
    trace_from_jsonl(text + "broken\n");
    FAIL("expected Error");
  } catch (const Error& e) {
    // The error names the offending line.
    CHECK(std::string(e.what()).find(
              std::to_string(t.events.size() + 1)) != std::string::npos);
  }
}

TEST_CASE("two runs of the same scenario produce identical bytes") {
  Model m = load_model("healthcare.fm");
  Scenario sc = load_scenario("healthcare_fail3.fms");
  SimState a = init_state(m, sc);
  SimState b = init_state(m, sc);
  CHECK(trace_to_jsonl(run(m, a, 200)) == trace_to_jsonl(run(m, b, 200)));
}

TEST_CASE("conformance accepts both healthcare runs") {
  Model m = load_model("healthcare.fm");
  for (const char* name : {"healthcare_success.fms", "healthcare_fail3.fms"}) {
    Scenario sc = load_scenario(name);
    SimState st = init_state(m, sc);
    Trace t = run(m, st, 200);
    ConformanceReport r = conforms(t, sc.control);
    CHECK_MESSAGE(r.ok, name << ": " << r.message);
  }
}

TEST_CASE("conformance pinpoints a missing predecessor") {
  Model m = load_model("healthcare.fm");
  Scenario sc = load_scenario("healthcare_success.fms");
  SimState st = init_state(m, sc);
  Trace t = run(m, st, 200);

  // Drop the feedback-creation event; E3 then has no E1 before it.
  Trace cut = t;
  cut.events.erase(std::remove_if(cut.events.begin(), cut.events.end(),
                                  [](const Event& e) { return e.label == "E1"; }),
                   cut.events.end());
  ConformanceReport r = conforms(cut, sc.control);
  REQUIRE_FALSE(r.ok);
  CHECK(r.violating_label == "E3");
  CHECK(r.expected == "E1");
  const Event* e3 = nullptr;
  for (const auto& e : t.events) {
    if (e.label == "E3") e3 = &e;
  }
  REQUIRE(e3 != nullptr);
  CHECK(r.violating_event_id == e3->id);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("conformance edge guards read the predecessor's counters") {
  Model m = load_model("healthcare.fm");
  Scenario sc = load_scenario("healthcare_fail3.fms");
  SimState st = init_state(m, sc);
  Trace t = run(m, st, 200);

  // Remove the third failure: E6 keeps earlier E5s, but none carries
  // fails == 3, so the guarded edge is unsatisfied.
  Trace cut = t;
  int seen = 0;
  cut.events.erase(std::remove_if(cut.events.begin(), cut.events.end(),
                                  [&seen](const Event& e) {
                                    return e.label == "E5" && ++seen == 3;
                                  }),
                   cut.events.end());
  ConformanceReport r = conforms(cut, sc.control);
  REQUIRE_FALSE(r.ok);
  CHECK(r.violating_label == "E6");
  CHECK(r.expected == "E5");
}

TEST_CASE("events matching no node are unconstrained") {
  ControlGraph g;
  g.nodes.push_back(EventPattern{"X", {}, {{"nowhere", Stage::Create}}});
  g.edges.push_back(ControlEdge{"X", "X", {}});
  Model m = chain_model();
  SimState st = init_state(m, {Placement{{"a.t", Stage::Create}, {}, false}});
  Trace t = run(m, st, 10);
  CHECK(conforms(t, g).ok);
}
