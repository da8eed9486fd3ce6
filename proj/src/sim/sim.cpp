#include "fm/sim/sim.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "fm/error.hpp"

namespace fm::sim {

namespace {

using ordered_json = nlohmann::ordered_json;

/// Cyclic trigger-creation chains terminate the step at this many firings.
constexpr int kMaxFiringsPerStep = 4096;

/// Accepts machine ids as-is, or sphere.thing paths for models whose machine
/// ids differ from the path form.
StageRef normalize_ref(const Model& m, StageRef ref) {
  if (m.find_machine(ref.machine) != nullptr) return ref;
  auto dot = ref.machine.find('.');
  if (dot != std::string::npos) {
    const Machine* mc = m.machine_at(ref.machine.substr(0, dot),
                                     ref.machine.substr(dot + 1));
    if (mc != nullptr) ref.machine = mc->id;
  }
  return ref;
}

std::string sphere_of(const Model& m, const StageRef& ref) {
  const Machine* mc = m.find_machine(ref.machine);
  return mc != nullptr ? mc->sphere : std::string();
}

/// Fills derived fields, assigns the label, applies counter rules, then
/// snapshots the counters. The caller fills kind, region, thing fields and
/// payload first.
void finish_event(const Model& m, SimState& st, Event& e) {
  e.id = st.next_event_id++;
  e.time = st.step;
  if (!e.region.empty()) {
    e.actor = sphere_of(m, e.region.front());
    e.site = sphere_of(m, e.region.back());
  }
  for (const auto& pat : st.patterns) {
    if (pattern_matches(pat, e)) {
      e.label = pat.label;
      break;
    }
  }
  for (const auto& rule : st.counter_rules) {
    if (!e.label.empty() && rule.label == e.label) ++st.counters[rule.counter];
  }
  e.counters = st.counters;
}

ThingInstance* find_thing(SimState& st, long long id) {
  for (auto& t : st.things) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

/// Ids of things at `location`, in arrival (FIFO) order.
std::vector<long long> things_at(const SimState& st, const StageRef& location) {
  std::vector<std::pair<std::uint64_t, long long>> found;
  for (const auto& t : st.things) {
    if (t.location == location) found.emplace_back(t.arrival_seq, t.id);
  }
  std::sort(found.begin(), found.end());
  std::vector<long long> ids;
  ids.reserve(found.size());
  for (const auto& [seq, id] : found) ids.push_back(id);
  return ids;
}

}  // namespace

std::string_view event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Flow: return "flow";
    case EventKind::Trigger: return "trigger";
    case EventKind::Guard: return "guard";
  }
  return "flow";
}

std::optional<EventKind> event_kind_from_name(std::string_view name) {
  for (EventKind k : {EventKind::Flow, EventKind::Trigger, EventKind::Guard}) {
    if (event_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

bool pattern_matches(const EventPattern& p, const Event& e) {
  if (p.kind && *p.kind != e.kind) return false;
  for (const auto& need : p.region) {
    if (std::find(e.region.begin(), e.region.end(), need) == e.region.end())
      return false;
  }
  return true;
}

const EventPattern* ControlGraph::find_node(std::string_view label) const {
  for (const auto& n : nodes) {
    if (n.label == label) return &n;
  }
  return nullptr;
}

SimState init_state(const Model& m, const std::vector<Placement>& initial_things) {
  SimState st;
  for (const auto& pl : initial_things) {
    StageRef at = normalize_ref(m, pl.at);
    const Machine* mc = m.find_machine(at.machine);
    if (mc == nullptr)
      throw Error("init_state: unknown machine '" + pl.at.machine + "'");
    if (mc->stages.count(at.stage) == 0)
      throw Error("init_state: machine '" + mc->id + "' does not declare stage " +
                  std::string(stage_name(at.stage)));
    ThingInstance t;
    t.id = st.next_thing_id++;
    t.thing_type = mc->thing_type;
    t.location = at;
    t.payload = pl.payload;
    t.stored = pl.stored;
    t.origin = mc->sphere;
    t.arrival_seq = st.next_seq++;
    t.fresh = true;
    st.things.push_back(std::move(t));
  }
  return st;
}

SimState init_state(const Model& m, const Scenario& scenario) {
  SimState st = init_state(m, scenario.placements);
  for (const auto& def : scenario.counters) {
    st.counters[def.name] = def.initial;
    if (def.counts_label)
      st.counter_rules.push_back(CounterRule{def.name, *def.counts_label});
  }
  for (EventPattern pat : scenario.control.nodes) {
    for (auto& ref : pat.region) ref = normalize_ref(m, ref);
    st.patterns.push_back(std::move(pat));
  }
  return st;
}

std::vector<Event> step(const Model& m, SimState& st) {
  ++st.step;
  std::vector<Event> events;
  std::set<long long> moved;

  // Flow phase: machines in declaration order, things in FIFO order, first
  // declared arc out of the thing's stage wins.
  for (const auto& mc : m.machines) {
    std::vector<std::pair<std::uint64_t, long long>> here;
    for (const auto& t : st.things) {
      if (t.location.machine == mc.id) here.emplace_back(t.arrival_seq, t.id);
    }
    std::sort(here.begin(), here.end());
    for (const auto& [seq, id] : here) {
      if (moved.count(id) != 0) continue;
      ThingInstance* t = find_thing(st, id);
      if (t == nullptr || t->stored) continue;
      const FlowArc* out = nullptr;
      for (const auto& arc : m.flows) {
        if (arc.src == t->location) {
          out = &arc;
          break;
        }
      }
      if (out == nullptr) continue;
      if (m.find_machine(out->dst.machine) == nullptr) continue;
      t->location = out->dst;
      t->arrival_seq = st.next_seq++;
      t->fresh = true;
      moved.insert(id);

      Event e;
      e.kind = EventKind::Flow;
      e.region = {out->src, out->dst};
      e.thing = t->id;
      e.thing_type = t->thing_type;
      e.origin = t->origin;
      e.payload = t->payload;
      finish_event(m, st, e);
      events.push_back(std::move(e));
    }
  }

  // Trigger phase: fixpoint over fresh things. Each (arc, thing) pair gets
  // one attempt per step; the guard is evaluated at that moment, so firings
  // earlier in the step are already counted.
  std::set<std::pair<std::string, long long>> attempted;
  std::set<long long> activated;
  int firings = 0;
  bool progress = true;
  while (progress && firings < kMaxFiringsPerStep) {
    progress = false;
    for (const auto& arc : m.triggers) {
      for (long long id : things_at(st, arc.src)) {
        if (firings >= kMaxFiringsPerStep) break;
        ThingInstance* t = find_thing(st, id);
        if (t == nullptr || !t->fresh) continue;
        auto key = std::make_pair(arc.id, id);
        if (attempted.count(key) != 0) continue;
        attempted.insert(key);
        progress = true;
        if (arc.guard && !arc.guard->eval(st.counters)) continue;
        const Machine* dst_mc = m.find_machine(arc.dst.machine);
        if (dst_mc == nullptr) continue;
        ++firings;

        EventKind kind = arc.guard ? EventKind::Guard : EventKind::Trigger;
        if (arc.dst.stage == Stage::Create) {
          ThingInstance fresh_thing;
          fresh_thing.id = st.next_thing_id++;
          fresh_thing.thing_type = dst_mc->thing_type;
          fresh_thing.location = arc.dst;
          fresh_thing.payload = t->payload;
          fresh_thing.origin = sphere_of(m, arc.src);
          fresh_thing.arrival_seq = st.next_seq++;
          fresh_thing.fresh = true;

          Event e;
          e.kind = kind;
          e.region = {arc.src, arc.dst};
          e.thing = fresh_thing.id;
          e.thing_type = fresh_thing.thing_type;
          e.origin = fresh_thing.origin;
          e.payload = fresh_thing.payload;
          st.things.push_back(std::move(fresh_thing));
          finish_event(m, st, e);
          events.push_back(std::move(e));
        } else {
          // Activation: the destination's things become fresh again, at most
          // once per thing per step. Nothing is created or moved.
          for (long long dst_id : things_at(st, arc.dst)) {
            if (activated.count(dst_id) != 0) continue;
            activated.insert(dst_id);
            if (ThingInstance* dst_t = find_thing(st, dst_id))
              dst_t->fresh = true;
          }
          Event e;
          e.kind = kind;
          e.region = {arc.src, arc.dst};
          e.thing = t->id;
          e.thing_type = t->thing_type;
          e.origin = t->origin;
          e.payload = t->payload;
          finish_event(m, st, e);
          events.push_back(std::move(e));
        }
      }
    }
  }

  for (auto& t : st.things) t.fresh = false;
  return events;
}

Trace run(const Model& m, SimState& st, long long max_steps) {
  Trace trace;
  for (long long i = 0; i < max_steps; ++i) {
    std::vector<Event> events = step(m, st);
    if (events.empty()) break;
    for (auto& e : events) trace.events.push_back(std::move(e));
  }
  return trace;
}

namespace {

ordered_json event_to_json(const Event& e) {
  ordered_json j;
  j["id"] = e.id;
  j["time"] = e.time;
  j["kind"] = std::string(event_kind_name(e.kind));
  j["label"] = e.label;
  ordered_json region = ordered_json::array();
  for (const auto& r : e.region) {
    ordered_json ref;
    ref["machine"] = r.machine;
    ref["stage"] = std::string(stage_name(r.stage));
    region.push_back(std::move(ref));
  }
  j["region"] = std::move(region);
  j["thing"] = e.thing;
  j["thing_type"] = e.thing_type;
  j["origin"] = e.origin;
  j["actor"] = e.actor;
  j["site"] = e.site;
  j["payload"] = e.payload;
  j["counters"] = e.counters;
  return j;
}

Event event_from_json(const ordered_json& j) {
  Event e;
  e.id = j.at("id").get<long long>();
  e.time = j.at("time").get<long long>();
  auto kind = event_kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw Error("trace: unknown event kind");
  e.kind = *kind;
  e.label = j.at("label").get<std::string>();
  for (const auto& ref : j.at("region")) {
    auto stage = stage_from_name(ref.at("stage").get<std::string>());
    if (!stage) throw Error("trace: unknown stage in region");
    e.region.push_back(StageRef{ref.at("machine").get<std::string>(), *stage});
  }
  e.thing = j.at("thing").get<long long>();
  e.thing_type = j.at("thing_type").get<std::string>();
  e.origin = j.at("origin").get<std::string>();
  e.actor = j.at("actor").get<std::string>();
  e.site = j.at("site").get<std::string>();
  e.payload = j.at("payload").get<std::map<std::string, std::string>>();
  e.counters = j.at("counters").get<std::map<std::string, long long>>();
  return e;
}

}  // namespace

std::string trace_to_jsonl(const Trace& trace) {
  std::string out;
  for (const auto& e : trace.events) {
    out += event_to_json(e).dump();
    out += '\n';
  }
  return out;
}

Trace trace_from_jsonl(const std::string& text) {
  Trace trace;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string line = nl == std::string::npos
                           ? text.substr(start)
                           : text.substr(start, nl - start);
    start = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw Error("trace: line " + std::to_string(line_no) + " is not JSON");
    try {
      trace.events.push_back(event_from_json(j));
    } catch (const ordered_json::exception& ex) {
      throw Error("trace: line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return trace;
}

}  // namespace fm::sim
