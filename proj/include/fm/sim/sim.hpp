#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fm/model.hpp"

namespace fm::sim {

enum class EventKind { Flow, Trigger, Guard };

std::string_view event_kind_name(EventKind k);
std::optional<EventKind> event_kind_from_name(std::string_view name);

/// One token. `stored` marks at-rest data: it keeps its place instead of
/// flowing, but stays visible to triggers on arrival.
struct ThingInstance {
  long long id = 0;
  std::string thing_type;
  StageRef location;
  std::map<std::string, std::string> payload;
  bool stored = false;
  /// Sphere the thing causally comes from: the placement sphere, or the
  /// sphere of the trigger source that created it.
  std::string origin;
  std::uint64_t arrival_seq = 0;
  bool fresh = false;

  friend bool operator==(const ThingInstance&, const ThingInstance&) = default;
};

/// Something that happened during a step: a movement (Flow), an unguarded
/// trigger firing (Trigger), or a guarded one (Guard). region is [src, dst].
/// counters snapshot the state right after the event's own counting applied,
/// so precedence guards can be checked on a serialized trace alone.
struct Event {
  long long id = 0;
  long long time = 0;
  EventKind kind = EventKind::Flow;
  std::string label;
  std::vector<StageRef> region;
  long long thing = 0;
  std::string thing_type;
  std::string origin;  // origin sphere of the thing
  std::string actor;   // sphere of the src machine
  std::string site;    // sphere of the dst machine
  std::map<std::string, std::string> payload;
  std::map<std::string, long long> counters;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Labels events: matches when every (machine, stage) pair in `region` is
/// contained in the event's region and the kind filter (if any) agrees.
struct EventPattern {
  std::string label;
  std::optional<EventKind> kind;
  std::vector<StageRef> region;

  friend bool operator==(const EventPattern&, const EventPattern&) = default;
};

bool pattern_matches(const EventPattern& p, const Event& e);

/// Counts events carrying `label` into `counter`, applied at emission time.
struct CounterRule {
  std::string counter;
  std::string label;

  friend bool operator==(const CounterRule&, const CounterRule&) = default;
};

struct Placement {
  StageRef at;
  std::map<std::string, std::string> payload;
  bool stored = false;

  friend bool operator==(const Placement&, const Placement&) = default;
};

struct CounterDef {
  std::string name;
  long long initial = 0;
  std::optional<std::string> counts_label;

  friend bool operator==(const CounterDef&, const CounterDef&) = default;
};

struct ControlEdge {
  std::string from;
  std::string to;
  std::optional<Guard> guard;

  friend bool operator==(const ControlEdge&, const ControlEdge&) = default;
};

/// Precedence graph over event patterns: every occurrence of an edge's `to`
/// must be preceded by an occurrence of `from` whose counter snapshot
/// satisfies the edge guard.
struct ControlGraph {
  std::vector<EventPattern> nodes;
  std::vector<ControlEdge> edges;

  const EventPattern* find_node(std::string_view label) const;

  friend bool operator==(const ControlGraph&, const ControlGraph&) = default;
};

struct Scenario {
  std::string name;
  std::vector<Placement> placements;
  std::vector<CounterDef> counters;
  ControlGraph control;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct SimState {
  long long step = 0;
  std::vector<ThingInstance> things;
  std::map<std::string, long long> counters;
  std::uint64_t rng_seed = 0;  // reserved for stochastic extensions

  // Engine bookkeeping carried with the state so step() stays two-argument.
  std::vector<EventPattern> patterns;
  std::vector<CounterRule> counter_rules;
  long long next_thing_id = 0;
  long long next_event_id = 0;
  std::uint64_t next_seq = 0;
};

struct Trace {
  std::vector<Event> events;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Places the initial things (all marked fresh). Throws fm::Error when a
/// placement names an unknown machine or a stage it does not declare.
SimState init_state(const Model& m, const std::vector<Placement>& initial_things);

/// init_state plus the scenario's counters, counter rules, and patterns.
SimState init_state(const Model& m, const Scenario& scenario);

/// One deterministic step. Flow phase first: machines in declaration order,
/// things within a machine in FIFO arrival order, a thing takes the first
/// declared arc out of its stage and moves at most once. Trigger phase after:
/// each trigger fires once per fresh thing at its source (guards see the
/// post-movement counters); dst Create makes a new thing, dst Process marks
/// the things there fresh. Newly created things cascade within the step, with
/// a firing cap so cyclic creation chains terminate.
std::vector<Event> step(const Model& m, SimState& state);

/// Repeats step() until a step emits nothing or max_steps is reached.
Trace run(const Model& m, SimState& state, long long max_steps);

/// JSON lines, one event per line, stable key order.
std::string trace_to_jsonl(const Trace& trace);
Trace trace_from_jsonl(const std::string& text);

}  // namespace fm::sim
