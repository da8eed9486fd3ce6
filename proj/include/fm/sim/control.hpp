#pragma once

#include <string>

#include "fm/sim/sim.hpp"

namespace fm::sim {

/// Result of replaying a trace against a control graph.
struct ConformanceReport {
  bool ok = true;
  long long violating_event_id = -1;
  std::string violating_label;
  std::string expected;  // the label that should have come before
  std::string message;

  friend bool operator==(const ConformanceReport&,
                         const ConformanceReport&) = default;
};

/// Checks every event against the graph: for each event matching a node with
/// incoming edges, some earlier event must match the edge's source and the
/// edge guard must hold on that earlier event's counter snapshot. Events
/// matching no node are unconstrained. Stops at the first violation.
ConformanceReport conforms(const Trace& trace, const ControlGraph& graph);

}  // namespace fm::sim
