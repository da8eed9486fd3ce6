#include "fm/sim/control.hpp"

namespace fm::sim {

ConformanceReport conforms(const Trace& trace, const ControlGraph& graph) {
  ConformanceReport report;
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    const Event& e = trace.events[i];
    for (const auto& node : graph.nodes) {
      if (!pattern_matches(node, e)) continue;
      for (const auto& edge : graph.edges) {
        if (edge.to != node.label) continue;
        const EventPattern* from = graph.find_node(edge.from);
        if (from == nullptr) continue;
        bool satisfied = false;
        for (std::size_t k = 0; k < i && !satisfied; ++k) {
          const Event& earlier = trace.events[k];
          if (!pattern_matches(*from, earlier)) continue;
          if (edge.guard && !edge.guard->eval(earlier.counters)) continue;
          satisfied = true;
        }
        if (!satisfied) {
          report.ok = false;
          report.violating_event_id = e.id;
          report.violating_label = node.label;
          report.expected = edge.from;
          report.message = "event " + std::to_string(e.id) + " (" + node.label +
                           ") has no preceding " + edge.from +
                           (edge.guard ? " with " + edge.guard->text() : "");
          return report;
        }
      }
    }
  }
  return report;
}

}  // namespace fm::sim
