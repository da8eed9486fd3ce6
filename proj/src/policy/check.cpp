#include "fm/policy/check.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include <nlohmann/json.hpp>

namespace fm::policy {

namespace {

using ordered_json = nlohmann::ordered_json;

/// The sphere the subject lives in: their registered sphere when a registry
/// is available, else the subject id itself is taken as a sphere id.
std::string subject_sphere(const std::string& subject,
                           const pii::Registry* reg) {
  if (reg != nullptr) {
    const pii::Person* p = reg->find_person(subject);
    if (p != nullptr) return p->sphere;
  }
  return subject;
}

bool in_subject_subtree(const Model& m, const std::string& sphere,
                        const std::string& root) {
  return sphere_in_subtree(m, sphere, root);
}

/// Machines reachable from any source machine over flow and trigger arcs.
std::set<std::string> reachable_from(const Model& m,
                                     const std::set<std::string>& sources) {
  std::set<std::string> seen = sources;
  std::deque<std::string> queue(sources.begin(), sources.end());
  while (!queue.empty()) {
    std::string at = queue.front();
    queue.pop_front();
    auto follow = [&](const StageRef& src, const StageRef& dst) {
      if (src.machine != at) return;
      if (seen.insert(dst.machine).second) queue.push_back(dst.machine);
    };
    for (const auto& arc : m.flows) follow(arc.src, arc.dst);
    for (const auto& arc : m.triggers) follow(arc.src, arc.dst);
  }
  return seen;
}

std::vector<std::string> event_referents(const sim::Event& e,
                                         const PiiContext& ctx) {
  auto it = ctx.referents_override.find(e.id);
  if (it != ctx.referents_override.end()) return it->second;
  std::vector<std::string> out;
  auto tag = e.payload.find("referent");
  if (tag == e.payload.end()) return out;
  const std::string& raw = tag->second;
  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t comma = raw.find(',', start);
    std::string item = comma == std::string::npos
                           ? raw.substr(start)
                           : raw.substr(start, comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool refers_to(const sim::Event& e, const std::string& person,
               const PiiContext& ctx) {
  auto refs = event_referents(e, ctx);
  return std::find(refs.begin(), refs.end(), person) != refs.end();
}

/// Does actor's sphere belong to the restricted identity?
bool identity_matches(const IdentitySel& who, const std::string& actor,
                      const PiiContext& ctx) {
  if (actor.empty()) return false;
  if (!who.is_group) {
    if (actor == who.id) return true;
    if (ctx.registry != nullptr) {
      const pii::Person* p = ctx.registry->find_person(who.id);
      if (p != nullptr && p->sphere == actor) return true;
    }
    return false;
  }
  if (ctx.registry == nullptr) return false;
  const pii::Group* g = ctx.registry->find_group(who.id);
  if (g == nullptr) return false;
  for (const auto& member : g->members) {
    const pii::Person* p = ctx.registry->find_person(member);
    if (p != nullptr && p->sphere == actor) return true;
    if (member == actor) return true;
  }
  return false;
}

bool location_matches(const std::string& want, const sim::Event& e,
                      const PiiContext& ctx) {
  if (e.site == want) return true;
  auto tag = e.payload.find("location");
  if (tag != e.payload.end() && tag->second == want) return true;
  if (ctx.model != nullptr && !e.site.empty() &&
      in_subject_subtree(*ctx.model, e.site, want))
    return true;
  return false;
}

std::optional<std::string> payload_tag(const sim::Event& e,
                                       const std::string& key) {
  auto it = e.payload.find(key);
  if (it == e.payload.end()) return std::nullopt;
  return it->second;
}

}  // namespace

std::string_view policy_kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::CutOffSources: return "cutoff";
    case PolicyKind::SelfControlledRelease: return "self_release";
    case PolicyKind::Solitude: return "solitude";
    case PolicyKind::ContextProhibition: return "deny";
  }
  return "solitude";
}

std::vector<Violation> check_model(const Model& m, const Policy& p,
                                   const pii::Registry* reg) {
  std::vector<Violation> out;
  std::string root = subject_sphere(p.subject, reg);

  if (p.kind == PolicyKind::Solitude) {
    for (const auto& arc : m.flows) {
      const Machine* src = m.find_machine(arc.src.machine);
      const Machine* dst = m.find_machine(arc.dst.machine);
      if (src == nullptr || dst == nullptr) continue;
      bool src_in = in_subject_subtree(m, src->sphere, root);
      bool dst_in = in_subject_subtree(m, dst->sphere, root);
      if (src_in == dst_in) continue;
      Violation v;
      v.policy = p.id;
      v.evidence_kind = "arc";
      v.evidence = arc.id;
      v.explanation = "flow '" + arc.id + "' crosses the boundary of sphere '" +
                      root + "' (" + to_string(arc.src) + " -> " +
                      to_string(arc.dst) + "), so " + p.subject +
                      " is not left alone";
      out.push_back(std::move(v));
    }
    return out;
  }

  if (p.kind == PolicyKind::CutOffSources) {
    std::set<std::string> sources;
    for (const auto& mc : m.machines) {
      if (!in_subject_subtree(m, mc.sphere, root)) continue;
      if (mc.thing_type == "signal" || mc.thing_type == "data")
        sources.insert(mc.id);
    }
    if (sources.empty()) return out;
    std::set<std::string> reached = reachable_from(m, sources);
    auto flag = [&](const std::string& arc_id, const StageRef& src,
                    const StageRef& dst, std::string_view arc_word) {
      if (dst.stage != Stage::Create) return;
      const Machine* dst_mc = m.find_machine(dst.machine);
      if (dst_mc == nullptr || dst_mc->thing_type != p.identifier_type) return;
      if (reached.count(src.machine) == 0) return;
      Violation v;
      v.policy = p.id;
      v.evidence_kind = "arc";
      v.evidence = arc_id;
      v.explanation = std::string(arc_word) + " '" + arc_id +
                      "' turns signals traceable to '" + p.subject +
                      "' into a durable " + p.identifier_type + " at " +
                      to_string(dst);
      out.push_back(std::move(v));
    };
    for (const auto& arc : m.triggers) flag(arc.id, arc.src, arc.dst, "trigger");
    for (const auto& arc : m.flows) flag(arc.id, arc.src, arc.dst, "flow");
    return out;
  }

  return out;
}

std::vector<Violation> check_trace(const sim::Trace& trace, const Policy& p,
                                   const PiiContext& ctx) {
  std::vector<Violation> out;
  std::string root = subject_sphere(p.subject, ctx.registry);

  if (p.kind == PolicyKind::SelfControlledRelease) {
    for (const auto& e : trace.events) {
      if (e.kind != sim::EventKind::Flow) continue;
      if (e.region.empty() || e.region.back().stage != Stage::Release) continue;
      if (!refers_to(e, p.subject, ctx)) continue;
      bool self = e.site == root;
      if (!self && ctx.model != nullptr && !e.site.empty())
        self = in_subject_subtree(*ctx.model, e.site, root);
      if (self) continue;
      Violation v;
      v.policy = p.id;
      v.evidence_kind = "event";
      v.evidence = std::to_string(e.id);
      v.explanation = "event " + std::to_string(e.id) +
                      " releases information about '" + p.subject +
                      "' from sphere '" + e.site + "', outside their control";
      out.push_back(std::move(v));
    }
    return out;
  }

  if (p.kind == PolicyKind::ContextProhibition) {
    for (const auto& e : trace.events) {
      if (e.region.empty()) continue;
      if (p.context.action) {
        if (e.region.back().stage != p.context.action->stage) continue;
        if (e.thing_type != p.context.action->thing_type) continue;
      }
      if (p.context.identity &&
          !identity_matches(*p.context.identity, e.actor, ctx))
        continue;
      if (p.context.activity &&
          payload_tag(e, "activity") != p.context.activity)
        continue;
      if (p.context.time && payload_tag(e, "time") != p.context.time) continue;
      if (p.context.location && !location_matches(*p.context.location, e, ctx))
        continue;
      if (!refers_to(e, p.subject, ctx)) continue;
      Violation v;
      v.policy = p.id;
      v.evidence_kind = "event";
      v.evidence = std::to_string(e.id);
      std::string act =
          p.context.action
              ? std::string(stage_name(p.context.action->stage)) + " of " +
                    p.context.action->thing_type
              : std::string("activity");
      v.explanation = "event " + std::to_string(e.id) + " is a denied " + act +
                      " concerning '" + p.subject + "' (actor sphere '" +
                      e.actor + "')";
      out.push_back(std::move(v));
    }
    return out;
  }

  return out;
}

std::string violations_to_json_text(const std::vector<Violation>& vs) {
  ordered_json j = ordered_json::array();
  for (const auto& v : vs) {
    ordered_json vj;
    vj["policy"] = v.policy;
    vj["evidence_kind"] = v.evidence_kind;
    vj["evidence"] = v.evidence;
    vj["explanation"] = v.explanation;
    j.push_back(std::move(vj));
  }
  return j.dump(2) + "\n";
}

}  // namespace fm::policy
