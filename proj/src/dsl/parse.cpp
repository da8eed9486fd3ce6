#include "fm/dsl/parse.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <tuple>
#include <utility>

#include "fm/dsl/lexer.hpp"

namespace fm::dsl {

namespace {

constexpr int kMaxDepth = 256;

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  if (t.kind == Tok::String) return "\"" + t.text + "\"";
  return "'" + t.text + "'";
}

class Parser {
 public:
  Parser(const std::vector<Token>& toks, std::vector<Diagnostic>& diags)
      : toks_(toks), diags_(diags) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_kw(std::string_view kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }
  Token take() {
    Token t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    take();
    return true;
  }
  bool accept_kw(std::string_view kw) {
    if (!at_kw(kw)) return false;
    take();
    return true;
  }
  void error(std::string_view code, const SourceSpan& span, std::string msg) {
    diags_.push_back({Severity::Error, std::string(code), span, std::move(msg)});
  }
  void error_here(std::string_view code, std::string msg) {
    error(code, peek().span, std::move(msg));
  }
  void warn(const SourceSpan& span, std::string code, std::string msg) {
    diags_.push_back({Severity::Warning, std::move(code), span, std::move(msg)});
  }
  bool expect(Tok k, std::string_view what) {
    if (accept(k)) return true;
    error_here(diag::UNEXPECTED_TOKEN,
               "expected " + std::string(what) + ", got " + describe(peek()));
    return false;
  }
  bool expect_kw(std::string_view kw) {
    if (accept_kw(kw)) return true;
    error_here(diag::UNEXPECTED_TOKEN,
               "expected '" + std::string(kw) + "', got " + describe(peek()));
    return false;
  }

  /// Skip to just past the next ';', or stop before '}' / end of input.
  void sync() {
    while (!at(Tok::End)) {
      if (at(Tok::Semi)) {
        take();
        return;
      }
      if (at(Tok::RBrace)) return;
      if (at(Tok::LBrace)) {
        skip_braces();
        continue;
      }
      take();
    }
  }

  /// Consume a balanced { ... } block (assumes the cursor is at '{').
  void skip_braces() {
    if (!accept(Tok::LBrace)) return;
    int open = 1;
    while (!at(Tok::End) && open > 0) {
      if (at(Tok::LBrace)) ++open;
      if (at(Tok::RBrace)) --open;
      take();
    }
  }

  int depth = 0;

 private:
  const std::vector<Token>& toks_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
};

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.severity == Severity::Error;
  });
}

// --- guards ------------------------------------------------------------

std::optional<Guard> guard_or(Parser& p);

std::optional<Guard::Operand> guard_operand(Parser& p) {
  if (p.at(Tok::Ident)) return Guard::counter_ref(p.take().text);
  if (p.at(Tok::Int)) return Guard::literal(p.take().ival);
  p.error_here(diag::UNEXPECTED_TOKEN,
               "expected a counter name or integer, got " + describe(p.peek()));
  return std::nullopt;
}

std::optional<Guard> guard_primary(Parser& p) {
  if (++p.depth > kMaxDepth) {
    p.error_here(diag::TOO_DEEP, "guard expression nested too deeply");
    --p.depth;
    return std::nullopt;
  }
  std::optional<Guard> result;
  if (p.accept(Tok::LParen)) {
    result = guard_or(p);
    if (result && !p.expect(Tok::RParen, "')'")) result.reset();
  } else {
    auto lhs = guard_operand(p);
    if (lhs) {
      std::optional<Guard::Cmp> op;
      switch (p.peek().kind) {
        case Tok::EqEq: op = Guard::Cmp::Eq; break;
        case Tok::Ne: op = Guard::Cmp::Ne; break;
        case Tok::Lt: op = Guard::Cmp::Lt; break;
        case Tok::Le: op = Guard::Cmp::Le; break;
        case Tok::Gt: op = Guard::Cmp::Gt; break;
        case Tok::Ge: op = Guard::Cmp::Ge; break;
        default: break;
      }
      if (!op) {
        p.error_here(diag::UNEXPECTED_TOKEN,
                     "expected a comparison operator, got " + describe(p.peek()));
      } else {
        p.take();
        auto rhs = guard_operand(p);
        if (rhs) result = Guard::compare(*lhs, *op, *rhs);
      }
    }
  }
  --p.depth;
  return result;
}

std::optional<Guard> guard_not(Parser& p) {
  if (p.at_kw("not")) {
    p.take();
    if (++p.depth > kMaxDepth) {
      p.error_here(diag::TOO_DEEP, "guard expression nested too deeply");
      --p.depth;
      return std::nullopt;
    }
    auto inner = guard_not(p);
    --p.depth;
    if (!inner) return std::nullopt;
    return Guard::negate(std::move(*inner));
  }
  return guard_primary(p);
}

std::optional<Guard> guard_and(Parser& p) {
  auto lhs = guard_not(p);
  while (lhs && p.accept_kw("and")) {
    auto rhs = guard_not(p);
    if (!rhs) return std::nullopt;
    lhs = Guard::conj(std::move(*lhs), std::move(*rhs));
  }
  return lhs;
}

std::optional<Guard> guard_or(Parser& p) {
  auto lhs = guard_and(p);
  while (lhs && p.accept_kw("or")) {
    auto rhs = guard_and(p);
    if (!rhs) return std::nullopt;
    lhs = Guard::disj(std::move(*lhs), std::move(*rhs));
  }
  return lhs;
}

// --- shared refs -------------------------------------------------------

/// sphere.thing.Stage — the machine id is "sphere.thing".
struct RefResult {
  bool ok = false;
  StageRef ref;
  SourceSpan span;
};

RefResult parse_stage_ref(Parser& p, std::string_view what) {
  RefResult r;
  if (!p.at(Tok::Ident)) {
    p.error_here(diag::UNEXPECTED_TOKEN,
                 "expected " + std::string(what) + ", got " + describe(p.peek()));
    return r;
  }
  Token a = p.take();
  if (!p.expect(Tok::Dot, "'.'")) return r;
  if (!p.at(Tok::Ident)) {
    p.error_here(diag::UNEXPECTED_TOKEN,
                 "expected a thing type name, got " + describe(p.peek()));
    return r;
  }
  Token b = p.take();
  if (!p.expect(Tok::Dot, "'.'")) return r;
  if (!p.at(Tok::Ident)) {
    p.error_here(diag::UNEXPECTED_TOKEN,
                 "expected a stage name, got " + describe(p.peek()));
    return r;
  }
  Token c = p.take();
  auto stage = stage_from_name(c.text);
  if (!stage) {
    p.error(diag::UNKNOWN_STAGE, c.span, "unknown stage '" + c.text + "'");
    return r;
  }
  r.ok = true;
  r.ref = StageRef{a.text + "." + b.text, *stage};
  r.span = a.span;
  if (c.span.line == a.span.line)
    r.span.length = c.span.column + c.span.length - a.span.column;
  return r;
}

// --- model -------------------------------------------------------------

struct PendingArc {
  bool is_trigger = false;
  RefResult src;
  RefResult dst;
  std::optional<Guard> guard;
};

void parse_machine_decl(Parser& p, Model& m, const std::string& sphere_id) {
  p.take();  // machine
  if (!p.at(Tok::Ident)) {
    p.error_here(diag::UNEXPECTED_TOKEN,
                 "expected a thing type name, got " + describe(p.peek()));
    p.sync();
    return;
  }
  Token thing = p.take();
  std::string machine_id = sphere_id + "." + thing.text;
  if (m.find_machine(machine_id) != nullptr) {
    p.error(diag::DUPLICATE_ID, thing.span,
            "machine '" + machine_id + "' already declared");
  }
  if (!p.expect(Tok::LBrace, "'{'")) {
    p.sync();
    return;
  }
  std::set<Stage> stages;
  while (!p.at(Tok::RBrace) && !p.at(Tok::End)) {
    if (p.at_kw("stages")) {
      p.take();
      if (!p.expect(Tok::Colon, "':'")) {
        p.sync();
        continue;
      }
      while (true) {
        if (!p.at(Tok::Ident)) {
          p.error_here(diag::UNEXPECTED_TOKEN,
                       "expected a stage name, got " + describe(p.peek()));
          break;
        }
        Token st = p.take();
        auto stage = stage_from_name(st.text);
        if (stage) {
          stages.insert(*stage);
        } else {
          p.error(diag::UNKNOWN_STAGE, st.span, "unknown stage '" + st.text + "'");
        }
        if (!p.accept(Tok::Comma)) break;
      }
      p.expect(Tok::Semi, "';'");
      continue;
    }
    if (p.at(Tok::Ident)) {
      p.error_here(diag::UNKNOWN_KEYWORD,
                   "unknown keyword '" + p.peek().text + "' in machine body");
    } else {
      p.error_here(diag::UNEXPECTED_TOKEN,
                   "expected 'stages', got " + describe(p.peek()));
    }
    p.take();
    p.sync();
  }
  p.expect(Tok::RBrace, "'}'");
  if (m.find_thing_type(thing.text) == nullptr)
    m.thing_types.push_back(ThingType{thing.text, thing.text});
  m.machines.push_back(Machine{machine_id, sphere_id, thing.text, std::move(stages)});
}

void parse_sphere_decl(Parser& p, Model& m,
                       const std::optional<std::string>& parent) {
  p.take();  // sphere
  if (!p.at(Tok::Ident)) {
    p.error_here(diag::UNEXPECTED_TOKEN,
                 "expected a sphere name, got " + describe(p.peek()));
    p.sync();
    return;
  }
  Token id = p.take();
  if (m.find_sphere(id.text) != nullptr) {
    p.error(diag::DUPLICATE_ID, id.span,
            "sphere '" + id.text + "' already declared");
  }
  Sphere s;
  s.id = id.text;
  s.name = id.text;
  s.parent = parent;
  if (p.accept(Tok::LBracket)) {
    while (!p.at(Tok::RBracket) && !p.at(Tok::End)) {
      if (!p.at(Tok::Ident)) {
        p.error_here(diag::UNEXPECTED_TOKEN,
                     "expected an attribute name, got " + describe(p.peek()));
        break;
      }
      Token key = p.take();
      if (!p.expect(Tok::Assign, "'='")) break;
      if (!p.at(Tok::Ident) && !p.at(Tok::String)) {
        p.error_here(diag::UNEXPECTED_TOKEN,
                     "expected an attribute value, got " + describe(p.peek()));
        break;
      }
      Token value = p.take();
      if (key.text == "kind") {
        auto kind = sphere_kind_from_name(value.text);
        if (kind) {
          s.kind = *kind;
        } else {
          p.error(diag::UNKNOWN_KIND, value.span,
                  "unknown sphere kind '" + value.text + "'");
        }
      } else if (key.text == "name") {
        s.name = value.text;
      } else {
        p.error(diag::UNKNOWN_KEYWORD, key.span,
                "unknown sphere attribute '" + key.text + "'");
      }
      if (!p.accept(Tok::Comma)) break;
    }
    p.expect(Tok::RBracket, "']'");
  }
  m.spheres.push_back(std::move(s));
  if (!p.expect(Tok::LBrace, "'{'")) {
    p.sync();
    return;
  }
  while (!p.at(Tok::RBrace) && !p.at(Tok::End)) {
    if (p.at_kw("machine")) {
      parse_machine_decl(p, m, id.text);
      continue;
    }
    if (p.at_kw("sphere")) {
      if (++p.depth > kMaxDepth) {
        p.error_here(diag::TOO_DEEP, "spheres nested too deeply");
        --p.depth;
        p.take();
        p.take();
        p.skip_braces();
        continue;
      }
      parse_sphere_decl(p, m, id.text);
      --p.depth;
      continue;
    }
    if (p.at(Tok::Ident)) {
      p.error_here(diag::UNKNOWN_KEYWORD,
                   "unknown keyword '" + p.peek().text + "' in sphere body");
    } else {
      p.error_here(diag::UNEXPECTED_TOKEN,
                   "expected 'machine' or 'sphere', got " + describe(p.peek()));
    }
    p.take();
    p.sync();
  }
  p.expect(Tok::RBrace, "'}'");
}

}  // namespace

ParseResult<Model> parse_model(std::string_view text, std::string_view file) {
  std::vector<Diagnostic> diags;
  auto toks = lex(text, file, diags);
  Parser p(toks, diags);
  Model m;
  std::vector<PendingArc> arcs;

  while (!p.at(Tok::End)) {
    if (p.at_kw("sphere")) {
      parse_sphere_decl(p, m, std::nullopt);
      continue;
    }
    if (p.at_kw("flow") || p.at_kw("trigger")) {
      bool is_trigger = p.peek().text == "trigger";
      p.take();
      PendingArc arc;
      arc.is_trigger = is_trigger;
      arc.src = parse_stage_ref(p, "a stage reference");
      if (!arc.src.ok) {
        p.sync();
        continue;
      }
      if (!p.expect(Tok::Arrow, "'->'")) {
        p.sync();
        continue;
      }
      arc.dst = parse_stage_ref(p, "a stage reference");
      if (!arc.dst.ok) {
        p.sync();
        continue;
      }
      if (is_trigger && p.accept_kw("when")) {
        arc.guard = guard_or(p);
        if (!arc.guard) {
          p.sync();
          continue;
        }
      }
      if (!p.expect(Tok::Semi, "';'")) {
        p.sync();
        continue;
      }
      arcs.push_back(std::move(arc));
      continue;
    }
    if (p.at(Tok::Ident)) {
      p.error_here(diag::UNKNOWN_KEYWORD, "unknown keyword '" + p.peek().text + "'");
    } else {
      p.error_here(diag::UNEXPECTED_TOKEN,
                   "expected 'sphere', 'flow' or 'trigger', got " +
                       describe(p.peek()));
    }
    p.take();
    p.sync();
  }

  std::size_t flow_n = 0;
  std::size_t trigger_n = 0;
  for (auto& arc : arcs) {
    for (const RefResult* end : {&arc.src, &arc.dst}) {
      if (m.find_machine(end->ref.machine) == nullptr) {
        p.error(diag::UNRESOLVED_REF, end->span,
                "unknown machine '" + end->ref.machine + "'");
      }
    }
    if (arc.is_trigger) {
      m.triggers.push_back(TriggerArc{"t" + std::to_string(trigger_n++),
                                      arc.src.ref, arc.dst.ref,
                                      std::move(arc.guard)});
    } else {
      m.flows.push_back(
          FlowArc{"f" + std::to_string(flow_n++), arc.src.ref, arc.dst.ref});
    }
  }

  ParseResult<Model> result;
  bool usable = !has_errors(diags);
  sort_diagnostics(diags);
  result.diagnostics = std::move(diags);
  if (usable) result.value = std::move(m);
  return result;
}

ParseResult<Guard> parse_guard(std::string_view text, std::string_view file) {
  std::vector<Diagnostic> diags;
  auto toks = lex(text, file, diags);
  Parser p(toks, diags);
  auto g = guard_or(p);
  if (g && !p.at(Tok::End)) {
    p.error_here(diag::UNEXPECTED_TOKEN,
                 "expected end of guard, got " + describe(p.peek()));
    g.reset();
  }
  ParseResult<Guard> result;
  bool usable = g.has_value() && !has_errors(diags);
  sort_diagnostics(diags);
  result.diagnostics = std::move(diags);
  if (usable) result.value = std::move(*g);
  return result;
}

// --- scenarios and control graphs --------------------------------------

namespace {

struct PendingEdge {
  Token from;
  Token to;
  std::optional<Guard> guard;
};

/// Parses `event <label> [flow|trigger|guard] at ref{, ref};` into the graph.
void parse_event_decl(Parser& p, sim::ControlGraph& graph) {
  p.take();  // event
  if (!p.at(Tok::Ident)) {
    p.error_here(diag::UNEXPECTED_TOKEN,
                 "expected an event label, got " + describe(p.peek()));
    p.sync();
    return;
  }
  Token label = p.take();
  if (graph.find_node(label.text) != nullptr) {
    p.error(diag::DUPLICATE_ID, label.span,
            "event '" + label.text + "' already declared");
  }
  sim::EventPattern pat;
  pat.label = label.text;
  if (!p.at_kw("at")) {
    if (p.at(Tok::Ident)) {
      auto kind = sim::event_kind_from_name(p.peek().text);
      if (kind) {
        pat.kind = *kind;
        p.take();
      } else {
        p.error_here(diag::UNKNOWN_KIND,
                     "unknown event kind '" + p.peek().text + "'");
        p.sync();
        return;
      }
    }
  }
  if (!p.expect_kw("at")) {
    p.sync();
    return;
  }
  while (true) {
    RefResult ref = parse_stage_ref(p, "a stage reference");
    if (!ref.ok) {
      p.sync();
      return;
    }
    pat.region.push_back(ref.ref);
    if (!p.accept(Tok::Comma)) break;
  }
  if (!p.expect(Tok::Semi, "';'")) {
    p.sync();
    return;
  }
  graph.nodes.push_back(std::move(pat));
}

void parse_precede_decl(Parser& p, std::vector<PendingEdge>& edges) {
  p.take();  // precede
  if (!p.at(Tok::Ident)) {
    p.error_here(diag::UNEXPECTED_TOKEN,
                 "expected an event label, got " + describe(p.peek()));
    p.sync();
    return;
  }
  PendingEdge e;
  e.from = p.take();
  if (!p.expect(Tok::Arrow, "'->'")) {
    p.sync();
    return;
  }
  if (!p.at(Tok::Ident)) {
    p.error_here(diag::UNEXPECTED_TOKEN,
                 "expected an event label, got " + describe(p.peek()));
    p.sync();
    return;
  }
  e.to = p.take();
  if (p.accept_kw("when")) {
    e.guard = guard_or(p);
    if (!e.guard) {
      p.sync();
      return;
    }
  }
  if (!p.expect(Tok::Semi, "';'")) {
    p.sync();
    return;
  }
  edges.push_back(std::move(e));
}

void resolve_edges(Parser& p, std::vector<PendingEdge>& pending,
                   sim::ControlGraph& graph) {
  for (auto& e : pending) {
    bool ok = true;
    for (const Token* end : {&e.from, &e.to}) {
      if (graph.find_node(end->text) == nullptr) {
        p.error(diag::UNRESOLVED_REF, end->span,
                "unknown event '" + end->text + "'");
        ok = false;
      }
    }
    if (ok)
      graph.edges.push_back(
          sim::ControlEdge{e.from.text, e.to.text, std::move(e.guard)});
  }
}

}  // namespace

ParseResult<sim::Scenario> parse_scenario(std::string_view text,
                                          std::string_view file) {
  std::vector<Diagnostic> diags;
  auto toks = lex(text, file, diags);
  Parser p(toks, diags);
  sim::Scenario sc;
  std::vector<PendingEdge> pending;
  bool seen = false;

  while (!p.at(Tok::End)) {
    if (!p.at_kw("scenario")) {
      if (p.at(Tok::Ident)) {
        p.error_here(diag::UNKNOWN_KEYWORD,
                     "unknown keyword '" + p.peek().text + "'");
      } else {
        p.error_here(diag::UNEXPECTED_TOKEN,
                     "expected 'scenario', got " + describe(p.peek()));
      }
      p.take();
      p.sync();
      continue;
    }
    p.take();
    if (!p.at(Tok::Ident)) {
      p.error_here(diag::UNEXPECTED_TOKEN,
                   "expected a scenario name, got " + describe(p.peek()));
      p.sync();
      continue;
    }
    Token name = p.take();
    if (seen) {
      p.error(diag::DUPLICATE_ID, name.span,
              "a scenario is already declared in this file");
    }
    seen = true;
    sc.name = name.text;
    if (!p.expect(Tok::LBrace, "'{'")) {
      p.sync();
      continue;
    }
    while (!p.at(Tok::RBrace) && !p.at(Tok::End)) {
      if (p.at_kw("place")) {
        p.take();
        RefResult at = parse_stage_ref(p, "a stage reference");
        if (!at.ok) {
          p.sync();
          continue;
        }
        sim::Placement pl;
        pl.at = at.ref;
        if (p.accept_kw("with")) {
          while (true) {
            if (!p.at(Tok::Ident)) {
              p.error_here(diag::UNEXPECTED_TOKEN,
                           "expected a payload key, got " + describe(p.peek()));
              break;
            }
            Token key = p.take();
            if (!p.expect(Tok::Assign, "'='")) break;
            if (p.at(Tok::Ident) || p.at(Tok::String)) {
              pl.payload[key.text] = p.take().text;
            } else if (p.at(Tok::Int)) {
              pl.payload[key.text] = std::to_string(p.take().ival);
            } else {
              p.error_here(diag::UNEXPECTED_TOKEN,
                           "expected a payload value, got " + describe(p.peek()));
              break;
            }
            if (!p.accept(Tok::Comma)) break;
          }
        }
        if (p.accept_kw("stored")) pl.stored = true;
        if (!p.expect(Tok::Semi, "';'")) {
          p.sync();
          continue;
        }
        sc.placements.push_back(std::move(pl));
        continue;
      }
      if (p.at_kw("counter")) {
        p.take();
        if (!p.at(Tok::Ident)) {
          p.error_here(diag::UNEXPECTED_TOKEN,
                       "expected a counter name, got " + describe(p.peek()));
          p.sync();
          continue;
        }
        Token cname = p.take();
        sim::CounterDef def;
        def.name = cname.text;
        bool bad = false;
        for (const auto& existing : sc.counters) {
          if (existing.name == def.name) {
            p.error(diag::DUPLICATE_ID, cname.span,
                    "counter '" + def.name + "' already declared");
            bad = true;
          }
        }
        if (p.accept(Tok::Assign)) {
          if (!p.at(Tok::Int)) {
            p.error_here(diag::UNEXPECTED_TOKEN,
                         "expected an integer, got " + describe(p.peek()));
            p.sync();
            continue;
          }
          def.initial = p.take().ival;
        }
        if (p.accept_kw("counts")) {
          if (!p.at(Tok::Ident)) {
            p.error_here(diag::UNEXPECTED_TOKEN,
                         "expected an event label, got " + describe(p.peek()));
            p.sync();
            continue;
          }
          def.counts_label = p.take().text;
        }
        if (!p.expect(Tok::Semi, "';'")) {
          p.sync();
          continue;
        }
        if (!bad) sc.counters.push_back(std::move(def));
        continue;
      }
      if (p.at_kw("event")) {
        parse_event_decl(p, sc.control);
        continue;
      }
      if (p.at_kw("precede")) {
        parse_precede_decl(p, pending);
        continue;
      }
      if (p.at(Tok::Ident)) {
        p.error_here(diag::UNKNOWN_KEYWORD,
                     "unknown keyword '" + p.peek().text + "' in scenario body");
      } else {
        p.error_here(diag::UNEXPECTED_TOKEN,
                     "expected a scenario item, got " + describe(p.peek()));
      }
      p.take();
      p.sync();
    }
    p.expect(Tok::RBrace, "'}'");
  }

  if (!seen) {
    p.error_here(diag::UNEXPECTED_TOKEN, "no scenario declared");
  }
  resolve_edges(p, pending, sc.control);
  // counts targets must name declared events
  for (const auto& def : sc.counters) {
    if (def.counts_label && sc.control.find_node(*def.counts_label) == nullptr) {
      Diagnostic d;
      d.severity = Severity::Warning;
      d.code = std::string(diag::UNRESOLVED_REF);
      d.span = SourceSpan{std::string(file), 1, 1, 0};
      d.message = "counter '" + def.name + "' counts undeclared event '" +
                  *def.counts_label + "'";
      diags.push_back(std::move(d));
    }
  }

  ParseResult<sim::Scenario> result;
  bool usable = !has_errors(diags);
  sort_diagnostics(diags);
  result.diagnostics = std::move(diags);
  if (usable) result.value = std::move(sc);
  return result;
}

ParseResult<sim::ControlGraph> parse_control(std::string_view text,
                                             std::string_view file) {
  std::vector<Diagnostic> diags;
  auto toks = lex(text, file, diags);
  Parser p(toks, diags);
  sim::ControlGraph graph;
  std::vector<PendingEdge> pending;
  bool seen = false;

  while (!p.at(Tok::End)) {
    if (!p.at_kw("control")) {
      if (p.at(Tok::Ident)) {
        p.error_here(diag::UNKNOWN_KEYWORD,
                     "unknown keyword '" + p.peek().text + "'");
      } else {
        p.error_here(diag::UNEXPECTED_TOKEN,
                     "expected 'control', got " + describe(p.peek()));
      }
      p.take();
      p.sync();
      continue;
    }
    p.take();
    if (!p.at(Tok::Ident)) {
      p.error_here(diag::UNEXPECTED_TOKEN,
                   "expected a control graph name, got " + describe(p.peek()));
      p.sync();
      continue;
    }
    Token name = p.take();
    if (seen) {
      p.error(diag::DUPLICATE_ID, name.span,
              "a control graph is already declared in this file");
    }
    seen = true;
    if (!p.expect(Tok::LBrace, "'{'")) {
      p.sync();
      continue;
    }
    while (!p.at(Tok::RBrace) && !p.at(Tok::End)) {
      if (p.at_kw("event")) {
        parse_event_decl(p, graph);
        continue;
      }
      if (p.at_kw("precede")) {
        parse_precede_decl(p, pending);
        continue;
      }
      if (p.at(Tok::Ident)) {
        p.error_here(diag::UNKNOWN_KEYWORD,
                     "unknown keyword '" + p.peek().text + "' in control body");
      } else {
        p.error_here(diag::UNEXPECTED_TOKEN,
                     "expected 'event' or 'precede', got " + describe(p.peek()));
      }
      p.take();
      p.sync();
    }
    p.expect(Tok::RBrace, "'}'");
  }

  if (!seen) {
    p.error_here(diag::UNEXPECTED_TOKEN, "no control graph declared");
  }
  resolve_edges(p, pending, graph);

  ParseResult<sim::ControlGraph> result;
  bool usable = !has_errors(diags);
  sort_diagnostics(diags);
  result.diagnostics = std::move(diags);
  if (usable) result.value = std::move(graph);
  return result;
}

// --- policies ----------------------------------------------------------

namespace {

std::optional<Stage> action_verb_stage(std::string_view verb) {
  static const std::map<std::string_view, Stage> verbs = {
      {"create", Stage::Create},     {"process", Stage::Process},
      {"release", Stage::Release},   {"transfer", Stage::Transfer},
      {"arrive", Stage::Arrive},     {"accept", Stage::Accept},
      {"receive", Stage::Receive},
  };
  auto it = verbs.find(verb);
  return it == verbs.end() ? std::nullopt : std::optional<Stage>(it->second);
}

}  // namespace

ParseResult<std::vector<policy::Policy>> parse_policies(std::string_view text,
                                                        std::string_view file) {
  std::vector<Diagnostic> diags;
  auto toks = lex(text, file, diags);
  Parser p(toks, diags);
  std::vector<policy::Policy> out;

  while (!p.at(Tok::End)) {
    if (!p.at_kw("policy")) {
      if (p.at(Tok::Ident)) {
        p.error_here(diag::UNKNOWN_KEYWORD,
                     "unknown keyword '" + p.peek().text + "'");
      } else {
        p.error_here(diag::UNEXPECTED_TOKEN,
                     "expected 'policy', got " + describe(p.peek()));
      }
      p.take();
      p.sync();
      continue;
    }
    p.take();
    if (!p.at(Tok::Ident)) {
      p.error_here(diag::UNEXPECTED_TOKEN,
                   "expected a policy id, got " + describe(p.peek()));
      p.sync();
      continue;
    }
    Token id = p.take();
    for (const auto& existing : out) {
      if (existing.id == id.text)
        p.error(diag::DUPLICATE_ID, id.span,
                "policy '" + id.text + "' already declared");
    }
    policy::Policy pol;
    pol.id = id.text;
    bool have_subject = false;
    bool broken = false;

    if (p.accept_kw("solitude")) {
      pol.kind = policy::PolicyKind::Solitude;
    } else if (p.accept_kw("cutoff")) {
      pol.kind = policy::PolicyKind::CutOffSources;
    } else if (p.accept_kw("self_release")) {
      pol.kind = policy::PolicyKind::SelfControlledRelease;
    } else if (p.at_kw("deny")) {
      p.take();
      pol.kind = policy::PolicyKind::ContextProhibition;
      if (!p.at(Tok::Ident)) {
        p.error_here(diag::UNEXPECTED_TOKEN,
                     "expected an action, got " + describe(p.peek()));
        p.sync();
        continue;
      }
      Token action = p.take();
      auto underscore = action.text.find('_');
      std::optional<Stage> stage;
      if (underscore != std::string::npos && underscore + 1 < action.text.size())
        stage = action_verb_stage(action.text.substr(0, underscore));
      if (!stage) {
        p.error(diag::BAD_ACTION, action.span,
                "action must be <stage-verb>_<thing>, got '" + action.text + "'");
        p.sync();
        continue;
      }
      pol.context.action =
          policy::ActionSel{*stage, action.text.substr(underscore + 1)};
      if (!p.expect_kw("by")) {
        p.sync();
        continue;
      }
      policy::IdentitySel who;
      who.is_group = p.accept_kw("group");
      if (!p.at(Tok::Ident)) {
        p.error_here(diag::UNEXPECTED_TOKEN,
                     "expected an identity, got " + describe(p.peek()));
        p.sync();
        continue;
      }
      who.id = p.take().text;
      pol.context.identity = std::move(who);
      while (true) {
        if (p.accept_kw("at")) {
          if (!p.at(Tok::Ident)) {
            p.error_here(diag::UNEXPECTED_TOKEN,
                         "expected a location, got " + describe(p.peek()));
            broken = true;
            break;
          }
          pol.context.location = p.take().text;
          continue;
        }
        if (p.accept_kw("during")) {
          if (!p.at(Tok::Ident)) {
            p.error_here(diag::UNEXPECTED_TOKEN,
                         "expected a time tag, got " + describe(p.peek()));
            broken = true;
            break;
          }
          pol.context.time = p.take().text;
          continue;
        }
        if (p.accept_kw("while")) {
          if (!p.at(Tok::Ident)) {
            p.error_here(diag::UNEXPECTED_TOKEN,
                         "expected an activity tag, got " + describe(p.peek()));
            broken = true;
            break;
          }
          pol.context.activity = p.take().text;
          continue;
        }
        break;
      }
      if (broken) {
        p.sync();
        continue;
      }
    } else {
      if (p.at(Tok::Ident)) {
        p.error_here(diag::UNKNOWN_KEYWORD,
                     "unknown policy kind '" + p.peek().text + "'");
      } else {
        p.error_here(diag::UNEXPECTED_TOKEN,
                     "expected a policy kind, got " + describe(p.peek()));
      }
      p.sync();
      continue;
    }

    if (p.accept_kw("on")) {
      if (!p.at(Tok::Ident)) {
        p.error_here(diag::UNEXPECTED_TOKEN,
                     "expected a subject, got " + describe(p.peek()));
        p.sync();
        continue;
      }
      pol.subject = p.take().text;
      have_subject = true;
    }
    if (!have_subject) {
      p.error(diag::MISSING_SUBJECT, p.peek().span,
              "policy '" + pol.id + "' names no subject ('on <person>')");
      p.sync();
      continue;
    }
    if (!p.expect(Tok::Semi, "';'")) {
      p.sync();
      continue;
    }
    out.push_back(std::move(pol));
  }

  ParseResult<std::vector<policy::Policy>> result;
  bool usable = !has_errors(diags);
  sort_diagnostics(diags);
  result.diagnostics = std::move(diags);
  if (usable) result.value = std::move(out);
  return result;
}

ParseResult<policy::Policy> parse_policy(std::string_view text,
                                         std::string_view file) {
  auto all = parse_policies(text, file);
  ParseResult<policy::Policy> result;
  result.diagnostics = std::move(all.diagnostics);
  if (all.value) {
    if (all.value->empty()) {
      result.diagnostics.push_back(
          {Severity::Error, std::string(diag::UNEXPECTED_TOKEN),
           SourceSpan{std::string(file), 1, 1, 0}, "no policy declared"});
    } else {
      result.value = std::move(all.value->front());
    }
  }
  return result;
}

// --- assertion corpus ---------------------------------------------------

namespace {

struct LineCursor {
  std::string_view line;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < line.size() &&
           (line[pos] == ' ' || line[pos] == '\t'))
      ++pos;
  }
  bool done() const { return pos >= line.size(); }
  char peek() const { return pos < line.size() ? line[pos] : '\0'; }
};

bool corpus_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool corpus_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

bool CorpusResult::ok() const {
  return !has_errors(diagnostics);
}

CorpusResult parse_assertions(std::string_view text, std::string_view file) {
  CorpusResult out;
  std::string fname(file);
  int line_no = 0;
  std::size_t start = 0;

  auto bad = [&](int col, std::string_view code, std::string msg) {
    out.diagnostics.push_back({Severity::Error, std::string(code),
                               SourceSpan{fname, line_no, col, 1},
                               std::move(msg)});
  };

  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view raw = nl == std::string_view::npos
                               ? text.substr(start)
                               : text.substr(start, nl - start);
    ++line_no;
    std::size_t begin = start;
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    (void)begin;

    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    LineCursor cur{raw};
    cur.skip_ws();
    if (cur.done()) continue;
    if (raw.substr(cur.pos).rfind("//", 0) == 0 || cur.peek() == '#') continue;

    std::size_t text_begin = cur.pos;
    if (!corpus_ident_start(cur.peek())) {
      bad(static_cast<int>(cur.pos) + 1, diag::UNEXPECTED_CHAR,
          "expected a predicate name");
      continue;
    }
    pii::Assertion a;
    while (!cur.done() && corpus_ident_char(cur.peek()))
      a.predicate += raw[cur.pos++];
    cur.skip_ws();
    if (cur.peek() != '(') {
      bad(static_cast<int>(cur.pos) + 1, diag::UNEXPECTED_CHAR,
          "expected '(' after predicate");
      continue;
    }
    ++cur.pos;
    cur.skip_ws();
    bool line_ok = true;
    if (cur.peek() != ')') {
      while (true) {
        cur.skip_ws();
        pii::Term term;
        if (cur.peek() == '"') {
          ++cur.pos;
          term.quoted = true;
          bool closed = false;
          while (!cur.done()) {
            char c = raw[cur.pos++];
            if (c == '"') {
              closed = true;
              break;
            }
            if (c == '\\' && !cur.done()) {
              term.text += raw[cur.pos++];
              continue;
            }
            term.text += c;
          }
          if (!closed) {
            bad(static_cast<int>(cur.pos) + 1, diag::UNTERMINATED_STRING,
                "unterminated string argument");
            line_ok = false;
            break;
          }
        } else if (std::isdigit(static_cast<unsigned char>(cur.peek())) ||
                   (cur.peek() == '-' && cur.pos + 1 < raw.size() &&
                    std::isdigit(static_cast<unsigned char>(raw[cur.pos + 1])))) {
          term.kind = pii::Term::Kind::Int;
          if (cur.peek() == '-') term.text += raw[cur.pos++];
          while (!cur.done() &&
                 std::isdigit(static_cast<unsigned char>(cur.peek())))
            term.text += raw[cur.pos++];
          try {
            term.ival = std::stoll(term.text);
          } catch (const std::exception&) {
            bad(static_cast<int>(cur.pos) + 1, diag::BAD_NUMBER,
                "number out of range '" + term.text + "'");
            line_ok = false;
            break;
          }
        } else if (corpus_ident_start(cur.peek())) {
          while (!cur.done() && corpus_ident_char(cur.peek()))
            term.text += raw[cur.pos++];
        } else {
          bad(static_cast<int>(cur.pos) + 1, diag::UNEXPECTED_CHAR,
              "expected an argument");
          line_ok = false;
          break;
        }
        a.arguments.push_back(std::move(term));
        cur.skip_ws();
        if (cur.peek() == ',') {
          ++cur.pos;
          continue;
        }
        break;
      }
    }
    if (!line_ok) continue;
    cur.skip_ws();
    if (cur.peek() != ')') {
      bad(static_cast<int>(cur.pos) + 1, diag::UNEXPECTED_CHAR,
          "expected ')' closing the argument list");
      continue;
    }
    ++cur.pos;
    cur.skip_ws();

    bool bracketed = false;
    if (cur.peek() == '[') {
      bracketed = true;
      ++cur.pos;
      cur.skip_ws();
    }
    if (!cur.done() && corpus_ident_start(cur.peek())) {
      std::string key;
      std::size_t key_col = cur.pos;
      while (!cur.done() && corpus_ident_char(cur.peek()))
        key += raw[cur.pos++];
      cur.skip_ws();
      if (key != "truth" || cur.peek() != '=') {
        bad(static_cast<int>(key_col) + 1, diag::UNEXPECTED_CHAR,
            "expected 'truth=T|F' after the argument list");
        continue;
      }
      ++cur.pos;
      cur.skip_ws();
      char v = cur.peek();
      if (v == 'T') {
        a.truth = pii::Truth::True;
        ++cur.pos;
      } else if (v == 'F') {
        a.truth = pii::Truth::False;
        ++cur.pos;
      } else {
        bad(static_cast<int>(cur.pos) + 1, diag::UNEXPECTED_CHAR,
            "truth value must be T or F");
        continue;
      }
      cur.skip_ws();
    } else if (bracketed) {
      bad(static_cast<int>(cur.pos) + 1, diag::UNEXPECTED_CHAR,
          "expected 'truth=T|F' inside '[...]'");
      continue;
    }
    if (bracketed) {
      if (cur.peek() != ']') {
        bad(static_cast<int>(cur.pos) + 1, diag::UNEXPECTED_CHAR,
            "expected ']'");
        continue;
      }
      ++cur.pos;
      cur.skip_ws();
    }
    if (!cur.done()) {
      bad(static_cast<int>(cur.pos) + 1, diag::UNEXPECTED_CHAR,
          "unexpected text after assertion");
      continue;
    }

    std::string_view trimmed = raw.substr(text_begin);
    while (!trimmed.empty() &&
           (trimmed.back() == ' ' || trimmed.back() == '\t'))
      trimmed.remove_suffix(1);
    a.text = std::string(trimmed);
    a.id = "a" + std::to_string(out.assertions.size());
    out.assertions.push_back(std::move(a));
  }

  sort_diagnostics(out.diagnostics);
  return out;
}

}  // namespace fm::dsl
