#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>

#include "fm/assemble.hpp"
#include "fm/dsl/format.hpp"
#include "fm/dsl/lexer.hpp"
#include "fm/dsl/parse.hpp"
#include "fm/model.hpp"
#include "fm/validate.hpp"
#include "support/generators.hpp"
#include "support/io.hpp"

using namespace fm;
using namespace fm::dsl;

namespace {

bool has_code(const std::vector<Diagnostic>& diags, std::string_view code,
              Severity severity = Severity::Error) {
  return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) {
    return d.code == code && d.severity == severity;
  });
}

}  // namespace

TEST_CASE("lexer token stream") {
  std::vector<Diagnostic> diags;
  auto toks = lex("sphere x { flow a.b.C -> d; } // tail comment", "t", diags);
  CHECK(diags.empty());
  std::vector<Tok> kinds;
  for (const auto& t : toks) kinds.push_back(t.kind);
  CHECK(kinds == std::vector<Tok>{Tok::Ident, Tok::Ident, Tok::LBrace, Tok::Ident,
                                  Tok::Ident, Tok::Dot, Tok::Ident, Tok::Dot,
                                  Tok::Ident, Tok::Arrow, Tok::Ident, Tok::Semi,
                                  Tok::RBrace, Tok::End});
  CHECK(toks[0].text == "sphere");

  diags.clear();
  toks = lex("== != <= >= < > = -> -12 7 \"hi \\\"there\\\"\"", "t", diags);
  CHECK(diags.empty());
  kinds.clear();
  for (const auto& t : toks) kinds.push_back(t.kind);
  CHECK(kinds == std::vector<Tok>{Tok::EqEq, Tok::Ne, Tok::Le, Tok::Ge, Tok::Lt,
                                  Tok::Gt, Tok::Assign, Tok::Arrow, Tok::Int,
                                  Tok::Int, Tok::String, Tok::End});
  CHECK(toks[8].ival == -12);
  CHECK(toks[9].ival == 7);
  CHECK(toks[10].text == "hi \"there\"");
}

TEST_CASE("lexer positions and diagnostics") {
  std::vector<Diagnostic> diags;
  auto toks = lex("ab\n  cd", "t", diags);
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].span.line == 1);
  CHECK(toks[0].span.column == 1);
  CHECK(toks[1].span.line == 2);
  CHECK(toks[1].span.column == 3);

  diags.clear();
  lex("\"never closed", "t", diags);
  CHECK(has_code(diags, diag::UNTERMINATED_STRING));

  diags.clear();
  lex("12abc", "t", diags);
  CHECK(has_code(diags, diag::BAD_NUMBER));

  diags.clear();
  lex("999999999999999999999999999", "t", diags);
  CHECK(has_code(diags, diag::BAD_NUMBER));

  diags.clear();
  auto survivors = lex("a @ b", "t", diags);
  CHECK(has_code(diags, diag::UNEXPECTED_CHAR));
  CHECK(survivors.size() == 3);  // a, b, End — the bad byte is skipped
}

TEST_CASE("empty input parses to an empty model") {
  auto r = parse_model("");
  REQUIRE(r.ok());
  CHECK(r.diagnostics.empty());
  CHECK(r.value->spheres.empty());
  CHECK(r.value->machines.empty());

  auto comment_only = parse_model("// nothing here\n");
  REQUIRE(comment_only.ok());
  CHECK(comment_only.diagnostics.empty());
}

TEST_CASE("model parse diagnostics carry the right codes") {
  CHECK(has_code(parse_model("widget foo;").diagnostics, diag::UNKNOWN_KEYWORD));
  CHECK(has_code(parse_model("sphere a { machine m { stages: Recieve; } }").diagnostics,
                 diag::UNKNOWN_STAGE));
  CHECK(has_code(parse_model("sphere a [kind=banana] { }").diagnostics,
                 diag::UNKNOWN_KIND));
  CHECK(has_code(parse_model("sphere a { } sphere a { }").diagnostics,
                 diag::DUPLICATE_ID));
  CHECK(has_code(parse_model("flow a.b.Create -> c.d.Release;").diagnostics,
                 diag::UNRESOLVED_REF));
  CHECK(has_code(parse_model("sphere a { machine m { stages: Create, Release; } }\n"
                             "trigger a.m.Create -> a.m.Release extra;")
                     .diagnostics,
                 diag::UNEXPECTED_TOKEN));
  CHECK(has_code(parse_model("sphere a { machine m { stages: Create; } }\n"
                             "flow a.m.Create -> a.m.Banana;")
                     .diagnostics,
                 diag::UNKNOWN_STAGE));

  std::string deep;
  for (int i = 0; i < 300; ++i) deep += "sphere s" + std::to_string(i) + " { ";
  CHECK(has_code(parse_model(deep).diagnostics, diag::TOO_DEEP));
}

TEST_CASE("a parse with errors yields no model") {
  auto r = parse_model("sphere a { machine m { stages: Recieve; } }");
  CHECK_FALSE(r.ok());
  CHECK_FALSE(r.value.has_value());
}

TEST_CASE("electricity text equals its programmatic assembly") {
  auto parsed = parse_model(testio::slurp(testio::fixture("electricity.fm")),
                            "electricity.fm");
  REQUIRE(parsed.ok());
  CHECK(parsed.diagnostics.empty());
  CHECK(validate(*parsed.value).ok());

  Model by_hand = assemble({
      AddSphere{"ps", "Power station", SphereKind::Entity, {}},
      AddSphere{"sub", "", SphereKind::Entity, {}},
      AddSphere{"home", "", SphereKind::Location, {}},
      AddMachine{"", "ps", "electricity",
                 {Stage::Create, Stage::Release, Stage::Transfer}},
      AddMachine{"", "sub", "electricity",
                 {Stage::Arrive, Stage::Accept, Stage::Process, Stage::Release,
                  Stage::Transfer}},
      AddMachine{"", "home", "electricity", {Stage::Arrive}},
      AddFlow{"", {"ps.electricity", Stage::Create}, {"ps.electricity", Stage::Release}},
      AddFlow{"", {"ps.electricity", Stage::Release}, {"ps.electricity", Stage::Transfer}},
      AddFlow{"", {"ps.electricity", Stage::Transfer}, {"sub.electricity", Stage::Arrive}},
      AddFlow{"", {"sub.electricity", Stage::Arrive}, {"sub.electricity", Stage::Accept}},
      AddFlow{"", {"sub.electricity", Stage::Accept}, {"sub.electricity", Stage::Process}},
      AddFlow{"", {"sub.electricity", Stage::Process}, {"sub.electricity", Stage::Release}},
      AddFlow{"", {"sub.electricity", Stage::Release}, {"sub.electricity", Stage::Transfer}},
      AddFlow{"", {"sub.electricity", Stage::Transfer}, {"home.electricity", Stage::Arrive}},
  });
  CHECK(structurally_equal(*parsed.value, by_hand));
}

TEST_CASE("nested spheres and machine-id paths parse") {
  auto r = parse_model(
      "sphere outer [kind=location] {\n"
      "  machine box { stages: Receive; }\n"
      "  sphere inner [kind=entity] {\n"
      "    machine box { stages: Create, Release, Transfer; }\n"
      "  }\n"
      "}\n"
      "flow inner.box.Transfer -> outer.box.Receive;\n");
  REQUIRE(r.ok());
  const Model& m = *r.value;
  REQUIRE(m.spheres.size() == 2);
  CHECK(m.spheres[1].parent == std::optional<std::string>("outer"));
  REQUIRE(m.flows.size() == 1);
  CHECK(m.flows[0].src.machine == "inner.box");
  CHECK(m.flows[0].dst.machine == "outer.box");
  CHECK(validate(m).ok());
}

TEST_CASE("machines without stages parse as empty") {
  auto r = parse_model("sphere a { machine m { } }");
  REQUIRE(r.ok());
  REQUIRE(r.value->machines.size() == 1);
  CHECK(r.value->machines[0].stages.empty());
  // The validator, not the parser, rejects it.
  CHECK_FALSE(validate(*r.value).ok());
}

TEST_CASE("guard text round-trips through the parser") {
  auto r = parse_guard("fails < 3 and attempts <= max_fails");
  REQUIRE(r.ok());
  CHECK(r.value->eval({{"fails", 2}, {"attempts", 1}, {"max_fails", 1}}));
  CHECK_FALSE(r.value->eval({{"fails", 3}}));

  // Precedence: or < and < not < cmp.
  auto p = parse_guard("a == 1 or b == 2 and not c == 3");
  REQUIRE(p.ok());
  Guard want = Guard::disj(
      Guard::counter_cmp("a", Guard::Cmp::Eq, 1),
      Guard::conj(Guard::counter_cmp("b", Guard::Cmp::Eq, 2),
                  Guard::negate(Guard::counter_cmp("c", Guard::Cmp::Eq, 3))));
  CHECK(*p.value == want);

  auto q = parse_guard("(a == 1 or b == 2) and c != 0");
  REQUIRE(q.ok());
  Guard want2 = Guard::conj(
      Guard::disj(Guard::counter_cmp("a", Guard::Cmp::Eq, 1),
                  Guard::counter_cmp("b", Guard::Cmp::Eq, 2)),
      Guard::counter_cmp("c", Guard::Cmp::Ne, 0));
  CHECK(*q.value == want2);

  CHECK_FALSE(parse_guard("fails <").ok());
  CHECK_FALSE(parse_guard("fails < 3 trailing").ok());
  CHECK_FALSE(parse_guard("").ok());

  testgen::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    Guard g = testgen::random_guard(rng);
    auto back = parse_guard(g.text());
    REQUIRE_MESSAGE(back.ok(), "guard text: " << g.text());
    CHECK_MESSAGE(*back.value == g, "guard text: " << g.text());
  }
}

TEST_CASE("formatted models re-parse to structurally equal models") {
  testgen::Rng rng(42);
  for (int i = 0; i < 100; ++i) {
    Model m = testgen::random_model(rng).model;
    std::string text = format_model(m);
    auto back = parse_model(text, "generated");
    REQUIRE_MESSAGE(back.ok(), "iteration " << i << "\n" << text);
    CHECK_MESSAGE(structurally_equal(*back.value, m), "iteration " << i << "\n"
                                                                   << text);
    // Formatting is idempotent on the re-parsed model.
    CHECK(format_model(*back.value) == text);
  }
}

TEST_CASE("formatter escapes names the way the lexer unescapes") {
  Model m = assemble({
      AddSphere{"a", "quote \" and slash \\ here", SphereKind::Device, {}},
      AddMachine{"", "a", "t", {Stage::Create}},
  });
  std::string text = format_model(m);
  auto back = parse_model(text);
  REQUIRE(back.ok());
  CHECK(back.value->spheres[0].name == "quote \" and slash \\ here");
}

TEST_CASE("parser fuzzing never crashes") {
  testgen::Rng rng(1234);
  for (int i = 0; i < 1500; ++i) {
    std::string text = testgen::random_garbage(rng);
    auto r = parse_model(text, "fuzz");
    if (r.ok()) {
      auto back = parse_model(format_model(*r.value), "refuzz");
      REQUIRE(back.ok());
      CHECK(structurally_equal(*back.value, *r.value));
    } else {
      CHECK_FALSE(r.diagnostics.empty());
    }
  }
  // Near-miss inputs: valid model text with a few random edits.
  for (int i = 0; i < 500; ++i) {
    Model m = testgen::random_model(rng).model;
    std::string text = testgen::mutate_text(rng, format_model(m));
    auto r = parse_model(text, "mutated");
    if (r.ok()) {
      auto back = parse_model(format_model(*r.value), "remutated");
      REQUIRE(back.ok());
      CHECK(structurally_equal(*back.value, *r.value));
    }
  }
}

TEST_CASE("scenario files parse fully") {
  auto r = parse_scenario(testio::slurp(testio::fixture("healthcare_success.fms")),
                          "healthcare_success.fms");
  REQUIRE(r.ok());
  const sim::Scenario& sc = *r.value;
  CHECK(sc.name == "success");
  REQUIRE(sc.placements.size() == 1);
  CHECK(sc.placements[0].at.machine == "sensor.data");
  CHECK(sc.placements[0].at.stage == Stage::Create);
  CHECK_FALSE(sc.placements[0].stored);

  REQUIRE(sc.counters.size() == 4);
  CHECK(sc.counters[0].name == "max_fails");
  CHECK(sc.counters[0].initial == 0);
  CHECK_FALSE(sc.counters[0].counts_label.has_value());
  CHECK(sc.counters[1].name == "block_data");
  CHECK(sc.counters[1].initial == 1);
  CHECK(sc.counters[2].name == "attempts");
  CHECK(sc.counters[2].counts_label == std::optional<std::string>("login_attempt"));
  CHECK(sc.counters[3].counts_label == std::optional<std::string>("E5"));

  REQUIRE(sc.control.nodes.size() == 9);
  const sim::EventPattern* e5 = sc.control.find_node("E5");
  REQUIRE(e5 != nullptr);
  CHECK(e5->kind == std::optional<sim::EventKind>(sim::EventKind::Guard));
  REQUIRE(e5->region.size() == 2);
  CHECK(e5->region[0].machine == "server.login");
  CHECK(e5->region[0].stage == Stage::Process);

  REQUIRE(sc.control.edges.size() == 6);
  const sim::ControlEdge* guarded = nullptr;
  for (const auto& e : sc.control.edges) {
    if (e.from == "E5" && e.to == "E6") guarded = &e;
  }
  REQUIRE(guarded != nullptr);
  REQUIRE(guarded->guard.has_value());
  CHECK(guarded->guard->text() == "fails == 3");
}

TEST_CASE("scenario payload, stored flag, and diagnostics") {
  auto r = parse_scenario(
      "scenario s {\n"
      "  place a.b.Create with owner=me, count=3, note=\"two words\" stored;\n"
      "  counter n = 2;\n"
      "}\n");
  REQUIRE(r.ok());
  const sim::Placement& p = r.value->placements[0];
  CHECK(p.stored);
  CHECK(p.payload.at("owner") == "me");
  CHECK(p.payload.at("count") == "3");
  CHECK(p.payload.at("note") == "two words");
  CHECK(r.value->counters[0].initial == 2);

  CHECK(has_code(parse_scenario("scenario s { counter n; counter n; }").diagnostics,
                 diag::DUPLICATE_ID));
  CHECK(has_code(parse_scenario("scenario s { event A at x.y.Create; event A at x.y.Create; }")
                     .diagnostics,
                 diag::DUPLICATE_ID));
  CHECK(has_code(parse_scenario("scenario s { precede A -> B; }").diagnostics,
                 diag::UNRESOLVED_REF));
  CHECK_FALSE(parse_scenario("place a.b.Create;").ok());  // no scenario block

  // Counting an undeclared label is suspicious but workable: warning only.
  auto w = parse_scenario("scenario s { counter n counts Ghost; }");
  REQUIRE(w.ok());
  CHECK(has_code(w.diagnostics, diag::UNRESOLVED_REF, Severity::Warning));

  CHECK(has_code(parse_scenario("scenario s { event A dance at x.y.Create; }")
                     .diagnostics,
                 diag::UNKNOWN_KIND));
}

TEST_CASE("control files parse standalone") {
  auto r = parse_control(testio::slurp(testio::fixture("healthcare.fmc")),
                         "healthcare.fmc");
  REQUIRE(r.ok());
  CHECK(r.value->nodes.size() == 9);
  CHECK(r.value->edges.size() == 6);
  CHECK(r.value->find_node("login_attempt") != nullptr);
  CHECK(r.value->find_node("nope") == nullptr);
}

TEST_CASE("policy files parse into typed rules") {
  auto r = parse_policies(testio::slurp(testio::fixture("finin.fmp")), "finin.fmp");
  REQUIRE(r.ok());
  REQUIRE(r.value->size() == 1);
  const policy::Policy& p = (*r.value)[0];
  CHECK(p.id == "finin");
  CHECK(p.kind == policy::PolicyKind::ContextProhibition);
  CHECK(p.subject == "me");
  REQUIRE(p.context.action.has_value());
  CHECK(p.context.action->stage == Stage::Create);
  CHECK(p.context.action->thing_type == "picture");
  REQUIRE(p.context.identity.has_value());
  CHECK(p.context.identity->is_group);
  CHECK(p.context.identity->id == "social_colleagues");
  CHECK(p.context.location == std::optional<std::string>("beach_house"));
  CHECK(p.context.time == std::optional<std::string>("weekend"));
  CHECK(p.context.activity == std::optional<std::string>("party"));

  auto kinds = parse_policies(
      "policy p1 solitude on Jean;\n"
      "policy p2 cutoff on me;\n"
      "policy p3 self_release on me;\n"
      "policy p4 deny release_record by warden on Jean;\n");
  REQUIRE(kinds.ok());
  REQUIRE(kinds.value->size() == 4);
  CHECK((*kinds.value)[0].kind == policy::PolicyKind::Solitude);
  CHECK((*kinds.value)[0].subject == "Jean");
  CHECK((*kinds.value)[1].kind == policy::PolicyKind::CutOffSources);
  CHECK((*kinds.value)[2].kind == policy::PolicyKind::SelfControlledRelease);
  const policy::Policy& p4 = (*kinds.value)[3];
  CHECK(p4.kind == policy::PolicyKind::ContextProhibition);
  REQUIRE(p4.context.action.has_value());
  CHECK(p4.context.action->stage == Stage::Release);
  CHECK(p4.context.action->thing_type == "record");
  REQUIRE(p4.context.identity.has_value());
  CHECK_FALSE(p4.context.identity->is_group);
  CHECK(p4.context.identity->id == "warden");

  CHECK(has_code(parse_policies("policy p deny create_x by bob;").diagnostics,
                 diag::MISSING_SUBJECT));
  CHECK(has_code(parse_policies("policy p deny dance_x on me;").diagnostics,
                 diag::BAD_ACTION));
  CHECK(has_code(parse_policies("policy p solitude on a; policy p cutoff on b;")
                     .diagnostics,
                 diag::DUPLICATE_ID));
  CHECK_FALSE(parse_policy("// none\n").ok());

  auto one = parse_policy("policy lone solitude on me;");
  REQUIRE(one.ok());
  CHECK(one.value->id == "lone");
}

TEST_CASE("assertion corpus parsing") {
  auto r = parse_assertions(testio::slurp(testio::fixture("corpus.txt")),
                            "corpus.txt");
  REQUIRE(r.ok());
  REQUIRE(r.assertions.size() == 9);
  CHECK(r.assertions[0].id == "a0");
  CHECK(r.assertions[8].id == "a8");
  CHECK(r.assertions[0].predicate == "wounded");
  REQUIRE(r.assertions[1].arguments.size() == 3);
  CHECK(r.assertions[1].arguments[2].text == "pen");
  CHECK(r.assertions[5].truth == pii::Truth::True);
  CHECK(r.assertions[6].truth == pii::Truth::False);
  CHECK(r.assertions[0].truth == pii::Truth::Unknown);

  auto mixed = parse_assertions(
      "# comment\n"
      "good(A)\n"
      "bad(((\n"
      "also_good(B) truth=F\n");
  CHECK_FALSE(mixed.ok());
  REQUIRE(mixed.assertions.size() == 2);
  CHECK(mixed.assertions[0].id == "a0");
  CHECK(mixed.assertions[1].id == "a1");  // ids count successes, not lines
  CHECK(mixed.assertions[1].truth == pii::Truth::False);

  auto quoted = parse_assertions("said(John, \"a \\\"b\\\" c\", 41, -3)\n");
  REQUIRE(quoted.ok());
  const pii::Assertion& a = quoted.assertions[0];
  REQUIRE(a.arguments.size() == 4);
  CHECK(a.arguments[1].quoted);
  CHECK(a.arguments[1].text == "a \"b\" c");
  CHECK(a.arguments[2].kind == pii::Term::Kind::Int);
  CHECK(a.arguments[2].ival == 41);
  CHECK(a.arguments[3].ival == -3);

  CHECK(has_code(parse_assertions("p(\"abc\n").diagnostics,
                 diag::UNTERMINATED_STRING));
  CHECK(has_code(parse_assertions("p(12x)\n").diagnostics, diag::BAD_NUMBER));
  CHECK(has_code(parse_assertions("p(a) ???\n").diagnostics,
                 diag::UNEXPECTED_CHAR));

  CHECK(parse_assertions("").ok());
  CHECK(parse_assertions("\n\n# only comments\n// both styles\n").ok());
}

TEST_CASE("healthcare fixture parses and validates") {
  auto r = parse_model(testio::slurp(testio::fixture("healthcare.fm")),
                       "healthcare.fm");
  REQUIRE(r.ok());
  CHECK(r.diagnostics.empty());
  CHECK(validate(*r.value).ok());
  CHECK(r.value->machines.size() == 16);
  CHECK(r.value->flows.size() == 29);
  CHECK(r.value->triggers.size() == 8);

  // Format -> reparse keeps the exact structure, guards included.
  auto back = parse_model(format_model(*r.value), "roundtrip");
  REQUIRE(back.ok());
  CHECK(structurally_equal(*back.value, *r.value));
}
