// Lowering patch encodings to tree edits and applying them: slice selection,
// hoisting, merging, conflict handling, and member edits.
#include "doctest.h"

#include "racefix/diagnostics.hpp"
#include "racefix/jsonio.hpp"
#include "racefix/lower.hpp"
#include "racefix/parser.hpp"
#include "racefix/printer.hpp"
#include "racefix/race.hpp"
#include "racefix/synth.hpp"

#include <fstream>
#include <sstream>

using namespace racefix;

namespace {

Program load(const std::string &name) {
  std::ifstream in(std::string(RACEFIX_CORPUS_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str(), name);
}

SyncTarget at(const std::string &cls, const std::string &method, int line,
              int col) {
  SyncTarget t;
  t.cls = cls;
  t.method = method;
  t.snapshot.site = SourceSpan{"<memory>", line, col, line, col};
  return t;
}

bool contains(const std::string &hay, const std::string &needle) {
  return hay.find(needle) != std::string::npos;
}

// How often `needle` occurs in `hay`.
size_t count_of(const std::string &hay, const std::string &needle) {
  size_t n = 0;
  for (size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + 1))
    ++n;
  return n;
}

} // namespace

TEST_CASE("insert_lock: a single statement is wrapped in place") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object lk;\n"
                            "\n"
                            "    void m() {\n"
                            "        this.v = 1;\n"
                            "        this.v = 2;\n"
                            "    }\n"
                            "}\n");
  PatchAction sync =
      PatchAction::sync({at("C", "m", 6, 9)}, path_from_string("this.lk"));
  auto actions = insert_lock(sync, p);
  REQUIRE(actions.size() == 1);
  CHECK(actions[0].kind == AstAction::Kind::Replace);
  const StmtLoc &loc = std::get<StmtLoc>(actions[0].ref);
  CHECK(loc.first_id == loc.last_id);

  AstAlternative alt;
  alt.actions = actions;
  std::string out = render_program(apply_patch(p, alt));
  CHECK(contains(out, "synchronized(this.lk) {\n"
                      "            this.v = 1;\n"
                      "        }\n"
                      "        this.v = 2;"));
}

TEST_CASE("insert_lock: multiple targets wrap the smallest covering run of "
          "siblings") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    int u;\n"
                            "    Object lk;\n"
                            "\n"
                            "    void m() {\n"
                            "        this.v = 1;\n"
                            "        this.u = 5;\n"
                            "        this.v = 2;\n"
                            "        this.u = 6;\n"
                            "    }\n"
                            "}\n");
  PatchAction sync = PatchAction::sync(
      {at("C", "m", 7, 9), at("C", "m", 9, 9)}, path_from_string("this.lk"));
  auto actions = insert_lock(sync, p);
  REQUIRE(actions.size() == 1);

  AstAlternative alt;
  alt.actions = actions;
  std::string out = render_program(apply_patch(p, alt));
  // the statement between the targets rides along; the one after does not
  CHECK(contains(out, "synchronized(this.lk) {\n"
                      "            this.v = 1;\n"
                      "            this.u = 5;\n"
                      "            this.v = 2;\n"
                      "        }\n"
                      "        this.u = 6;"));
}

TEST_CASE("insert_lock: locals that outlive the region are hoisted, "
          "initializers stay inside") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    int u;\n"
                            "    Object lk;\n"
                            "\n"
                            "    void m() {\n"
                            "        this.v = 1;\n"
                            "        int t = this.v;\n"
                            "        this.v = 2;\n"
                            "        this.u = t;\n"
                            "    }\n"
                            "}\n");
  PatchAction sync = PatchAction::sync(
      {at("C", "m", 7, 9), at("C", "m", 9, 9)}, path_from_string("this.lk"));
  auto actions = insert_lock(sync, p);
  REQUIRE(actions.size() == 2);
  CHECK(actions[0].kind == AstAction::Kind::InsertBefore);
  CHECK(actions[1].kind == AstAction::Kind::Replace);

  AstAlternative alt;
  alt.actions = actions;
  std::string out = render_program(apply_patch(p, alt));
  CHECK(contains(out, "        int t;\n"
                      "        synchronized(this.lk) {\n"
                      "            this.v = 1;\n"
                      "            t = this.v;\n"
                      "            this.v = 2;\n"
                      "        }\n"
                      "        this.u = t;"));
}

TEST_CASE("insert_lock: a local consumed inside the region is not hoisted") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object lk;\n"
                            "\n"
                            "    void m() {\n"
                            "        this.v = 1;\n"
                            "        int t = this.v;\n"
                            "        this.v = t;\n"
                            "    }\n"
                            "}\n");
  PatchAction sync = PatchAction::sync(
      {at("C", "m", 6, 9), at("C", "m", 8, 9)}, path_from_string("this.lk"));
  auto actions = insert_lock(sync, p);
  REQUIRE(actions.size() == 1);
  AstAlternative alt;
  alt.actions = actions;
  std::string out = render_program(apply_patch(p, alt));
  CHECK(contains(out, "            int t = this.v;"));
}

TEST_CASE("insert_lock: when one target contains the others, only the "
          "ancestor is wrapped") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object lk;\n"
                            "\n"
                            "    void m(int c) {\n"
                            "        if (c > 0) {\n"
                            "            this.v = 1;\n"
                            "        }\n"
                            "    }\n"
                            "}\n");
  // target both the `if` (6:9) and the write inside it (7:13)
  PatchAction sync = PatchAction::sync(
      {at("C", "m", 6, 9), at("C", "m", 7, 13)}, path_from_string("this.lk"));
  auto actions = insert_lock(sync, p);
  REQUIRE(actions.size() == 1);

  AstAlternative alt;
  alt.actions = actions;
  std::string out = render_program(apply_patch(p, alt));
  CHECK(contains(out, "synchronized(this.lk) {\n"
                      "            if (c > 0) {\n"
                      "                this.v = 1;\n"
                      "            }\n"
                      "        }"));
  CHECK(count_of(out, "synchronized") == 1);
}

TEST_CASE("insert_lock: a target inside an else branch is wrapped there") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object lk;\n"
                            "\n"
                            "    void m(int c) {\n"
                            "        if (c > 0) {\n"
                            "            this.v = 1;\n"
                            "        } else {\n"
                            "            this.v = 2;\n"
                            "        }\n"
                            "    }\n"
                            "}\n");
  PatchAction sync =
      PatchAction::sync({at("C", "m", 9, 13)}, path_from_string("this.lk"));
  AstAlternative alt;
  alt.actions = insert_lock(sync, p);
  std::string out = render_program(apply_patch(p, alt));
  CHECK(contains(out, "} else {\n"
                      "            synchronized(this.lk) {\n"
                      "                this.v = 2;\n"
                      "            }\n"
                      "        }"));
}

TEST_CASE("insert_lock: targets split across then and else wrap the whole "
          "conditional") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object lk;\n"
                            "\n"
                            "    void m(int c) {\n"
                            "        if (c > 0) {\n"
                            "            this.v = 1;\n"
                            "        } else {\n"
                            "            this.v = 2;\n"
                            "        }\n"
                            "    }\n"
                            "}\n");
  PatchAction sync = PatchAction::sync(
      {at("C", "m", 7, 13), at("C", "m", 9, 13)}, path_from_string("this.lk"));
  AstAlternative alt;
  alt.actions = insert_lock(sync, p);
  std::string out = render_program(apply_patch(p, alt));
  CHECK(contains(out, "synchronized(this.lk) {\n"
                      "            if (c > 0) {"));
  CHECK(count_of(out, "synchronized") == 1);
}

TEST_CASE("insert_lock: stale sites and missing methods are rejected") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "\n"
                            "    void m() {\n"
                            "        this.v = 1;\n"
                            "    }\n"
                            "}\n");
  CHECK_THROWS_AS(
      insert_lock(PatchAction::sync({at("C", "gone", 5, 9)},
                                    path_from_string("this.lk")),
                  p),
      StalePatchError);
  CHECK_THROWS_AS(
      insert_lock(PatchAction::sync({at("C", "m", 99, 9)},
                                    path_from_string("this.lk")),
                  p),
      StalePatchError);
}

TEST_CASE("declare_variable: first member, final, initialized; static only "
          "when needed") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "\n"
                            "    void m() {\n"
                            "        this.v = 1;\n"
                            "    }\n"
                            "\n"
                            "    static void sm() {\n"
                            "        C.g = 2;\n"
                            "    }\n"
                            "\n"
                            "    static int g;\n"
                            "}\n");

  SUBCASE("instance context") {
    std::vector<PatchAction> peers = {PatchAction::sync(
        {at("C", "m", 5, 9)}, path_from_string("this.objR1"))};
    AstAction act = declare_variable("C", "objR1", "Object", peers, p);
    AstAlternative alt;
    alt.actions = {act};
    std::string out = render_program(apply_patch(p, alt));
    CHECK(contains(out, "class C {\n    final Object objR1 = new Object();"));
  }
  SUBCASE("a peer sync in a static method forces a static lock") {
    std::vector<PatchAction> peers = {PatchAction::sync(
        {at("C", "sm", 9, 9)}, path_from_string("C.objR1"))};
    AstAction act = declare_variable("C", "objR1", "Object", peers, p);
    AstAlternative alt;
    alt.actions = {act};
    std::string out = render_program(apply_patch(p, alt));
    CHECK(contains(out,
                   "class C {\n    static final Object objR1 = new Object();"));
  }
  SUBCASE("a class-rooted lock spelling forces a static lock") {
    std::vector<PatchAction> peers = {PatchAction::sync(
        {at("C", "m", 5, 9)}, path_from_string("C.objR1"))};
    AstAction act = declare_variable("C", "objR1", "Object", peers, p);
    REQUIRE(act.field.has_value());
    CHECK(act.field->is_static);
  }
  SUBCASE("existing names are refused") {
    CHECK_THROWS_AS(declare_variable("C", "v", "Object", {}, p),
                    FreshNameError);
    CHECK_THROWS_AS(declare_variable("Gone", "objR1", "Object", {}, p),
                    StalePatchError);
  }
}

TEST_CASE("make_volatile: adds the modifier, warns on arrays, no-ops when "
          "already volatile") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    volatile int w;\n"
                            "    int[] xs;\n"
                            "}\n");
  std::vector<std::string> warnings;

  auto acts = make_volatile("v", "C", p, warnings);
  REQUIRE(acts.size() == 1);
  CHECK(warnings.empty());
  AstAlternative alt;
  alt.actions = acts;
  std::string out = render_program(apply_patch(p, alt));
  CHECK(contains(out, "volatile int v;"));

  CHECK(make_volatile("w", "C", p, warnings).empty());
  CHECK(warnings.empty());

  auto arr = make_volatile("xs", "C", p, warnings);
  CHECK(arr.size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(contains(warnings[0], "guards the reference, not the elements"));

  CHECK_THROWS_AS(make_volatile("gone", "C", p, warnings), StalePatchError);
}

TEST_CASE("create_patch: SYNCs sharing a method and lock merge into one "
          "region") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object lk;\n"
                            "\n"
                            "    void m() {\n"
                            "        this.v = 1;\n"
                            "        this.v = 2;\n"
                            "    }\n"
                            "}\n");
  PatchEncoding enc;
  enc.cluster_path = path_from_string("this.v");
  enc.cluster_cls = "C";
  PatchAlternative alt;
  alt.actions = {
      PatchAction::sync({at("C", "m", 6, 9)}, path_from_string("this.lk")),
      PatchAction::sync({at("C", "m", 7, 9)}, path_from_string("this.lk"))};
  enc.alternatives = {alt};

  AstPatch patch = create_patch(enc, p);
  REQUIRE(patch.alternatives.size() == 1);
  CHECK(patch.alternatives[0].dsl ==
        "SYNC({C.m:6:9, C.m:7:9}, this.lk)");
  REQUIRE(patch.alternatives[0].actions.size() == 1);
  std::string out = render_program(apply_patch(p, patch.alternatives[0]));
  CHECK(count_of(out, "synchronized") == 1);
}

TEST_CASE("create_patch: wildcard locks have no monitor spelling and drop "
          "the alternative") {
  Program p = parse_program("class C {\n"
                            "    int[] xs;\n"
                            "\n"
                            "    void m(int i) {\n"
                            "        this.xs[i] = 1;\n"
                            "    }\n"
                            "}\n");
  PatchEncoding enc;
  enc.cluster_path = path_from_string("this.xs.[*]");
  enc.cluster_cls = "C";
  PatchAlternative alt;
  alt.actions = {PatchAction::sync({at("C", "m", 5, 9)},
                                   path_from_string("this.xs.[*].objR1"))};
  enc.alternatives = {alt};
  CHECK(create_patch(enc, p).alternatives.empty());
}

TEST_CASE("create_patch: overlapping regions for different locks drop the "
          "alternative") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object la;\n"
                            "    Object lb;\n"
                            "\n"
                            "    void m() {\n"
                            "        this.v = 1;\n"
                            "        this.v = 2;\n"
                            "    }\n"
                            "}\n");
  PatchEncoding enc;
  enc.cluster_path = path_from_string("this.v");
  enc.cluster_cls = "C";
  PatchAlternative bad;
  bad.actions = {
      PatchAction::sync({at("C", "m", 7, 9), at("C", "m", 8, 9)},
                        path_from_string("this.la")),
      PatchAction::sync({at("C", "m", 8, 9)}, path_from_string("this.lb"))};
  PatchAlternative good;
  good.actions = {
      PatchAction::sync({at("C", "m", 7, 9)}, path_from_string("this.la"))};
  enc.alternatives = {bad, good};

  AstPatch patch = create_patch(enc, p);
  REQUIRE(patch.alternatives.size() == 1);
  CHECK(patch.alternatives[0].dsl == "SYNC({C.m:7:9}, this.la)");
}

TEST_CASE("apply_patch: the input program is untouched and new statements "
          "get fresh ids") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object lk;\n"
                            "\n"
                            "    void m() {\n"
                            "        this.v = 1;\n"
                            "    }\n"
                            "}\n");
  std::string before = render_program(p);
  AstAlternative alt;
  alt.actions = insert_lock(
      PatchAction::sync({at("C", "m", 6, 9)}, path_from_string("this.lk")), p);

  Program q = apply_patch(p, alt);
  CHECK(render_program(p) == before);

  // same alternative against the same base program: deterministic result
  Program q2 = apply_patch(p, alt);
  CHECK(render_program(q) == render_program(q2));

  // every statement in the result has a usable id
  std::function<void(const std::vector<Stmt> &)> walk =
      [&](const std::vector<Stmt> &list) {
        for (const auto &s : list) {
          CHECK(s.id >= 0);
          walk(s.body);
          walk(s.else_body);
        }
      };
  for (const auto &c : q.classes)
    for (const auto &m : c.methods)
      walk(m.body);

  // a reference to ids that never existed is stale
  AstAlternative bogus;
  AstAction bad;
  bad.kind = AstAction::Kind::Replace;
  bad.ref = StmtLoc{"C", "m", 987654, 987654};
  bogus.actions = {bad};
  CHECK_THROWS_AS(apply_patch(p, bogus), StalePatchError);
}

TEST_CASE("apply_patch: overlapping replacements are rejected") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object la;\n"
                            "    Object lb;\n"
                            "\n"
                            "    void m() {\n"
                            "        this.v = 1;\n"
                            "        this.v = 2;\n"
                            "    }\n"
                            "}\n");
  AstAlternative alt;
  for (const auto &[lock, line] :
       std::vector<std::pair<std::string, int>>{{"this.la", 7},
                                                {"this.lb", 8}}) {
    auto acts = insert_lock(
        PatchAction::sync({at("C", "m", 7, 9), at("C", "m", line, 9)},
                          path_from_string(lock)),
        p);
    for (auto &a : acts)
      alt.actions.push_back(std::move(a));
  }
  CHECK_THROWS_AS(apply_patch(p, alt), ConflictError);
}

TEST_CASE("bank corpus: the lowered fix rewrites both accessors and "
          "declares the mutex first") {
  Program p = load("datarace.mjcc");
  AnalysisResult ar = analyze_program(p);
  auto clusters =
      cluster_bugs(detect_bugs(ar.summaries, ar.scope.roots), p);
  REQUIRE(clusters.size() == 1);
  PatchEncoding enc =
      create_patch_encoding(clusters[0], LockStrategy::Frequency,
                            ar.summaries, p, PatchTarget::Root);
  AstPatch patch = create_patch(enc, p);
  REQUIRE(patch.alternatives.size() == 2);
  // DECLARE -> one member insert; two SYNCs -> one replace each
  CHECK(patch.alternatives[0].cost() == 3);

  std::string out = render_program(apply_patch(p, patch.alternatives[0]));
  CHECK(contains(out, "class Account {\n"
                      "    final Object objR1 = new Object();"));
  CHECK(contains(out, "    int getBalance() {\n"
                      "        synchronized(this.objR1) {\n"
                      "            return this.balance;\n"
                      "        }\n"
                      "    }"));
  CHECK(contains(out, "    void setBalance(int balance) {\n"
                      "        synchronized(this.objR1) {\n"
                      "            this.balance = balance;\n"
                      "        }\n"
                      "    }"));

  // the volatile alternative rewrites one declaration
  std::string vol = render_program(apply_patch(p, patch.alternatives[1]));
  CHECK(contains(vol, "volatile int balance;"));
}
