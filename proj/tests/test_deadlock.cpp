// Lock-order graph construction and deadlock-cycle enumeration.
#include "doctest.h"

#include "racefix/deadlock.hpp"
#include "racefix/jsonio.hpp"
#include "racefix/parser.hpp"

#include <fstream>
#include <sstream>

using namespace racefix;

namespace {

Program load_fixture(const std::string &name) {
  std::ifstream in(std::string(RACEFIX_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str(), name);
}

bool edge(const LockOrderGraph &g, const std::string &outer,
          const std::string &inner) {
  return g.has_edge(path_from_string(outer), path_from_string(inner));
}

std::vector<std::vector<std::string>>
rendered_cycles(const std::vector<std::vector<AccessPath>> &cycles) {
  std::vector<std::vector<std::string>> out;
  for (const auto &c : cycles) {
    std::vector<std::string> r;
    for (const auto &l : c)
      r.push_back(l.render());
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace

TEST_CASE("nesting inside one method orders the two monitors") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object la;\n"
                            "    Object lb;\n"
                            "\n"
                            "    void m() {\n"
                            "        synchronized(this.la) {\n"
                            "            synchronized(this.lb) {\n"
                            "                this.v = 1;\n"
                            "            }\n"
                            "        }\n"
                            "    }\n"
                            "}\n");
  LockOrderGraph g = build_lock_order(p);
  CHECK(g.nodes.size() == 2);
  CHECK(edge(g, "this.la", "this.lb"));
  CHECK_FALSE(edge(g, "this.lb", "this.la"));
  CHECK(find_deadlock_cycles(g).empty());
}

TEST_CASE("re-entrant acquisition is a self-edge, never a deadlock") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object l;\n"
                            "\n"
                            "    void m() {\n"
                            "        synchronized(this.l) {\n"
                            "            synchronized(this.l) {\n"
                            "                this.v = 1;\n"
                            "            }\n"
                            "        }\n"
                            "    }\n"
                            "}\n");
  LockOrderGraph g = build_lock_order(p);
  CHECK(edge(g, "this.l", "this.l"));
  CHECK(find_deadlock_cycles(g).empty());
}

TEST_CASE("opposite nestings across methods form a cycle") {
  Program p = load_fixture("example1_naive.mjcc");
  LockOrderGraph g = build_lock_order(p);
  CHECK(edge(g, "this.m1", "this.m2"));
  CHECK(edge(g, "this.m2", "this.m1"));
  auto cycles = find_deadlock_cycles(g);
  CHECK(rendered_cycles(cycles) ==
        std::vector<std::vector<std::string>>{{"this.m1", "this.m2"}});
}

TEST_CASE("a call under a held lock orders whatever the callee acquires") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object la;\n"
                            "    Object lb;\n"
                            "\n"
                            "    void outer() {\n"
                            "        synchronized(this.la) {\n"
                            "            this.inner();\n"
                            "        }\n"
                            "    }\n"
                            "\n"
                            "    void inner() {\n"
                            "        synchronized(this.lb) {\n"
                            "            this.v = 1;\n"
                            "        }\n"
                            "    }\n"
                            "}\n");
  LockOrderGraph g = build_lock_order(p);
  CHECK(edge(g, "this.la", "this.lb"));
  CHECK(find_deadlock_cycles(g).empty());
}

TEST_CASE("acquire sets are closed transitively through lock-free "
          "middlemen") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object la;\n"
                            "    Object lc;\n"
                            "\n"
                            "    void a() {\n"
                            "        synchronized(this.la) {\n"
                            "            this.b();\n"
                            "        }\n"
                            "    }\n"
                            "\n"
                            "    void b() {\n"
                            "        this.c();\n"
                            "    }\n"
                            "\n"
                            "    void c() {\n"
                            "        synchronized(this.lc) {\n"
                            "            this.v = 1;\n"
                            "        }\n"
                            "    }\n"
                            "}\n");
  LockOrderGraph g = build_lock_order(p);
  CHECK(edge(g, "this.la", "this.lc"));
}

TEST_CASE("an empty synchronized region still orders its lock") {
  // nothing is accessed under lb, but the nesting is real at runtime
  Program p = parse_program("class C {\n"
                            "    Object la;\n"
                            "    Object lb;\n"
                            "\n"
                            "    void outer() {\n"
                            "        synchronized(this.la) {\n"
                            "            this.inner();\n"
                            "        }\n"
                            "    }\n"
                            "\n"
                            "    void inner() {\n"
                            "        synchronized(this.lb) {\n"
                            "        }\n"
                            "    }\n"
                            "}\n");
  LockOrderGraph g = build_lock_order(p);
  CHECK(edge(g, "this.la", "this.lb"));
}

TEST_CASE("a region guarding only a volatile write still orders its lock") {
  Program p = parse_program("class C {\n"
                            "    volatile int flag;\n"
                            "    Object la;\n"
                            "    Object lb;\n"
                            "\n"
                            "    void outer() {\n"
                            "        synchronized(this.la) {\n"
                            "            this.inner();\n"
                            "        }\n"
                            "    }\n"
                            "\n"
                            "    void inner() {\n"
                            "        synchronized(this.lb) {\n"
                            "            this.flag = 1;\n"
                            "        }\n"
                            "    }\n"
                            "}\n");
  LockOrderGraph g = build_lock_order(p);
  CHECK(edge(g, "this.la", "this.lb"));
}

TEST_CASE("synchronized methods take their monitor before the body runs") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "    Object l;\n"
                            "\n"
                            "    synchronized void m() {\n"
                            "        synchronized(this.l) {\n"
                            "            this.v = 1;\n"
                            "        }\n"
                            "    }\n"
                            "\n"
                            "    static synchronized void sm() {\n"
                            "        C.g = 1;\n"
                            "    }\n"
                            "\n"
                            "    static int g;\n"
                            "\n"
                            "    void caller() {\n"
                            "        synchronized(this.l) {\n"
                            "            C.sm();\n"
                            "        }\n"
                            "    }\n"
                            "}\n");
  LockOrderGraph g = build_lock_order(p);
  // instance monitor is `this`; static monitor is the class object
  CHECK(edge(g, "this", "this.l"));
  CHECK(edge(g, "this.l", "C.class"));
  CHECK(g.nodes.count(path_from_string("C.class")) == 1);
}

TEST_CASE("cycle enumeration: every elementary cycle once, rotated to its "
          "least lock") {
  LockOrderGraph g;
  auto add = [&](const std::string &a, const std::string &b) {
    AccessPath pa = path_from_string(a), pb = path_from_string(b);
    g.nodes.insert(pa);
    g.nodes.insert(pb);
    g.edges.try_emplace({pa, pb}, SourceSpan{"t.mjcc", 1, 1, 1, 1});
  };
  // two overlapping cycles: a->b->a and a->b->c->a
  add("this.a", "this.b");
  add("this.b", "this.a");
  add("this.b", "this.c");
  add("this.c", "this.a");
  // a disjoint two-cycle
  add("this.x", "this.y");
  add("this.y", "this.x");
  // a chord that closes a third cycle through c->a
  add("this.a", "this.c");

  auto cycles = find_deadlock_cycles(g);
  CHECK(rendered_cycles(cycles) ==
        std::vector<std::vector<std::string>>{
            {"this.a", "this.b"},
            {"this.a", "this.b", "this.c"},
            {"this.a", "this.c"},
            {"this.x", "this.y"}});
}

TEST_CASE("cycles serialize with their locks and witness sites") {
  Program p = load_fixture("example1_naive.mjcc");
  LockOrderGraph g = build_lock_order(p);
  auto cycles = find_deadlock_cycles(g);
  auto j = cycles_to_json(cycles, g);
  REQUIRE(j.contains("cycles"));
  REQUIRE(j["cycles"].size() == 1);
  const auto &c = j["cycles"][0];
  CHECK(c["locks"] ==
        nlohmann::ordered_json::array({"this.m1", "this.m2"}));
  REQUIRE(c["witnesses"].size() == 2);
  for (const auto &w : c["witnesses"]) {
    CHECK(w.contains("file"));
    CHECK(w.contains("line"));
    CHECK(w.contains("col"));
    CHECK(w["file"] == "example1_naive.mjcc");
  }
  // the witnesses point at the two inner synchronized statements
  CHECK(c["witnesses"][0]["line"] == 12);
  CHECK(c["witnesses"][1]["line"] == 26);
}

TEST_CASE("the graph is insensitive to code that takes no locks") {
  Program p = parse_program("class C {\n"
                            "    int v;\n"
                            "\n"
                            "    void m(int n) {\n"
                            "        this.v = n;\n"
                            "        if (n > 0) {\n"
                            "            this.m(n - 1);\n"
                            "        }\n"
                            "    }\n"
                            "}\n");
  LockOrderGraph g = build_lock_order(p);
  CHECK(g.nodes.empty());
  CHECK(g.edges.empty());
  CHECK(find_deadlock_cycles(g).empty());
}
