// Acceptance harness: one pass/fail line per shipped guarantee.
// Usage: racefix_acceptance <corpus-dir> <fixtures-dir>
// Exit code is the number of failed criteria.
#include "racefix/deadlock.hpp"
#include "racefix/jsonio.hpp"
#include "racefix/parser.hpp"
#include "racefix/printer.hpp"
#include "racefix/repair.hpp"

#include "progen.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace racefix;
namespace fs = std::filesystem;

namespace {

std::string g_corpus_dir;
std::string g_fixture_dir;

Program load_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str(), fs::path(path).filename().string());
}

Program load_corpus(const std::string &name) {
  return load_file(g_corpus_dir + "/" + name);
}

std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto &e : fs::directory_iterator(g_corpus_dir))
    if (e.path().extension() == ".mjcc")
      out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct Criterion {
  std::string name;
  bool ok = true;
  std::vector<std::string> problems;

  void require(bool cond, const std::string &what) {
    if (!cond) {
      ok = false;
      problems.push_back(what);
    }
  }
};

// ---------------------------------------------------------------------------

void criterion_bank_example(Criterion &c) {
  auto t0 = std::chrono::steady_clock::now();

  Program p = load_corpus("datarace.mjcc");
  AnalysisResult ar = analyze_program(p);
  std::vector<Bug> bugs = detect_bugs(ar.summaries, ar.scope.roots);

  // exactly four racing pairs, identified by their statement lines
  std::set<std::pair<int, int>> pairs;
  for (const auto &b : bugs) {
    if (b.kind != Bug::Kind::Race)
      continue;
    int l1 = b.snapshots[0].site.start_line;
    int l2 = b.snapshots[1].site.start_line;
    pairs.insert({std::min(l1, l2), std::max(l1, l2)});
  }
  c.require(pairs == std::set<std::pair<int, int>>{
                         {22, 24}, {22, 31}, {24, 29}, {29, 31}},
            "race pairs are not exactly (22,24),(29,31),(22,31),(24,29)");
  c.require(cluster_bugs(bugs, p).size() == 1,
            "the four races do not form a single cluster");

  // the fix: one declared mutex in Account plus one guard per accessor
  RepairResult r = repair(p, RepairConfig{});
  c.require(r.status == RepairStatus::Fixed, "repair did not finish Fixed");
  c.require(r.applied.size() == 1, "expected exactly one applied patch");
  if (r.applied.size() == 1)
    c.require(r.applied[0].dsl ==
                  "DECLARE(Account, objR1, Object) AND "
                  "SYNC({Account.getBalance:5:9}, this.objR1) AND "
                  "SYNC({Account.setBalance:9:9}, this.objR1)",
              "patch shape differs: " + r.applied[0].dsl);

  ValidationResult v = validate(r.final_program);
  c.require(v.bugs.empty(), "races remain after the fix");
  c.require(v.cycles.empty(), "lock-order cycles appear after the fix");

  double dt = seconds_since(t0);
  c.require(dt < 1.0, "took " + std::to_string(dt) + "s (limit 1s)");
}

void criterion_deadlock_avoidance(Criterion &c) {
  auto t0 = std::chrono::steady_clock::now();

  RepairResult r = repair(load_corpus("example1.mjcc"), RepairConfig{});
  c.require(r.status == RepairStatus::Fixed, "repair did not finish Fixed");
  c.require(r.applied.size() == 1, "expected exactly one applied patch");
  if (r.applied.size() == 1) {
    const std::string &dsl = r.applied[0].dsl;
    size_t syncs = 0;
    for (size_t pos = dsl.find("SYNC({"); pos != std::string::npos;
         pos = dsl.find("SYNC({", pos + 1))
      ++syncs;
    c.require(syncs == 2, "accepted fix does not have exactly 2 SYNC "
                          "insertions: " + dsl);
    c.require(dsl.find("DECLARE") == std::string::npos &&
                  dsl.find("VOLATILE") == std::string::npos,
              "accepted fix is not pure SYNC: " + dsl);
  }
  c.require(
      find_deadlock_cycles(build_lock_order(r.final_program)).empty(),
      "lock-order graph of the fixed program is not acyclic");

  // wrapping all three accesses with both locks nests them in opposite
  // orders; that candidate must be refused for its two-lock cycle
  Program naive =
      load_file(g_fixture_dir + "/example1_naive.mjcc");
  auto cycles = find_deadlock_cycles(build_lock_order(naive));
  c.require(cycles.size() == 1, "naive patch: expected one cycle, got " +
                                    std::to_string(cycles.size()));
  if (cycles.size() == 1) {
    std::vector<std::string> locks;
    for (const auto &l : cycles[0])
      locks.push_back(l.render());
    c.require(locks == std::vector<std::string>{"this.m1", "this.m2"},
              "naive patch: cycle is not (m1, m2)");
  }

  double dt = seconds_since(t0);
  c.require(dt < 1.0, "took " + std::to_string(dt) + "s (limit 1s)");
}

void criterion_wrong_lock(Criterion &c) {
  Program p = load_corpus("wrongLock.mjcc");
  AnalysisResult ar = analyze_program(p);
  std::vector<Bug> bugs = detect_bugs(ar.summaries, ar.scope.roots);
  size_t races = 0;
  for (const auto &b : bugs)
    races += b.kind == Bug::Kind::Race;
  c.require(races >= 1, "no race found between the two guarded methods");

  RepairResult r = repair(p, RepairConfig{});
  c.require(r.status == RepairStatus::Fixed, "repair did not finish Fixed");

  // after the fix, every pair of accesses to the contended field shares a
  // lock
  AnalysisResult after = analyze_program(r.final_program);
  std::vector<const AccessSnapshot *> data_accesses;
  for (const auto &[key, summary] : after.summaries) {
    if (key.cls != "WrongLock")
      continue;
    for (const auto &s : summary.snapshots)
      if (s.path.render() == "this.data")
        data_accesses.push_back(&s);
  }
  c.require(data_accesses.size() >= 2, "contended accesses disappeared");
  for (size_t i = 0; i < data_accesses.size(); ++i) {
    for (size_t j = i + 1; j < data_accesses.size(); ++j) {
      std::vector<AccessPath> shared;
      std::set_intersection(data_accesses[i]->locks.begin(),
                            data_accesses[i]->locks.end(),
                            data_accesses[j]->locks.begin(),
                            data_accesses[j]->locks.end(),
                            std::back_inserter(shared));
      c.require(!shared.empty(), "two accesses still hold disjoint locks");
    }
  }

  ValidationResult v = validate(r.final_program);
  c.require(v.bugs.empty(), "bugs remain after the fix");
}

void criterion_corpus_suite(Criterion &c) {
  std::vector<std::string> files = corpus_files();
  c.require(files.size() >= 10, "corpus has fewer than 10 programs");
  for (const auto &f : files) {
    std::string name = fs::path(f).filename().string();
    auto t0 = std::chrono::steady_clock::now();
    RepairResult r = repair(load_file(f), RepairConfig{});
    double dt = seconds_since(t0);
    c.require(r.status == RepairStatus::Fixed, name + ": not Fixed");
    c.require(r.iterations_used <= 10,
              name + ": needed more than 10 iterations");
    c.require(dt < 2.0,
              name + ": took " + std::to_string(dt) + "s (limit 2s)");
  }
}

void criterion_oracle_equivalence(Criterion &c) {
  for (const auto &f : corpus_files()) {
    std::string name = fs::path(f).filename().string();
    Program p = load_file(f);
    AnalysisResult ar = analyze_program(p);
    std::vector<std::string> expect =
        testgen::brute_force_bug_keys(ar.summaries, ar.scope.roots);
    std::vector<std::string> got =
        testgen::bug_keys(detect_bugs(ar.summaries, ar.scope.roots));
    std::sort(expect.begin(), expect.end());
    std::sort(got.begin(), got.end());
    c.require(expect == got, name + ": detector disagrees with the "
                             "brute-force oracle");
  }
}

void criterion_property_suites(Criterion &c) {
  constexpr int kCases = 1000;

  // race symmetry over raw snapshot pairs, half biased onto one location
  {
    std::mt19937 rng(20260823);
    for (int i = 0; i < kCases && c.ok; ++i) {
      AccessSnapshot a = testgen::random_snapshot(rng);
      AccessSnapshot b = testgen::random_snapshot(rng);
      if (i % 2 == 0)
        b.path = a.path;
      if (auto err = testgen::check_race_symmetry(a, b))
        c.require(false, "race symmetry: " + *err);
    }
  }

  // program-level invariants, each over its own generated population
  struct Prop {
    const char *label;
    std::optional<std::string> (*check)(const Program &);
    unsigned seed;
  };
  const Prop props[] = {
      {"parse/render round trip", testgen::check_parse_render_roundtrip, 101},
      {"no lock removal", testgen::check_no_lock_removal, 103},
      {"cluster partition", testgen::check_cluster_partition, 107},
      {"common lock after repair", testgen::check_common_lock_after_repair,
       109},
      {"lock-order monotonicity", testgen::check_lock_order_monotonic, 113},
      {"deterministic pipeline", testgen::check_deterministic_pipeline, 127},
      {"detector oracle", testgen::check_detect_bugs_oracle, 131},
  };
  for (const auto &prop : props) {
    std::mt19937 rng(prop.seed);
    for (int i = 0; i < kCases; ++i) {
      Program p = testgen::generate_program(rng);
      // ids and spans come from parsing the rendered text
      Program parsed = parse_program(render_program(p), "gen.mjcc");
      if (auto err = prop.check(parsed)) {
        c.require(false, std::string(prop.label) + " (case " +
                             std::to_string(i) + "): " + *err);
        break;
      }
    }
  }
}

void criterion_summary_boundary(Criterion &c) {
  for (const auto &f : corpus_files()) {
    std::string name = fs::path(f).filename().string();
    Program p = load_file(f);

    RepairResult direct = repair(p, RepairConfig{});

    // through the serialized form: export, re-parse, import, fix
    SummaryMap exported = analyze_program(p).summaries;
    nlohmann::ordered_json wire =
        nlohmann::ordered_json::parse(summaries_to_json(exported).dump(2));
    SummaryMap imported = summaries_from_json(wire);
    RepairResult via_json = repair(p, RepairConfig{}, nullptr, &imported);

    bool same = direct.applied.size() == via_json.applied.size();
    for (size_t i = 0; same && i < direct.applied.size(); ++i)
      same = direct.applied[i].dsl == via_json.applied[i].dsl &&
             direct.applied[i].diff == via_json.applied[i].diff;
    c.require(same, name + ": imported summaries give a different patch");
    c.require(render_program(direct.final_program) ==
                  render_program(via_json.final_program),
              name + ": final programs differ");
  }
}

} // namespace

int main(int argc, char **argv) {
  if (argc != 3) {
    std::cerr << "usage: racefix_acceptance <corpus-dir> <fixtures-dir>\n";
    return 64;
  }
  g_corpus_dir = argv[1];
  g_fixture_dir = argv[2];

  struct Entry {
    std::string name;
    void (*fn)(Criterion &);
  };
  const Entry entries[] = {
      {"bank example: 4 races, one cluster, accessor patch, clean "
       "revalidation, <1s",
       criterion_bank_example},
      {"deadlock avoidance: 2-SYNC fix accepted, opposite-order patch "
       "refused with its (m1,m2) cycle, <1s",
       criterion_deadlock_avoidance},
      {"wrong-lock pattern: race found, fix gives the accesses a common "
       "lock, 0 bugs after",
       criterion_wrong_lock},
      {"corpus suite: every program Fixed within 10 iterations, <2s each",
       criterion_corpus_suite},
      {"oracle equivalence: detector matches the brute-force pair scan on "
       "every corpus program",
       criterion_oracle_equivalence},
      {"property suites: seven invariants over 1000 generated cases each",
       criterion_property_suites},
      {"summary boundary: export/import/fix equals the end-to-end patch on "
       "every corpus program",
       criterion_summary_boundary},
  };

  int failures = 0;
  int index = 0;
  for (const auto &entry : entries) {
    ++index;
    Criterion c;
    c.name = entry.name;
    try {
      entry.fn(c);
    } catch (const std::exception &e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (c.ok ? "[PASS] " : "[FAIL] ") << "criterion " << index
              << ": " << c.name << "\n";
    for (const auto &problem : c.problems)
      std::cout << "       - " << problem << "\n";
    failures += c.ok ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) +
                                    " criteria failed")
            << "\n";
  return failures;
}
