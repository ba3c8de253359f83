// Randomized property suites.  Each property runs over at least a thousand
// generated inputs; programs are always re-parsed from their own rendering
// first so statement ids and source spans are the real parser-assigned ones.
#include "doctest.h"
#include "progen.hpp"

#include "racefix/parser.hpp"
#include "racefix/printer.hpp"

#include <functional>
#include <random>

using namespace racefix;
using namespace racefix::testgen;

namespace {

constexpr int kCases = 1000;

Program reparsed(std::mt19937 &rng) {
  Program g = generate_program(rng);
  return parse_program(render_program(g), "gen.mjcc");
}

void run_program_property(
    unsigned seed,
    const std::function<std::optional<std::string>(const Program &)> &check) {
  std::mt19937 rng(seed);
  for (int i = 0; i < kCases; ++i) {
    Program p = reparsed(rng);
    auto failure = check(p);
    if (failure) {
      CAPTURE(i);
      CAPTURE(render_program(p));
      FAIL_CHECK(*failure);
      return; // one counterexample is enough; keep the log readable
    }
  }
}

} // namespace

TEST_CASE("property: rendering is a parse fixed point") {
  std::mt19937 rng(11);
  for (int i = 0; i < kCases; ++i) {
    Program g = generate_program(rng);
    auto failure = check_parse_render_roundtrip(g);
    if (failure) {
      CAPTURE(i);
      FAIL_CHECK(*failure);
      return;
    }
  }
}

TEST_CASE("property: race predicate is symmetric") {
  std::mt19937 rng(13);
  for (int i = 0; i < 5 * kCases; ++i) {
    AccessSnapshot a = random_snapshot(rng);
    AccessSnapshot b = random_snapshot(rng);
    // bias half the pairs onto the same path so the interesting branch runs
    if (i % 2 == 0)
      b.path = a.path;
    auto failure = check_race_symmetry(a, b);
    if (failure) {
      CAPTURE(i);
      FAIL_CHECK(*failure);
      return;
    }
  }
}

TEST_CASE("property: clusters partition the bug list") {
  run_program_property(17, check_cluster_partition);
}

TEST_CASE("property: patches never remove a synchronized region") {
  run_program_property(19, check_no_lock_removal);
}

TEST_CASE("property: repaired conflicting accesses share a lock") {
  run_program_property(23, check_common_lock_after_repair);
}

TEST_CASE("property: patches only grow the lock order") {
  run_program_property(29, check_lock_order_monotonic);
}

TEST_CASE("property: the whole pipeline is deterministic") {
  run_program_property(31, check_deterministic_pipeline);
}

TEST_CASE("property: bug detection matches a brute-force oracle") {
  run_program_property(37, check_detect_bugs_oracle);
}
