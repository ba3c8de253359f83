// Deterministic random-program generator plus the oracle and property
// checks shared between the unit/property suite and the acceptance runner.
#pragma once

#include "racefix/ast.hpp"
#include "racefix/race.hpp"
#include "racefix/summary.hpp"

#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace racefix::testgen {

// Random well-formed program: every call resolves, every path steps through
// declared fields, locals are unique per method.  Rendering it and parsing
// the result is the intended way to obtain ids and spans.
Program generate_program(std::mt19937 &rng);

// Snapshot with arbitrary field values; used to probe the bug predicates
// over the whole input domain rather than only analyzer-produced values.
AccessSnapshot random_snapshot(std::mt19937 &rng);

// Independent re-statement of the bug definitions: a plain double loop over
// each root class's snapshots with the race / unprotected-write conditions
// written out locally.  Returns the same (kind, path, sites) identities
// detect_bugs must produce.
std::vector<std::string> brute_force_bug_keys(const SummaryMap &sm,
                                              const std::set<std::string> &roots);

// The same identity keys for a detect_bugs result.
std::vector<std::string> bug_keys(const std::vector<Bug> &bugs);

// Each check returns std::nullopt on success and a diagnostic on failure.
std::optional<std::string> check_parse_render_roundtrip(const Program &p);
std::optional<std::string> check_race_symmetry(const AccessSnapshot &a,
                                               const AccessSnapshot &b);
std::optional<std::string> check_cluster_partition(const Program &p);
std::optional<std::string> check_no_lock_removal(const Program &p);
std::optional<std::string> check_common_lock_after_repair(const Program &p);
std::optional<std::string> check_lock_order_monotonic(const Program &p);
std::optional<std::string> check_deterministic_pipeline(const Program &p);
std::optional<std::string> check_detect_bugs_oracle(const Program &p);

} // namespace racefix::testgen
