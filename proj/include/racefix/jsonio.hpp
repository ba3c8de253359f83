#pragma once

#include "racefix/deadlock.hpp"
#include "racefix/race.hpp"
#include "racefix/repair.hpp"
#include "racefix/summary.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace racefix {

// Parse a rendered access path ("this.accounts.[*].balance") back into its
// components.
AccessPath path_from_string(const std::string &s);

// Snapshot schema (field order fixed):
//   {"path","kind","locks","thread","ownership","trace","site"}
// with ownership either the string "Unowned" or {"ownedIf":[int]}.
nlohmann::ordered_json snapshot_to_json(const AccessSnapshot &snap);
AccessSnapshot snapshot_from_json(const nlohmann::ordered_json &j);

// {"summaries":[{"class","method","snapshots":[...]}]}
nlohmann::ordered_json summaries_to_json(const SummaryMap &sm);
SummaryMap summaries_from_json(const nlohmann::ordered_json &j);

// {"bugs":[{"kind":"race"|"unprotected_write","snapshots":[...]}]}
nlohmann::ordered_json bugs_to_json(const std::vector<Bug> &bugs);

// {"cycles":[{"locks":[...],"witnesses":[{"file","line","col"}]}]}
nlohmann::ordered_json
cycles_to_json(const std::vector<std::vector<AccessPath>> &cycles,
               const LockOrderGraph &g);

// Full fix report: status, counters, per-iteration patches with DSL text and
// unified diffs, and diagnostics.
nlohmann::ordered_json repair_report_to_json(const RepairResult &result);

} // namespace racefix
