#pragma once

#include "racefix/ast.hpp"
#include "racefix/deadlock.hpp"
#include "racefix/lower.hpp"
#include "racefix/race.hpp"
#include "racefix/synth.hpp"

#include <functional>
#include <string>
#include <vector>

namespace racefix {

enum class RepairMode { Auto, Interactive };
enum class RepairStatus { Fixed, Partial, Exhausted };

struct RepairConfig {
  int max_iterations = 10;
  LockStrategy lock_strategy = LockStrategy::Frequency;
  PatchTarget patch_target = PatchTarget::Root;
  RepairMode mode = RepairMode::Auto;
  bool keep_history = false; // retain the rendered source after each step
};

// One accepted patch application.
struct AppliedPatch {
  int iteration = 0;
  std::string cluster_path;
  std::string cluster_cls;
  std::string dsl;
  size_t cost = 0;
  size_t alternative_index = 0; // position in the cost-sorted candidate list
  std::string diff;             // unified diff of this application
};

struct RepairResult {
  RepairStatus status = RepairStatus::Fixed;
  Program final_program;
  std::vector<AppliedPatch> applied;
  size_t final_bug_count = 0;
  int deadlock_rejections = 0;
  int iterations_used = 0;
  std::vector<std::string> diagnostics;
  std::vector<std::string> history; // filled when cfg.keep_history
};

struct ValidationResult {
  std::vector<Bug> bugs;
  std::vector<std::vector<AccessPath>> cycles;
};

// Intrusiveness of a fix: the number of tree edits it performs.
size_t cost(const AstAlternative &alt);

// Full re-analysis of a (possibly patched) program: remaining bugs plus
// lock-order cycles.
ValidationResult validate(const Program &program);

// Interactive chooser: given the cluster under repair, the surviving
// alternatives, and their diffs, return an index into the list or -1 to
// abort.
using InteractiveSelector = std::function<int(
    const BugCluster &cluster, const std::vector<AstAlternative> &alternatives,
    const std::vector<std::string> &diffs)>;

// The repair loop: detect and cluster bugs, synthesize and lower patches for
// the first still-fixable cluster, try alternatives cheapest-first, keep the
// first one that survives validation (no lingering cluster bug, no new bug,
// no new lock-order cycle), and iterate on the re-parsed result.
// `initial_summaries`, when given, replace the first iteration's analysis
// (summaries imported from JSON); later iterations re-analyze as usual.
RepairResult repair(const Program &program, const RepairConfig &cfg,
                    const InteractiveSelector &select = nullptr,
                    const SummaryMap *initial_summaries = nullptr);

} // namespace racefix
