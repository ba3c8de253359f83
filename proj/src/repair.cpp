#include "racefix/repair.hpp"

#include "racefix/parser.hpp"
#include "racefix/printer.hpp"
#include "racefix/textdiff.hpp"

#include <algorithm>
#include <set>

namespace racefix {

size_t cost(const AstAlternative &alt) { return alt.cost(); }

ValidationResult validate(const Program &program) {
  ValidationResult out;
  AnalysisResult analysis = analyze_program(program);
  out.bugs = detect_bugs(analysis.summaries, analysis.scope.roots);
  out.cycles =
      find_deadlock_cycles(build_lock_order(program));
  return out;
}

namespace {

std::string cluster_label(const BugCluster &c) {
  return c.path.render() + " in " + c.cls;
}

} // namespace

RepairResult repair(const Program &input, const RepairConfig &cfg,
                    const InteractiveSelector &select,
                    const SummaryMap *initial_summaries) {
  RepairResult res;
  Program program = input;
  std::set<std::pair<std::string, std::string>> failed_clusters;
  bool aborted = false;
  bool first_pass = true;

  if (cfg.keep_history)
    res.history.push_back(render_program(program));

  int iter = 0;
  while (iter < cfg.max_iterations && !aborted) {
    AnalysisResult analysis;
    if (first_pass && initial_summaries) {
      analysis.summaries = *initial_summaries;
      analysis.scope = infer_scope(program);
    } else {
      analysis = analyze_program(program);
    }
    first_pass = false;
    std::vector<Bug> bugs =
        detect_bugs(analysis.summaries, analysis.scope.roots);
    if (bugs.empty())
      break;

    std::vector<BugCluster> clusters = cluster_bugs(bugs, program);
    const BugCluster *cluster = nullptr;
    for (const auto &c : clusters) {
      if (!failed_clusters.count({c.path.render(), c.cls})) {
        cluster = &c;
        break;
      }
    }
    if (!cluster)
      break; // every remaining cluster already exhausted its alternatives
    ++iter;

    std::set<std::string> pre_sigs;
    for (const auto &b : bugs)
      pre_sigs.insert(bug_signature(b));
    auto cycles_before_list =
        find_deadlock_cycles(build_lock_order(program));
    std::set<std::vector<AccessPath>> cycles_before(cycles_before_list.begin(),
                                                    cycles_before_list.end());

    PatchEncoding enc =
        create_patch_encoding(*cluster, cfg.lock_strategy, analysis.summaries,
                              program, cfg.patch_target);
    AstPatch patch = create_patch(enc, program);
    std::vector<AstAlternative> alts = patch.alternatives;
    // Cheapest fix first; volatile stays the last resort regardless of cost.
    std::stable_sort(alts.begin(), alts.end(),
                     [](const AstAlternative &a, const AstAlternative &b) {
                       if (a.is_volatile != b.is_volatile)
                         return b.is_volatile;
                       return a.cost() < b.cost();
                     });

    std::string before_text = render_program(program);

    // Validation verdict for one lowered alternative.  Bug comparison runs
    // on the patched tree before re-rendering, so untouched statements keep
    // their sites and signatures stay comparable.
    auto examine = [&](const AstAlternative &alt, Program &after,
                       std::string &why) {
      try {
        after = apply_patch(program, alt);
      } catch (const std::exception &e) {
        why = e.what();
        return false;
      }
      ValidationResult val = validate(after);
      for (const auto &cycle : val.cycles) {
        if (!cycles_before.count(cycle)) {
          ++res.deadlock_rejections;
          std::string locks;
          for (const auto &l : cycle)
            locks += (locks.empty() ? "" : ", ") + l.render();
          why = "introduces lock-order cycle [" + locks + "]";
          return false;
        }
      }
      for (const auto &b : val.bugs) {
        if (!pre_sigs.count(bug_signature(b))) {
          why = "introduces new bug " + bug_signature(b);
          return false;
        }
      }
      for (const auto &c : cluster_bugs(val.bugs, after)) {
        if (c.path == cluster->path && c.cls == cluster->cls) {
          why = "cluster still has bugs";
          return false;
        }
      }
      return true;
    };

    bool accepted = false;
    size_t accepted_index = 0;
    Program accepted_after;

    if (cfg.mode == RepairMode::Interactive && select) {
      // Validate everything up front, then let the user pick among the
      // survivors.
      std::vector<size_t> indices;
      std::vector<Program> afters;
      std::vector<AstAlternative> shown;
      std::vector<std::string> diffs;
      for (size_t i = 0; i < alts.size(); ++i) {
        Program after;
        std::string why;
        if (!examine(alts[i], after, why)) {
          res.diagnostics.push_back("cluster " + cluster_label(*cluster) +
                                    ": alternative " + std::to_string(i + 1) +
                                    " rejected: " + why);
          continue;
        }
        diffs.push_back(unified_diff(before_text, render_program(after),
                                     program.source_name,
                                     program.source_name + " (fixed)"));
        indices.push_back(i);
        afters.push_back(std::move(after));
        shown.push_back(alts[i]);
      }
      if (!shown.empty()) {
        int choice = select(*cluster, shown, diffs);
        if (choice < 0 || static_cast<size_t>(choice) >= shown.size()) {
          aborted = true;
          res.diagnostics.push_back("cluster " + cluster_label(*cluster) +
                                    ": selection aborted");
        } else {
          accepted = true;
          accepted_index = indices[static_cast<size_t>(choice)];
          accepted_after = std::move(afters[static_cast<size_t>(choice)]);
        }
      }
    } else {
      for (size_t i = 0; i < alts.size() && !accepted; ++i) {
        Program after;
        std::string why;
        if (examine(alts[i], after, why)) {
          accepted = true;
          accepted_index = i;
          accepted_after = std::move(after);
        } else {
          res.diagnostics.push_back("cluster " + cluster_label(*cluster) +
                                    ": alternative " + std::to_string(i + 1) +
                                    " rejected: " + why);
        }
      }
    }

    if (accepted) {
      AppliedPatch ap;
      ap.iteration = iter;
      ap.cluster_path = cluster->path.render();
      ap.cluster_cls = cluster->cls;
      ap.dsl = alts[accepted_index].dsl;
      ap.cost = alts[accepted_index].cost();
      ap.alternative_index = accepted_index;
      std::string after_text = render_program(accepted_after);
      ap.diff = unified_diff(before_text, after_text, program.source_name,
                             program.source_name);
      res.applied.push_back(std::move(ap));
      // Re-parse the rendered result so the next iteration sees fresh spans
      // and statement ids.
      program = parse_program(after_text, program.source_name);
      if (cfg.keep_history)
        res.history.push_back(after_text);
    } else if (!aborted) {
      failed_clusters.insert({cluster->path.render(), cluster->cls});
      res.diagnostics.push_back("cluster " + cluster_label(*cluster) +
                                ": no viable patch");
    }
  }

  res.iterations_used = iter;
  res.final_program = program;
  ValidationResult final_val = validate(program);
  res.final_bug_count = final_val.bugs.size();
  if (final_val.bugs.empty() && final_val.cycles.empty()) {
    res.status = RepairStatus::Fixed;
  } else if (final_val.bugs.empty()) {
    res.status = RepairStatus::Partial;
    res.diagnostics.push_back("lock-order cycles remain");
  } else {
    bool all_failed = true;
    for (const auto &c : cluster_bugs(final_val.bugs, program))
      all_failed =
          all_failed && failed_clusters.count({c.path.render(), c.cls}) != 0;
    res.status = (all_failed || aborted) ? RepairStatus::Partial
                                         : RepairStatus::Exhausted;
  }
  return res;
}

} // namespace racefix
