#include "racefix/cli.hpp"

#include "racefix/diagnostics.hpp"
#include "racefix/jsonio.hpp"
#include "racefix/parser.hpp"
#include "racefix/printer.hpp"
#include "racefix/summary.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace racefix {

namespace {

std::string slurp(const std::string &path) {
  std::ifstream f(path);
  if (!f)
    throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void renumber_stmts(std::vector<Stmt> &stmts, int &next) {
  for (auto &s : stmts) {
    s.id = next++;
    renumber_stmts(s.body, next);
    renumber_stmts(s.else_body, next);
  }
}

std::string site_text(const SourceSpan &s) {
  return s.file + ":" + std::to_string(s.start_line) + ":" +
         std::to_string(s.start_col);
}

std::string snapshot_text(const AccessSnapshot &a) {
  std::string locks;
  for (const auto &l : a.locks)
    locks += (locks.empty() ? "" : ", ") + l.render();
  return kind_name(a.kind) + "@" + site_text(a.site) + " locks{" + locks + "}";
}

void write_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("cannot write file: " + path.string());
  f << text;
}

struct FixOptions {
  RepairConfig cfg;
  std::string report = "text";
  std::string out_dir;
  bool write = false;
};

// Shared command-line surface of `fix` and `import-summaries ... fix`.
void add_fix_options(CLI::App *cmd, FixOptions &opt, std::string &mode,
                     std::string &strategy, std::string &target) {
  cmd->add_option("--mode", mode, "auto or interactive")
      ->check(CLI::IsMember({"auto", "interactive"}));
  cmd->add_option("--max-iterations", opt.cfg.max_iterations,
                  "repair iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lock-strategy", strategy,
                  "candidate ranking: frequency or distance")
      ->check(CLI::IsMember({"frequency", "distance"}));
  cmd->add_option("--target", target,
                  "where to synchronize: root or callsite")
      ->check(CLI::IsMember({"root", "callsite"}));
  cmd->add_option("--out", opt.out_dir, "directory for reports and diffs");
  cmd->add_option("--report", opt.report, "report format")
      ->check(CLI::IsMember({"json", "text"}));
  cmd->add_flag("--write", opt.write, "rewrite the input files in place");
}

void finish_fix_options(FixOptions &opt, const std::string &mode,
                        const std::string &strategy,
                        const std::string &target) {
  opt.cfg.mode =
      mode == "interactive" ? RepairMode::Interactive : RepairMode::Auto;
  opt.cfg.lock_strategy = strategy == "distance" ? LockStrategy::Distance
                                                 : LockStrategy::Frequency;
  opt.cfg.patch_target =
      target == "callsite" ? PatchTarget::Callsite : PatchTarget::Root;
}

std::string render_fix_text(const RepairResult &result) {
  std::ostringstream out;
  for (const auto &p : result.applied) {
    out << "iteration " << p.iteration << ": cluster " << p.cluster_path
        << " in " << p.cluster_cls << "\n";
    out << "  patch (cost " << p.cost << "): " << p.dsl << "\n";
    std::istringstream diff(p.diff);
    std::string line;
    while (std::getline(diff, line))
      out << "  " << line << "\n";
  }
  for (const auto &d : result.diagnostics)
    out << "note: " << d << "\n";
  const char *status = result.status == RepairStatus::Fixed ? "Fixed"
                       : result.status == RepairStatus::Partial ? "Partial"
                                                                : "Exhausted";
  out << "status: " << status << " (" << result.final_bug_count
      << " bugs remaining, " << result.deadlock_rejections
      << " deadlock rejections, " << result.iterations_used
      << " iterations)\n";
  return out.str();
}

int run_fix(const std::vector<std::string> &files, const FixOptions &opt,
            const SummaryMap *initial, std::istream &in, std::ostream &out) {
  Program program = load_program(files);

  // Remember which file declared each class so --write can split the fixed
  // program back onto the original inputs.
  std::map<std::string, std::string> class_file;
  for (const auto &cls : program.classes)
    class_file[cls.name] = cls.span.file;

  InteractiveSelector selector;
  if (opt.cfg.mode == RepairMode::Interactive)
    selector = make_interactive_selector(in, out);

  RepairResult result = repair(program, opt.cfg, selector, initial);

  if (opt.report == "json")
    out << repair_report_to_json(result).dump(2) << "\n";
  else
    out << render_fix_text(result);

  if (!opt.out_dir.empty()) {
    std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    if (opt.report == "json")
      write_file(dir / "report.json",
                 repair_report_to_json(result).dump(2) + "\n");
    else
      write_file(dir / "report.txt", render_fix_text(result));
    for (const auto &p : result.applied)
      write_file(dir / ("patch_" + std::to_string(p.iteration) + ".diff"),
                 p.diff);
    write_file(dir / "fixed.mjcc", render_program(result.final_program));
  }

  if (opt.write && !result.applied.empty()) {
    for (const auto &file : files) {
      Program part;
      part.source_name = file;
      for (const auto &cls : result.final_program.classes)
        if (class_file[cls.name] == file)
          part.classes.push_back(cls);
      write_file(file, render_program(part));
    }
  }

  return result.status == RepairStatus::Fixed ? 0 : 1;
}

} // namespace

Program load_program(const std::vector<std::string> &files) {
  Program merged;
  merged.source_name = files.front();
  for (const auto &file : files) {
    Program p = parse_program(slurp(file), file);
    for (auto &cls : p.classes) {
      if (merged.find_class(cls.name))
        throw std::runtime_error("duplicate class " + cls.name + " in " +
                                 file);
      merged.classes.push_back(std::move(cls));
    }
  }
  int next = 0;
  for (auto &cls : merged.classes)
    for (auto &m : cls.methods)
      renumber_stmts(m.body, next);
  merged.next_stmt_id = next;
  return merged;
}

std::string render_bugs_text(const std::vector<Bug> &bugs) {
  std::ostringstream out;
  size_t races = 0;
  for (const auto &b : bugs) {
    if (b.kind == Bug::Kind::Race)
      ++races;
    out << (b.kind == Bug::Kind::Race ? "race: " : "unprotected_write: ");
    out << b.snapshots.front().path.render();
    for (const auto &snap : b.snapshots)
      out << " " << snapshot_text(snap);
    out << "\n";
  }
  if (bugs.empty())
    out << "no bugs\n";
  else
    out << bugs.size() << " bugs (" << races << " races, "
        << bugs.size() - races << " unprotected writes)\n";
  return out.str();
}

std::string
render_cycles_text(const std::vector<std::vector<AccessPath>> &cycles) {
  std::ostringstream out;
  for (const auto &cycle : cycles) {
    out << "deadlock cycle: ";
    for (const auto &l : cycle)
      out << l.render() << " -> ";
    out << cycle.front().render() << "\n";
  }
  if (cycles.empty())
    out << "no deadlock cycles\n";
  return out.str();
}

InteractiveSelector make_interactive_selector(std::istream &in,
                                              std::ostream &out) {
  return [&in, &out](const BugCluster &cluster,
                     const std::vector<AstAlternative> &alternatives,
                     const std::vector<std::string> &diffs) -> int {
    out << "cluster " << cluster.path.render() << " in " << cluster.cls
        << ":\n";
    for (size_t i = 0; i < alternatives.size(); ++i) {
      out << "  [" << i + 1 << "] cost " << alternatives[i].cost() << ": "
          << alternatives[i].dsl << "\n";
      std::istringstream diff(diffs[i]);
      std::string line;
      while (std::getline(diff, line))
        out << "      " << line << "\n";
    }
    int invalid = 0;
    while (invalid < 3) {
      out << "select patch [1-" << alternatives.size() << "] or q to abort: "
          << std::flush;
      std::string line;
      if (!std::getline(in, line))
        return -1; // EOF aborts
      // Trim surrounding whitespace.
      size_t b = line.find_first_not_of(" \t\r");
      size_t e = line.find_last_not_of(" \t\r");
      line = b == std::string::npos ? "" : line.substr(b, e - b + 1);
      if (line == "q" || line == "Q")
        return -1;
      try {
        size_t pos = 0;
        int choice = std::stoi(line, &pos);
        if (pos == line.size() && choice >= 1 &&
            choice <= static_cast<int>(alternatives.size()))
          return choice - 1;
      } catch (const std::exception &) {
      }
      ++invalid;
      out << "invalid selection\n";
    }
    return -1;
  };
}

int run(const std::vector<std::string> &args, std::istream &in,
        std::ostream &out, std::ostream &err) {
  CLI::App app{"static race detection and repair for MiniJava-CC sources"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  std::string report = "text";
  std::string out_dir;

  CLI::App *analyze = app.add_subcommand("analyze", "detect data races");
  analyze->add_option("files", files, "source files")->required();
  analyze->add_option("--report", report, "report format")
      ->check(CLI::IsMember({"json", "text"}));
  analyze->add_option("--out", out_dir, "directory for the report");

  FixOptions fix_opt;
  std::string fix_mode = "auto", fix_strategy = "frequency",
              fix_target = "root";
  CLI::App *fix = app.add_subcommand("fix", "synthesize and apply patches");
  fix->add_option("files", files, "source files")->required();
  add_fix_options(fix, fix_opt, fix_mode, fix_strategy, fix_target);

  CLI::App *validate_cmd =
      app.add_subcommand("validate", "re-check races and lock-order cycles");
  validate_cmd->add_option("files", files, "source files")->required();
  validate_cmd->add_option("--report", report, "report format")
      ->check(CLI::IsMember({"json", "text"}));
  validate_cmd->add_option("--out", out_dir, "directory for the report");

  CLI::App *export_cmd =
      app.add_subcommand("export-summaries", "write method summaries as JSON");
  export_cmd->add_option("files", files, "source files")->required();
  export_cmd->add_option("--out", out_dir, "directory for summaries.json");

  FixOptions imp_opt;
  std::string imp_mode = "auto", imp_strategy = "frequency",
              imp_target = "root";
  std::string summaries_path, imp_action;
  CLI::App *import_cmd = app.add_subcommand(
      "import-summaries", "fix using previously exported summaries");
  import_cmd->add_option("summaries", summaries_path, "summaries JSON file")
      ->required();
  import_cmd->add_option("action", imp_action, "must be 'fix'")->required();
  import_cmd->add_option("files", files, "source files")->required();
  add_fix_options(import_cmd, imp_opt, imp_mode, imp_strategy, imp_target);

  std::vector<const char *> argv;
  argv.push_back("racefix");
  for (const auto &a : args)
    argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*analyze || *validate_cmd) {
      Program program = load_program(files);
      ValidationResult val = validate(program);
      bool with_cycles = validate_cmd->parsed();

      std::string text;
      if (report == "json") {
        nlohmann::ordered_json j = bugs_to_json(val.bugs);
        if (with_cycles) {
          AnalysisResult analysis = analyze_program(program);
          LockOrderGraph g = build_lock_order(program);
          j["cycles"] = cycles_to_json(val.cycles, g)["cycles"];
        }
        text = j.dump(2) + "\n";
      } else {
        text = render_bugs_text(val.bugs);
        if (with_cycles)
          text += render_cycles_text(val.cycles);
      }
      out << text;
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(std::filesystem::path(out_dir) /
                       (report == "json" ? "report.json" : "report.txt"),
                   text);
      }
      if (with_cycles)
        return val.bugs.empty() && val.cycles.empty() ? 0 : 1;
      return val.bugs.empty() ? 0 : 1;
    }

    if (*export_cmd) {
      Program program = load_program(files);
      AnalysisResult analysis = analyze_program(program);
      std::string text = summaries_to_json(analysis.summaries).dump(2) + "\n";
      out << text;
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(std::filesystem::path(out_dir) / "summaries.json", text);
      }
      return 0;
    }

    if (*fix) {
      finish_fix_options(fix_opt, fix_mode, fix_strategy, fix_target);
      return run_fix(files, fix_opt, nullptr, in, out);
    }

    if (*import_cmd) {
      if (imp_action != "fix") {
        err << "error: expected 'fix' after the summaries file, got '"
            << imp_action << "'\n";
        return 2;
      }
      finish_fix_options(imp_opt, imp_mode, imp_strategy, imp_target);
      nlohmann::ordered_json j =
          nlohmann::ordered_json::parse(slurp(summaries_path));
      SummaryMap sm = summaries_from_json(j);
      return run_fix(files, imp_opt, &sm, in, out);
    }
  } catch (const ParseError &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception &e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

} // namespace racefix
