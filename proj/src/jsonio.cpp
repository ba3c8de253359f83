#include "racefix/jsonio.hpp"

#include <stdexcept>

namespace racefix {

using nlohmann::ordered_json;

AccessPath path_from_string(const std::string &s) {
  if (s.empty())
    throw std::runtime_error("empty access path");
  AccessPath p;
  size_t start = 0;
  bool first = true;
  while (start <= s.size()) {
    size_t dot = s.find('.', start);
    std::string part = dot == std::string::npos
                           ? s.substr(start)
                           : s.substr(start, dot - start);
    if (part.empty())
      throw std::runtime_error("malformed access path: " + s);
    if (first) {
      p.base = part;
      first = false;
    } else {
      p.elements.push_back(part);
    }
    if (dot == std::string::npos)
      break;
    start = dot + 1;
  }
  return p;
}

namespace {

ordered_json site_to_json(const SourceSpan &site) {
  return ordered_json{{"file", site.file},
                      {"line", site.start_line},
                      {"col", site.start_col}};
}

SourceSpan site_from_json(const ordered_json &j) {
  SourceSpan s;
  s.file = j.at("file").get<std::string>();
  s.start_line = j.at("line").get<int>();
  s.start_col = j.at("col").get<int>();
  s.end_line = s.start_line;
  s.end_col = s.start_col;
  return s;
}

ThreadKind thread_from_string(const std::string &s) {
  if (s == "NoThread")
    return ThreadKind::NoThread;
  if (s == "AnyThreadButMain")
    return ThreadKind::AnyThreadButMain;
  if (s == "AnyThread")
    return ThreadKind::AnyThread;
  throw std::runtime_error("unknown thread kind: " + s);
}

} // namespace

ordered_json snapshot_to_json(const AccessSnapshot &snap) {
  ordered_json j;
  j["path"] = snap.path.render();
  j["kind"] = kind_name(snap.kind);
  ordered_json locks = ordered_json::array();
  for (const auto &l : snap.locks)
    locks.push_back(l.render());
  j["locks"] = std::move(locks);
  j["thread"] = thread_name(snap.thread);
  if (snap.ownership.unowned) {
    j["ownership"] = "Unowned";
  } else {
    ordered_json owned = ordered_json::array();
    for (int i : snap.ownership.owned_if)
      owned.push_back(i);
    j["ownership"] = ordered_json{{"ownedIf", std::move(owned)}};
  }
  ordered_json trace = ordered_json::array();
  for (const auto &frame : snap.trace)
    trace.push_back(
        ordered_json{{"class", frame.cls}, {"method", frame.method}});
  j["trace"] = std::move(trace);
  j["site"] = site_to_json(snap.site);
  return j;
}

AccessSnapshot snapshot_from_json(const ordered_json &j) {
  AccessSnapshot snap;
  snap.path = path_from_string(j.at("path").get<std::string>());
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "rd")
    snap.kind = AccessKind::Read;
  else if (kind == "wr")
    snap.kind = AccessKind::Write;
  else
    throw std::runtime_error("unknown access kind: " + kind);
  for (const auto &l : j.at("locks"))
    snap.locks.insert(path_from_string(l.get<std::string>()));
  snap.thread = thread_from_string(j.at("thread").get<std::string>());
  const auto &own = j.at("ownership");
  if (own.is_string()) {
    if (own.get<std::string>() != "Unowned")
      throw std::runtime_error("unknown ownership: " + own.get<std::string>());
    snap.ownership = Ownership::make_unowned();
  } else {
    std::set<int> owned;
    for (const auto &i : own.at("ownedIf"))
      owned.insert(i.get<int>());
    snap.ownership = Ownership::conditional(std::move(owned));
  }
  for (const auto &frame : j.at("trace"))
    snap.trace.push_back({frame.at("class").get<std::string>(),
                          frame.at("method").get<std::string>()});
  snap.site = site_from_json(j.at("site"));
  return snap;
}

ordered_json summaries_to_json(const SummaryMap &sm) {
  ordered_json out;
  ordered_json list = ordered_json::array();
  for (const auto &[key, summary] : sm) {
    ordered_json entry;
    entry["class"] = key.cls;
    entry["method"] = key.method;
    ordered_json snaps = ordered_json::array();
    for (const auto &snap : summary.snapshots)
      snaps.push_back(snapshot_to_json(snap));
    entry["snapshots"] = std::move(snaps);
    list.push_back(std::move(entry));
  }
  out["summaries"] = std::move(list);
  return out;
}

SummaryMap summaries_from_json(const ordered_json &j) {
  SummaryMap sm;
  for (const auto &entry : j.at("summaries")) {
    MethodSummary summary;
    summary.cls = entry.at("class").get<std::string>();
    summary.method = entry.at("method").get<std::string>();
    for (const auto &snap : entry.at("snapshots"))
      summary.snapshots.insert(snapshot_from_json(snap));
    sm[{summary.cls, summary.method}] = std::move(summary);
  }
  return sm;
}

ordered_json bugs_to_json(const std::vector<Bug> &bugs) {
  ordered_json out;
  ordered_json list = ordered_json::array();
  for (const auto &b : bugs) {
    ordered_json entry;
    entry["kind"] =
        b.kind == Bug::Kind::Race ? "race" : "unprotected_write";
    ordered_json snaps = ordered_json::array();
    for (const auto &snap : b.snapshots)
      snaps.push_back(snapshot_to_json(snap));
    entry["snapshots"] = std::move(snaps);
    list.push_back(std::move(entry));
  }
  out["bugs"] = std::move(list);
  return out;
}

ordered_json
cycles_to_json(const std::vector<std::vector<AccessPath>> &cycles,
               const LockOrderGraph &g) {
  ordered_json out;
  ordered_json list = ordered_json::array();
  for (const auto &cycle : cycles) {
    ordered_json entry;
    ordered_json locks = ordered_json::array();
    for (const auto &l : cycle)
      locks.push_back(l.render());
    entry["locks"] = std::move(locks);
    ordered_json witnesses = ordered_json::array();
    for (size_t i = 0; i < cycle.size(); ++i) {
      const AccessPath &outer = cycle[i];
      const AccessPath &inner = cycle[(i + 1) % cycle.size()];
      auto it = g.edges.find({outer, inner});
      if (it != g.edges.end())
        witnesses.push_back(site_to_json(it->second));
    }
    entry["witnesses"] = std::move(witnesses);
    list.push_back(std::move(entry));
  }
  out["cycles"] = std::move(list);
  return out;
}

ordered_json repair_report_to_json(const RepairResult &result) {
  ordered_json out;
  switch (result.status) {
  case RepairStatus::Fixed:
    out["status"] = "Fixed";
    break;
  case RepairStatus::Partial:
    out["status"] = "Partial";
    break;
  case RepairStatus::Exhausted:
    out["status"] = "Exhausted";
    break;
  }
  out["iterations"] = result.iterations_used;
  out["finalBugs"] = result.final_bug_count;
  out["deadlockRejections"] = result.deadlock_rejections;
  ordered_json patches = ordered_json::array();
  for (const auto &p : result.applied) {
    ordered_json entry;
    entry["iteration"] = p.iteration;
    entry["cluster"] = p.cluster_path;
    entry["class"] = p.cluster_cls;
    entry["dsl"] = p.dsl;
    entry["cost"] = p.cost;
    entry["alternative"] = p.alternative_index;
    entry["diff"] = p.diff;
    patches.push_back(std::move(entry));
  }
  out["patches"] = std::move(patches);
  out["diagnostics"] = result.diagnostics;
  return out;
}

} // namespace racefix
