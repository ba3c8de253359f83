#include "racefix/race.hpp"

#include "racefix/paths.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace racefix {

namespace {

bool locks_disjoint(const std::set<AccessPath> &l1,
                    const std::set<AccessPath> &l2) {
  for (const auto &l : l1)
    if (l2.count(l))
      return false;
  return true;
}

std::string site_key(const SourceSpan &s) {
  return s.file + ":" + std::to_string(s.start_line) + ":" +
         std::to_string(s.start_col);
}

} // namespace

bool race(const AccessSnapshot &a1, const AccessSnapshot &a2) {
  if (a1.path != a2.path)
    return false;
  if (a1.kind != AccessKind::Write && a2.kind != AccessKind::Write)
    return false;
  if (!locks_disjoint(a1.locks, a2.locks))
    return false;
  if (thread_join(a1.thread, a2.thread) != ThreadKind::AnyThread)
    return false;
  return a1.ownership.unowned && a2.ownership.unowned;
}

bool unprotected_write(const AccessSnapshot &a) {
  return a.kind == AccessKind::Write && a.locks.empty() &&
         a.thread == ThreadKind::AnyThread && a.ownership.unowned;
}

std::vector<Bug> detect_bugs(const SummaryMap &summaries,
                             const std::set<std::string> &root_classes) {
  std::vector<Bug> bugs;

  for (const auto &cls : root_classes) {
    // Every snapshot of every method of this class, in deterministic order.
    std::vector<std::pair<MethodKey, const AccessSnapshot *>> snaps;
    for (const auto &[key, summary] : summaries) {
      if (key.cls != cls)
        continue;
      for (const auto &s : summary.snapshots)
        snaps.emplace_back(key, &s);
    }

    // Each unprotected write is a bug on its own: it races with a second
    // thread running the very same code.
    std::set<std::pair<std::string, std::string>> uw_seen; // (path, site)
    for (const auto &[key, a] : snaps) {
      if (!unprotected_write(*a))
        continue;
      if (!uw_seen.insert({a->path.render(), site_key(a->site)}).second)
        continue;
      Bug b;
      b.kind = Bug::Kind::UnprotectedWrite;
      b.snapshots = {*a};
      b.owners = {key};
      bugs.push_back(std::move(b));
    }

    // Pairs of distinct snapshots.  A pair of mutually unprotected writes is
    // already covered by the two unary reports above, so it is skipped here.
    std::vector<Bug> races;
    for (size_t i = 0; i < snaps.size(); ++i) {
      for (size_t j = i + 1; j < snaps.size(); ++j) {
        const AccessSnapshot &a1 = *snaps[i].second;
        const AccessSnapshot &a2 = *snaps[j].second;
        if (!race(a1, a2))
          continue;
        if (unprotected_write(a1) && unprotected_write(a2))
          continue;
        Bug b;
        b.kind = Bug::Kind::Race;
        if (a2 < a1) {
          b.snapshots = {a2, a1};
          b.owners = {snaps[j].first, snaps[i].first};
        } else {
          b.snapshots = {a1, a2};
          b.owners = {snaps[i].first, snaps[j].first};
        }
        races.push_back(std::move(b));
      }
    }

    // The same collision can be reached through several call chains; keep one
    // representative per (path, site-pair), preferring the least snapshots.
    std::sort(races.begin(), races.end());
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    for (auto &b : races) {
      std::string s1 = site_key(b.snapshots[0].site);
      std::string s2 = site_key(b.snapshots[1].site);
      if (s2 < s1)
        std::swap(s1, s2);
      if (seen.insert({b.snapshots[0].path.render(), s1, s2}).second)
        bugs.push_back(std::move(b));
    }
  }

  std::sort(bugs.begin(), bugs.end());
  return bugs;
}

std::vector<BugCluster> cluster_bugs(const std::vector<Bug> &bugs,
                                     const Program &program) {
  // Bug snapshots are always rooted at `this` or a class name (owned and
  // conditionally-owned accesses never race), so the terminal field resolves
  // without a method context.
  std::map<std::pair<std::string, std::string>, BugCluster> grouped;
  for (const auto &b : bugs) {
    const AccessPath &path = b.snapshots.front().path;
    const ClassDecl *owner = program.find_class(b.owners.front().cls);
    std::string cls = owner ? declaring_class_of_terminal(path, *owner, program)
                            : b.owners.front().cls;
    auto key = std::make_pair(path.render(), cls);
    auto [it, inserted] = grouped.try_emplace(key);
    if (inserted) {
      it->second.path = path;
      it->second.cls = cls;
    }
    it->second.bugs.push_back(b);
  }

  std::vector<BugCluster> out;
  out.reserve(grouped.size());
  for (auto &[_, cluster] : grouped)
    out.push_back(std::move(cluster));
  return out;
}

std::string bug_signature(const Bug &b) {
  std::string s =
      b.kind == Bug::Kind::Race ? "race|" : "unprotected_write|";
  s += b.snapshots.front().path.render();
  std::vector<std::string> sites;
  for (const auto &a : b.snapshots)
    sites.push_back(site_key(a.site));
  std::sort(sites.begin(), sites.end());
  for (const auto &site : sites)
    s += "|" + site;
  return s;
}

} // namespace racefix
