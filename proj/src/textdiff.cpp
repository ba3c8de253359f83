#include "racefix/textdiff.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace racefix {

namespace {

std::vector<std::string> split_lines(const std::string &text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty())
    lines.push_back(cur);
  return lines;
}

struct Edit {
  char op; // ' ' keep, '-' delete, '+' insert
  const std::string *line;
};

// Line-level edit script via longest-common-subsequence.
std::vector<Edit> edit_script(const std::vector<std::string> &a,
                              const std::vector<std::string> &b) {
  size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = n; i-- > 0;)
    for (size_t j = m; j-- > 0;)
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1
                               : std::max(lcs[i + 1][j], lcs[i][j + 1]);
  std::vector<Edit> out;
  size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i] == b[j]) {
      out.push_back({' ', &a[i]});
      ++i, ++j;
    } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
      out.push_back({'-', &a[i]});
      ++i;
    } else {
      out.push_back({'+', &b[j]});
      ++j;
    }
  }
  for (; i < n; ++i)
    out.push_back({'-', &a[i]});
  for (; j < m; ++j)
    out.push_back({'+', &b[j]});
  return out;
}

} // namespace

std::string unified_diff(const std::string &before, const std::string &after,
                         const std::string &label_before,
                         const std::string &label_after, int context) {
  if (before == after)
    return "";
  std::vector<std::string> a = split_lines(before);
  std::vector<std::string> b = split_lines(after);
  std::vector<Edit> edits = edit_script(a, b);

  // Group changed runs into hunks separated by more than 2*context kept
  // lines.
  struct Hunk {
    size_t first_edit, last_edit; // inclusive range into `edits`
  };
  std::vector<Hunk> hunks;
  for (size_t k = 0; k < edits.size(); ++k) {
    if (edits[k].op == ' ')
      continue;
    if (!hunks.empty()) {
      size_t gap = k - hunks.back().last_edit - 1;
      if (gap <= 2 * static_cast<size_t>(context)) {
        hunks.back().last_edit = k;
        continue;
      }
    }
    hunks.push_back({k, k});
  }

  std::ostringstream out;
  out << "--- " << label_before << "\n+++ " << label_after << "\n";

  // Line numbers (1-based) of each edit's position in both files.
  size_t ai = 0, bi = 0;
  std::vector<std::pair<size_t, size_t>> pos(edits.size());
  for (size_t k = 0; k < edits.size(); ++k) {
    pos[k] = {ai + 1, bi + 1};
    if (edits[k].op != '+')
      ++ai;
    if (edits[k].op != '-')
      ++bi;
  }

  for (const auto &h : hunks) {
    size_t lo = h.first_edit > static_cast<size_t>(context)
                    ? h.first_edit - static_cast<size_t>(context)
                    : 0;
    size_t hi = std::min(edits.size() - 1,
                         h.last_edit + static_cast<size_t>(context));
    size_t a_start = pos[lo].first, b_start = pos[lo].second;
    size_t a_count = 0, b_count = 0;
    for (size_t k = lo; k <= hi; ++k) {
      if (edits[k].op != '+')
        ++a_count;
      if (edits[k].op != '-')
        ++b_count;
    }
    out << "@@ -" << a_start << "," << a_count << " +" << b_start << ","
        << b_count << " @@\n";
    for (size_t k = lo; k <= hi; ++k)
      out << edits[k].op << *edits[k].line << "\n";
  }
  return out.str();
}

} // namespace racefix
