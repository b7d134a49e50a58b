#pragma once

// Recomputes the summary tables from the per-problem table, as an outside
// reader of the CSV files would.

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

using CsvRow = std::map<std::string, std::string>;

/// Simple CSV reader; handles double-quoted fields with doubled quotes.
inline std::vector<CsvRow> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> lines;
  std::vector<std::string> cur;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cur.push_back(field);
      field.clear();
    } else if (c == '\n') {
      cur.push_back(field);
      field.clear();
      lines.push_back(cur);
      cur.clear();
    } else {
      field += c;
    }
  }
  if (!field.empty() || !cur.empty()) {
    cur.push_back(field);
    lines.push_back(cur);
  }
  std::vector<CsvRow> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CsvRow r;
    for (std::size_t k = 0; k < lines[0].size() && k < lines[i].size(); ++k) r[lines[0][k]] = lines[i][k];
    out.push_back(r);
  }
  return out;
}

inline std::string pct2(std::size_t part, std::size_t whole) {
  char buf[32];
  const double v = whole == 0 ? 0.0 : std::round(10000.0 * static_cast<double>(part) / static_cast<double>(whole)) / 100.0;
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Tally {
  std::size_t problems = 0, solved = 0, unsolved = 0, timeout = 0;
};

/// Mismatch descriptions between the summary/bins tables and counts taken
/// from the per-problem table; empty when they agree.
inline std::vector<std::string> recompute_mismatches(const std::string& summary_csv, const std::string& bins_csv,
                                                     const std::string& problems_csv) {
  std::vector<std::string> bad;
  std::map<std::string, Tally> bins;
  Tally all;
  for (const auto& r : read_csv(problems_csv)) {
    Tally& b = bins[r.at("bin")];
    for (Tally* t : {&b, &all}) {
      ++t->problems;
      const std::string& o = r.at("outcome");
      if (o == "solved") ++t->solved;
      if (o == "unsolved") ++t->unsolved;
      if (o == "timeout") ++t->timeout;
    }
  }
  auto expect = [&](const CsvRow& row, const std::string& col, const std::string& want) {
    auto it = row.find(col);
    if (it == row.end() || it->second != want) {
      bad.push_back(col + ": table " + (it == row.end() ? "<missing>" : it->second) + ", recomputed " + want);
    }
  };
  const auto summary = read_csv(summary_csv);
  if (summary.size() != 1) {
    bad.push_back("summary must have one data row");
  } else {
    const auto& s = summary[0];
    expect(s, "problems", std::to_string(all.problems));
    expect(s, "solved", std::to_string(all.solved));
    expect(s, "unsolved", std::to_string(all.unsolved));
    expect(s, "timeout", std::to_string(all.timeout));
    expect(s, "solved_pct", pct2(all.solved, all.problems));
    expect(s, "unsolved_pct", pct2(all.unsolved, all.problems));
    expect(s, "timeout_pct", pct2(all.timeout, all.problems));
    for (int b = 1; b <= 6; ++b) {
      const std::string name = "l" + std::to_string(b);
      expect(s, name + "_pct", pct2(bins[name].solved, bins[name].problems));
    }
  }
  for (const auto& r : read_csv(bins_csv)) {
    const Tally& t = bins[r.at("bin")];
    expect(r, "problems", std::to_string(t.problems));
    expect(r, "solved", std::to_string(t.solved));
    expect(r, "unsolved", std::to_string(t.unsolved));
    expect(r, "timeout", std::to_string(t.timeout));
    expect(r, "solved_pct", pct2(t.solved, t.problems));
  }
  return bad;
}

}  // namespace oracle
