#pragma once

// Reference implementations used by the unit and acceptance tests. They
// share no code with the engine: shapes are checked by edge cancellation,
// relations by enumerating assignments, linear systems by plain Gaussian
// elimination over rationals.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// ---------------------------------------------------------------------------
// Shapes

/// Smallest rotation of a cycle.
inline std::string min_rotation(const std::string& s) {
  std::string best = s;
  for (std::size_t i = 1; i < s.size(); ++i) best = std::min(best, s.substr(i) + s.substr(0, i));
  return best;
}

/// Union of closed shapes with opposite edges cancelled; the traced cycle
/// (min rotation) when the remaining edges form one simple cycle.
inline std::optional<std::string> merge_cycles(const std::vector<std::string>& shapes) {
  std::multiset<std::pair<char, char>> edges;
  for (const auto& s : shapes) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::pair<char, char> e{s[i], s[(i + 1) % s.size()]};
      auto rev = edges.find({e.second, e.first});
      if (rev != edges.end()) {
        edges.erase(rev);
      } else {
        edges.insert(e);
      }
    }
  }
  if (edges.size() < 3) return std::nullopt;
  std::map<char, char> next;
  std::map<char, int> indeg;
  for (const auto& [a, b] : edges) {
    if (next.count(a)) return std::nullopt;
    next[a] = b;
    if (++indeg[b] > 1) return std::nullopt;
  }
  std::string cycle;
  char start = next.begin()->first;
  char at = start;
  do {
    cycle += at;
    auto it = next.find(at);
    if (it == next.end()) return std::nullopt;
    at = it->second;
  } while (at != start && cycle.size() <= edges.size());
  if (cycle.size() != edges.size()) return std::nullopt;
  return min_rotation(cycle);
}

/// A polygon cut into pieces by chord paths. Each piece is a simple cycle
/// and the pieces tile the outline.
struct Subdivision {
  std::string outline;
  std::vector<std::string> pieces;
};

/// Splits piece at two of its vertices with a chord through `interior`
/// new points. Returns false when the cut would leave a piece under 3
/// points.
inline bool split_piece(const std::string& p, int i, int j, const std::string& interior, std::string& x,
                        std::string& y) {
  const int n = static_cast<int>(p.size());
  if (i > j) std::swap(i, j);
  const int m = static_cast<int>(interior.size());
  if (i == j || (j - i + 1) + m < 3 || (n - (j - i) + 1) + m < 3) return false;
  if (m == 0 && (j - i == 1 || j - i == n - 1)) return false;
  std::string rev(interior.rbegin(), interior.rend());
  x = p.substr(static_cast<std::size_t>(i), static_cast<std::size_t>(j - i + 1)) + rev;
  y = p.substr(static_cast<std::size_t>(j)) + p.substr(0, static_cast<std::size_t>(i + 1)) + interior;
  return true;
}

/// Random outline of 3..max_outline points cut into up to max_pieces pieces.
inline Subdivision random_subdivision(Rng& rng, int max_pieces, int max_outline = 6) {
  std::string letters = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::shuffle(letters.begin(), letters.end(), rng);
  std::size_t used = 0;
  Subdivision d;
  const int n = uniform(rng, 3, max_outline);
  d.outline = letters.substr(0, static_cast<std::size_t>(n));
  used = static_cast<std::size_t>(n);
  d.pieces.push_back(d.outline);
  const int target = uniform(rng, 1, max_pieces);
  for (int attempt = 0; attempt < 50 && static_cast<int>(d.pieces.size()) < target; ++attempt) {
    const std::size_t k = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(d.pieces.size()) - 1));
    const std::string p = d.pieces[k];
    const int m = uniform(rng, 0, 2);
    if (used + static_cast<std::size_t>(m) > letters.size()) break;
    const std::string interior = letters.substr(used, static_cast<std::size_t>(m));
    const int sz = static_cast<int>(p.size());
    std::string x, y;
    if (!split_piece(p, uniform(rng, 0, sz - 1), uniform(rng, 0, sz - 1), interior, x, y)) continue;
    used += static_cast<std::size_t>(m);
    d.pieces[k] = x;
    d.pieces.push_back(y);
  }
  return d;
}

/// Every composite reachable from the pieces: all subsets whose union is a
/// single simple cycle (min rotations).
inline std::set<std::string> all_composites(const std::vector<std::string>& pieces) {
  std::set<std::string> out;
  const std::size_t n = pieces.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) sub.push_back(pieces[i]);
    }
    if (auto c = merge_cycles(sub)) out.insert(*c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relations as sets of assignments

using Assignment = std::map<char, char>;
using AssignmentSet = std::set<Assignment>;

/// Tuples (positional over vars) as assignments.
inline AssignmentSet assignments(const std::string& vars, const std::set<std::string>& tuples) {
  AssignmentSet out;
  for (const auto& t : tuples) {
    Assignment a;
    bool ok = true;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      auto [it, fresh] = a.emplace(vars[i], t[i]);
      if (!fresh && it->second != t[i]) ok = false;
    }
    if (ok) out.insert(a);
  }
  return out;
}

/// Nested-loop natural join.
inline AssignmentSet join(const AssignmentSet& r1, const AssignmentSet& r2) {
  AssignmentSet out;
  for (const auto& a : r1) {
    for (const auto& b : r2) {
      Assignment m = a;
      bool ok = true;
      for (const auto& [k, v] : b) {
        auto [it, fresh] = m.emplace(k, v);
        if (!fresh && it->second != v) {
          ok = false;
          break;
        }
      }
      if (ok) out.insert(m);
    }
  }
  return out;
}

inline AssignmentSet unite(AssignmentSet a, const AssignmentSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

/// Random set of distinct-point tuples of the given arity.
inline std::set<std::string> random_tuples(Rng& rng, const std::string& universe, std::size_t arity,
                                           std::size_t max_count) {
  std::set<std::string> out;
  const std::size_t count = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(max_count)));
  for (std::size_t c = 0; c < count * 3 && out.size() < count; ++c) {
    std::string u = universe;
    std::shuffle(u.begin(), u.end(), rng);
    if (u.size() < arity) break;
    out.insert(u.substr(0, arity));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linear algebra over Q

/// Row-reduces [A | b]; returns false when inconsistent.
inline bool rref(std::vector<std::vector<mpq_class>>& m, std::vector<int>& pivots) {
  pivots.clear();
  const std::size_t rows = m.size();
  if (rows == 0) return true;
  const std::size_t cols = m[0].size() - 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    const mpq_class inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const mpq_class f = m[i][c];
      for (std::size_t k = 0; k <= cols; ++k) m[i][k] -= f * m[r][k];
    }
    pivots.push_back(static_cast<int>(c));
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i) {
    if (m[i][cols] != 0) return false;
  }
  return true;
}

/// Value of the linear form coeffs . x when the system A x = b determines
/// it; nullopt otherwise.
inline std::optional<mpq_class> determined_value(const std::vector<std::vector<mpq_class>>& a,
                                                 const std::vector<mpq_class>& b,
                                                 const std::vector<mpq_class>& coeffs) {
  const std::size_t n = coeffs.size();
  std::vector<std::vector<mpq_class>> m;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto row = a[i];
    row.push_back(b[i]);
    m.push_back(row);
  }
  std::vector<int> piv;
  if (!rref(m, piv)) return std::nullopt;
  // coeffs must be a combination of the reduced rows.
  std::vector<mpq_class> rest = coeffs;
  mpq_class value = 0;
  for (std::size_t r = 0; r < piv.size(); ++r) {
    const std::size_t c = static_cast<std::size_t>(piv[r]);
    const mpq_class f = rest[c];
    if (f == 0) continue;
    for (std::size_t k = 0; k < n; ++k) rest[k] -= f * m[r][k];
    value += f * m[r][n];
  }
  for (const auto& x : rest) {
    if (x != 0) return std::nullopt;
  }
  return value;
}

}  // namespace oracle
