#include "geoform/topology.hpp"

#include <algorithm>

namespace geoform {

PointSeq rotate(const PointSeq& seq) {
  if (seq.empty()) return seq;
  return seq.substr(1) + seq[0];
}

PointSeq reflect(const PointSeq& seq) { return PointSeq(seq.rbegin(), seq.rend()); }

TsiSet multi_repr(const PointSeq& seq) {
  TsiSet out;
  PointSeq cur = seq;
  for (std::size_t i = 0; i < std::max<std::size_t>(seq.size(), 1); ++i) {
    out.insert(cur);
    cur = rotate(cur);
  }
  return out;
}

PointSeq canonical_rotation(const PointSeq& seq) {
  PointSeq best = seq;
  PointSeq cur = seq;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    cur = rotate(cur);
    best = std::min(best, cur);
  }
  return best;
}

bool all_distinct(const PointSeq& seq) {
  bool seen[256] = {};
  for (unsigned char c : seq) {
    if (seen[c]) return false;
    seen[c] = true;
  }
  return true;
}

std::optional<PointSeq> compose_pair(const PointSeq& pa, const PointSeq& pb) {
  std::string shared;
  for (char c : pa) {
    if (pb.find(c) != std::string::npos) shared += c;
  }
  std::size_t k = shared.size();
  if (k < 2) return std::nullopt;
  // shared keeps pa's order, so contiguity in pa means shared is a substring.
  std::size_t ia = pa.find(shared);
  if (ia == std::string::npos) return std::nullopt;
  std::size_t ib = pb.find(reflect(shared));
  if (ib == std::string::npos) return std::nullopt;
  std::string x = pa.substr(0, ia);
  std::string y = pa.substr(ia + k);
  std::string u = pb.substr(0, ib);
  std::string w = pb.substr(ib + k);
  PointSeq out = x + shared.front() + w + u + shared.back() + y;
  if (out.size() < 3 || !all_distinct(out)) return std::nullopt;
  return out;
}

TsiSet compose_sets(const TsiSet& ra, const TsiSet& rb) {
  std::set<PointSeq> canon;
  for (const auto& pa : ra) {
    for (const auto& pb : rb) {
      if (auto r = compose_pair(pa, pb)) canon.insert(canonical_rotation(*r));
    }
  }
  // Several distinct shapes from one pair means the shapes overlap in more
  // than one place; such a union is not a simple closed shape.
  if (canon.size() != 1) return {};
  return multi_repr(*canon.begin());
}

std::set<PointSeq> construct_all(const std::vector<PointSeq>& units) {
  std::set<PointSeq> unit_keys;
  for (const auto& u : units) unit_keys.insert(canonical_rotation(u));
  std::vector<TsiSet> unit_sets;
  for (const auto& u : unit_keys) unit_sets.push_back(multi_repr(u));

  std::set<PointSeq> results = unit_keys;
  std::set<PointSeq> combs = unit_keys;
  while (!combs.empty()) {
    std::set<PointSeq> fresh;
    for (const auto& c : combs) {
      TsiSet rc = multi_repr(c);
      for (const auto& ru : unit_sets) {
        TsiSet merged = compose_sets(rc, ru);
        if (merged.empty()) continue;
        PointSeq key = *merged.begin();
        if (results.insert(key).second) fresh.insert(key);
      }
    }
    combs = std::move(fresh);
  }
  return results;
}

}  // namespace geoform
