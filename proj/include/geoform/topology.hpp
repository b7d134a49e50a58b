#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace geoform {

/// Ordered list of single-letter point names, e.g. "ABC".
using PointSeq = std::string;

/// Rotation-closed set of representations of one closed shape.
using TsiSet = std::set<PointSeq>;

PointSeq rotate(const PointSeq& seq);
PointSeq reflect(const PointSeq& seq);

/// All rotations of seq.
TsiSet multi_repr(const PointSeq& seq);

/// Lexicographically smallest rotation; used as the set key of a shape.
PointSeq canonical_rotation(const PointSeq& seq);

bool all_distinct(const PointSeq& seq);

/// Merges two shapes sharing a run of k >= 2 points that appears in pb in
/// reverse order. The run must hold every point the two sequences have in
/// common and must be contiguous in both (no wrap-around; compose_sets
/// covers wrap-around by trying every rotation).
/// Returns nullopt when the pair is not composable as given.
std::optional<PointSeq> compose_pair(const PointSeq& pa, const PointSeq& pb);

/// Composition of two TSI sets. Empty when no rotation pair composes.
TsiSet compose_sets(const TsiSet& ra, const TsiSet& rb);

/// Closure of the units under composition, returned as canonical rotations.
/// Includes the units themselves.
std::set<PointSeq> construct_all(const std::vector<PointSeq>& units);

}  // namespace geoform
