#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "mvqc/image.hpp"

namespace mvqc {

/// The three invariants used as features:
///   A = (M20 + M02) / m00^2
///   B = ((M20 - M02)^2 + 4 M11^2) / m00^2
///   C = (M20 M02 - M11^2) / m00^4
enum class MomentKind { A, B, C };

std::string_view to_string(MomentKind kind);
/// Accepts "A", "Moment_A", "a" and so on.
MomentKind parse_moment_kind(std::string_view text);

/// B's printed denominator is m00^2, which is not scale invariant.
/// ScaleNormalized uses m00^4 instead; A and C are the same in both modes.
enum class MomentNormalization { AsPrinted, ScaleNormalized };

/// Raw moments m_pq for p, q in {0,1,2}, accumulated exactly. Coordinates
/// are 1-based: i is the row, j is the column.
struct RawMoments {
  std::int64_t m[3][3] = {};

  std::int64_t m00() const noexcept { return m[0][0]; }
  bool operator==(const RawMoments&) const = default;
};

RawMoments raw_moments(const BinaryImage& tile);

/// Raw moments of the d1 x d1 window at (row0, col0) in tile-local coordinates.
RawMoments raw_moments(const BinaryImage& img, int row0, int col0, int size);

/// m_pq of Σ i^p j^q over the foreground; p, q in {0,1,2}.
double raw_moment(const BinaryImage& tile, int p, int q);

/// Centroid and second-order centralized moments.
struct MomentSet {
  double m00 = 0, m10 = 0, m01 = 0;
  double a = 0, b = 0;  // centroid row, column
  double M20 = 0, M02 = 0, M11 = 0;
};

/// nullopt for an empty tile.
std::optional<MomentSet> moment_set(const BinaryImage& tile);

/// M_pq = Σ (i - a)^p (j - b)^q for p, q in {0,1,2}; nullopt when m00 = 0.
std::optional<double> central_moment(const BinaryImage& tile, int p, int q);

/// Invariant of the given kind; an empty tile yields 0.
double moment_value(const RawMoments& raw, MomentKind kind,
                    MomentNormalization norm = MomentNormalization::AsPrinted);
double moment_value(const BinaryImage& tile, MomentKind kind,
                    MomentNormalization norm = MomentNormalization::AsPrinted);

}  // namespace mvqc
