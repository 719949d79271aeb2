#include "mvqc/moments.hpp"

#include <cctype>
#include <string>

namespace mvqc {
namespace {

__extension__ typedef __int128 wide_int;

// Scaled centralized moments K_pq = m00 * M_pq for p + q = 2. These are
// integers and are unchanged by translating or rotating the foreground by
// multiples of 90 degrees.
struct ScaledCentral {
  wide_int k20, k02, k11;
};

ScaledCentral scaled_central(const RawMoments& r) {
  const wide_int m00 = r.m[0][0];
  const wide_int m10 = r.m[1][0];
  const wide_int m01 = r.m[0][1];
  return {m00 * r.m[2][0] - m10 * m10, m00 * r.m[0][2] - m01 * m01, m00 * r.m[1][1] - m10 * m01};
}

double power(double base, int exp) {
  double out = 1.0;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

void check_order(int p, int q) {
  if (p < 0 || p > 2 || q < 0 || q > 2)
    throw Error("moment order (" + std::to_string(p) + "," + std::to_string(q) + ") outside {0,1,2}");
}

}  // namespace

std::string_view to_string(MomentKind kind) {
  switch (kind) {
    case MomentKind::A: return "Moment_A";
    case MomentKind::B: return "Moment_B";
    case MomentKind::C: return "Moment_C";
  }
  return "?";
}

MomentKind parse_moment_kind(std::string_view text) {
  std::string s(text);
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s.rfind("MOMENT_", 0) == 0) s = s.substr(7);
  if (s == "A") return MomentKind::A;
  if (s == "B") return MomentKind::B;
  if (s == "C") return MomentKind::C;
  throw Error("unknown moment kind '" + std::string(text) + "' (expected A, B or C)");
}

RawMoments raw_moments(const BinaryImage& img, int row0, int col0, int size) {
  RawMoments r;
  for (int y = 0; y < size; ++y) {
    const std::int64_t i = y + 1;
    std::int64_t n = 0, sj = 0, sjj = 0;
    for (int x = 0; x < size; ++x) {
      if (!img(col0 + x, row0 + y)) continue;
      const std::int64_t j = x + 1;
      ++n;
      sj += j;
      sjj += j * j;
    }
    if (n == 0) continue;
    r.m[0][0] += n;
    r.m[1][0] += i * n;
    r.m[2][0] += i * i * n;
    r.m[0][1] += sj;
    r.m[1][1] += i * sj;
    r.m[2][1] += i * i * sj;
    r.m[0][2] += sjj;
    r.m[1][2] += i * sjj;
    r.m[2][2] += i * i * sjj;
  }
  return r;
}

RawMoments raw_moments(const BinaryImage& tile) {
  if (tile.width() != tile.height()) {
    // Non-square input: accumulate over the full rectangle.
    RawMoments r;
    for (int y = 0; y < tile.height(); ++y)
      for (int x = 0; x < tile.width(); ++x) {
        if (!tile(x, y)) continue;
        const std::int64_t pi[3] = {1, y + 1, static_cast<std::int64_t>(y + 1) * (y + 1)};
        const std::int64_t pj[3] = {1, x + 1, static_cast<std::int64_t>(x + 1) * (x + 1)};
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) r.m[p][q] += pi[p] * pj[q];
      }
    return r;
  }
  return raw_moments(tile, 0, 0, tile.width());
}

double raw_moment(const BinaryImage& tile, int p, int q) {
  check_order(p, q);
  return static_cast<double>(raw_moments(tile).m[p][q]);
}

std::optional<MomentSet> moment_set(const BinaryImage& tile) {
  const RawMoments r = raw_moments(tile);
  if (r.m00() == 0) return std::nullopt;
  const ScaledCentral k = scaled_central(r);
  const double m00 = static_cast<double>(r.m00());
  MomentSet s;
  s.m00 = m00;
  s.m10 = static_cast<double>(r.m[1][0]);
  s.m01 = static_cast<double>(r.m[0][1]);
  s.a = s.m10 / m00;
  s.b = s.m01 / m00;
  s.M20 = static_cast<double>(k.k20) / m00;
  s.M02 = static_cast<double>(k.k02) / m00;
  s.M11 = static_cast<double>(k.k11) / m00;
  return s;
}

std::optional<double> central_moment(const BinaryImage& tile, int p, int q) {
  check_order(p, q);
  const RawMoments r = raw_moments(tile);
  if (r.m00() == 0) return std::nullopt;
  // m00^(p+q) * M_pq = Σ_r Σ_s C(p,r) C(q,s) (-m10)^(p-r) (-m01)^(q-s) m00^(r+s) m_rs,
  // exact in 128-bit integers for any image that fits the pipeline.
  static constexpr int binom[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}};
  const wide_int m00 = r.m[0][0];
  const wide_int m10 = r.m[1][0];
  const wide_int m01 = r.m[0][1];
  wide_int total = 0;
  for (int rr = 0; rr <= p; ++rr) {
    for (int ss = 0; ss <= q; ++ss) {
      wide_int term = binom[p][rr] * binom[q][ss];
      for (int k = 0; k < p - rr; ++k) term *= -m10;
      for (int k = 0; k < q - ss; ++k) term *= -m01;
      for (int k = 0; k < rr + ss; ++k) term *= m00;
      total += term * r.m[rr][ss];
    }
  }
  return static_cast<double>(total) / power(static_cast<double>(r.m00()), p + q);
}

double moment_value(const RawMoments& raw, MomentKind kind, MomentNormalization norm) {
  if (raw.m00() == 0) return 0.0;
  const ScaledCentral k = scaled_central(raw);
  const double m00 = static_cast<double>(raw.m00());
  switch (kind) {
    case MomentKind::A:
      return static_cast<double>(k.k20 + k.k02) / power(m00, 3);
    case MomentKind::B: {
      const wide_int d = k.k20 - k.k02;
      const wide_int num = d * d + 4 * k.k11 * k.k11;
      return static_cast<double>(num) /
             power(m00, norm == MomentNormalization::AsPrinted ? 4 : 6);
    }
    case MomentKind::C:
      return static_cast<double>(k.k20 * k.k02 - k.k11 * k.k11) / power(m00, 6);
  }
  return 0.0;
}

double moment_value(const BinaryImage& tile, MomentKind kind, MomentNormalization norm) {
  return moment_value(raw_moments(tile), kind, norm);
}

}  // namespace mvqc
