#ifndef GMESP_TESTS_FIXTURES_HPP
#define GMESP_TESTS_FIXTURES_HPP

#include "gmesp/instance.hpp"
#include "gmesp/matrix_bounds.hpp"

namespace fixtures {

using gmesp::Mat;
using gmesp::Vec;

inline Mat rational_C() {
  Mat C(6, 6);
  C << 217, 220, 156, 110, 106, 230,
       220, 249, 191, 96, 99, 256,
       156, 191, 154, 58, 64, 194,
       110, 96, 58, 72, 66, 104,
       106, 99, 64, 66, 62, 106,
       230, 256, 194, 104, 106, 264;
  return C;
}

inline gmesp::Instance rational_instance() { return gmesp::make_instance(rational_C(), 4, 3); }

inline Vec rational_x() {
  Vec x(6);
  x << 99993, 21423, 99933, 66510, 99929, 12212;
  return x / 100000.0;
}

inline Mat rational_X() {
  Mat X(6, 6);
  X << 94959, 5313, -6586, 6860, -8610, 3873,
       5313, 12411, 13475, 1108, 2594, -5850,
       -6586, 13475, 78035, -8172, 2024, 8974,
       6860, 1108, -8172, 34884, 28990, -252,
       -8610, 2594, 2024, 28990, 71825, 2748,
       3873, -5850, 8974, -252, 2748, 7886;
  return X / 100000.0;
}

inline constexpr double kRationalPrimal = 11.80439587;
inline constexpr double kRationalDual = 11.80435231;
inline constexpr double kRationalOptimum = 11.67922;

inline gmesp::MatrixDualPoint rational_dual() {
  gmesp::MatrixDualPoint d;
  d.kind = gmesp::MatrixKind::Glinx;
  d.soc_rows = true;
  d.upper = gmesp::UpperBound::DiagX;
  d.nu.resize(6);
  d.nu << 131673.0 / 312500, 0, 562609.0 / 10000000, 19.0 / 312500, 58013.0 / 1000000, 0;
  d.upsilon.resize(6);
  d.upsilon << 0, 27.0 / 10000000, 0, 0, 0, 607.0 / 10000000;
  d.eta.resize(6);
  d.eta << 0, 231.0 / 25000, 0, 0, 0, 7039.0 / 100000;
  d.pi = Vec(0);
  d.tau = 5963.0 / 10000;
  d.xi = -3170969.0 / 5000000;
  d.Theta.resize(6, 6);
  d.Theta << 907052, -891279, 1276501, -677235, 926199, -969631,
             -891279, 4302195, -2344586, 70790, -298866, -1580259,
             1276501, -2344586, 3874474, 1002743, 172454, -2149685,
             -677235, 70790, 1002743, 3288708, -2888223, -351266,
             926199, -298866, 172454, -2888223, 3034885, -724204,
             -969631, -1580259, -2149685, -351266, -724204, 4386025;
  d.Theta *= 1e-7;
  d.Z.resize(6, 6);
  d.Z << 10176536, 2078316, -1511788, 1343043, -1434442, 2136729,
         2078316, 5870573, 5419707, -51650, 797717, 5485309,
         -1511788, 5419707, 6525609, -1797065, 68161, 4816399,
         1343043, -51650, -1797065, 5963608, 5687307, 813706,
         -1434442, 797717, 68161, 5687307, 6543130, 1570388,
         2136729, 5485309, 4816399, 813706, 1570388, 5258493;
  d.Z *= 1e-7;
  d.Omega.resize(6, 6);
  d.Omega << 957, -7721, 2255, 46, 625, -7477,
             -7721, 62480, -18244, -376, -5053, 60493,
             2255, -18244, 5331, 110, 1475, -17666,
             46, -376, 110, 11, 27, -364,
             625, -5053, 1475, 27, 413, -4893,
             -7477, 60493, -17666, -364, -4893, 58580;
  d.Omega *= 1e-6;
  d.W = Mat::Zero(6, 6);
  d.W.row(1) << 25, 53, 63, 5, 12, -31;
  d.W.row(5) << 194, -241, 451, -1, 135, 422;
  d.W *= 1e-4;
  d.objective = kRationalDual;
  return d;
}

inline Mat branching3_C() {
  Mat C(4, 4);
  C << 4, 2, 1, 1,
       2, 2, 1, 0,
       1, 1, 1, 0,
       1, 0, 0, 2;
  return C;
}

}  // namespace fixtures

#endif  // GMESP_TESTS_FIXTURES_HPP
