#pragma once

// Default parameter points and tolerances.
//
// Face identities use weights deep in the positive regime, where every bracket
// entering the weights is well away from a theta zero. Twistor-based checks
// need p < w_ij < 1 for all i < j, which bounds the spread of the a_mu.

#include <string>
#include <vector>

#include "liealg.hpp"

namespace ellface {

inline constexpr double kDefaultQ = 0.4;
inline constexpr double kDefaultR = 14.0;

struct DefaultPoints {
  std::vector<double> face;     // a-coordinates for face identities
  std::vector<double> gauge;    // a-coordinates for the gauge test
  std::vector<double> twistor;  // a-coordinates for twistor, DYBE, cocycle
};

inline DefaultPoints default_points(const AlgebraSpec& s) {
  switch (s.family) {
    case Family::A:
      if (s.n == 1) return {{4.31, -4.31}, {2.155, -2.155}, {1.15, -1.15}};
      if (s.n == 2) return {{4.31, -0.02, -4.29}, {4.31, -0.02, -4.29}, {4.31, -0.02, -4.29}};
      break;
    case Family::B:
      if (s.n == 2) return {{7.3, 4.1}, {5.3, 2.9}, {5.0, 2.5}};
      break;
    case Family::C:
      if (s.n == 2) return {{4.43, 2.17}, {4.43, 2.17}, {4.3, 2.2}};
      break;
    case Family::D:
      if (s.n == 3) return {{5.93, 3.71, 1.52}, {5.93, 3.71, 1.52}, {5.9, 3.9, 1.95}};
      break;
  }
  // generic fallback: decreasing, irrationally spaced heights inside the twistor domain
  std::vector<double> a;
  if (s.family == Family::A) {
    const int N = s.n + 1;
    for (int j = 0; j < N; ++j) a.push_back(1.37 * (0.5 * (N - 1) - j) + 0.013 * j * j);
    double mean = 0.0;
    for (double x : a) mean += x / N;
    for (double& x : a) x -= mean;
  } else {
    for (int j = 0; j < s.n; ++j) a.push_back(1.37 * (s.n - j) + 0.29 + 0.013 * j * j);
  }
  return {a, a, a};
}

// spectral points used when no --z grid is given
inline std::vector<cplx> default_z_grid() { return {cplx(0.63, 0.21), cplx(0.41, -0.17), cplx(0.77, 0.05)}; }

// the second (and third) spectral point of a multi-point check is z times this factor
inline const cplx kZPartner{0.58, 0.19};

// spectral parameters used when no --u grid is given
inline std::vector<double> default_u_grid() { return {0.13, 0.31, 0.49, 0.67, 0.85}; }

// second spectral parameter of the face YBE
inline constexpr double kDefaultV = 0.17;

// grid of the gauge fit when no --u grid is given
inline std::vector<double> default_gauge_grid() { return {0.31, 0.77, -0.45, 0.12, 1.3, -0.9}; }

// exponents a, b, c of the 2phi1 connection check
inline constexpr double kConnA = 0.31, kConnB = 0.77, kConnC = 1.43;

inline bool small_rank(const AlgebraSpec& s) { return s.family == Family::A && s.n == 1; }

// Acceptance tolerances per identity and family.
inline double default_tolerance(const std::string& identity, const AlgebraSpec& s) {
  const bool A = s.family == Family::A;
  if (identity == "conn-formula") return 1e-9;
  if (identity == "qybe") return A ? 1e-9 : 1e-8;
  if (identity == "twistor-diff/closed") return 1e-9;
  if (identity == "twistor-diff/product" || identity == "twistor-agree") return 1e-8;
  if (identity == "dybe") return small_rank(s) ? 1e-8 : 1e-7;
  if (identity == "cocycle") return 1e-7;
  if (identity == "face-ybe" || identity == "unitarity") return small_rank(s) ? 1e-9 : 1e-8;
  if (identity == "inversion2" || identity == "crossing" || identity == "part2-unique") return 1e-8;
  if (identity.rfind("gauge/stage1", 0) == 0) return 1e-8;
  if (identity == "gauge/stage2") return 1e-7;
  if (identity.rfind("kappa", 0) == 0) return 1e-9;
  return 1e-8;
}

}  // namespace ellface
