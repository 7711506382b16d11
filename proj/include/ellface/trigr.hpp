#pragma once

// Trigonometric R matrix R(z) in the vector representation, tensor
// embeddings on V (x) V (x) V, and the Yang-Baxter residual.

#include <array>
#include <cmath>

#include "vectorrep.hpp"

namespace ellface {

// Dense operator on V (x) V. Row (i,k), column (j,l) holds the coefficient
// of E_{i,j} (x) E_{k,l}; pairs are laid out as index(i)*N + index(k).
struct BlockMatrix {
  AlgebraSpec spec;
  MatC m;
  cplx z = 0.0;

  int pair(int i, int k) const { return spec.index(i) * spec.N + spec.index(k); }
  cplx coeff(int i, int j, int k, int l) const { return m(pair(i, k), pair(j, l)); }
  cplx& coeff(int i, int j, int k, int l) { return m(pair(i, k), pair(j, l)); }
};

inline constexpr double kPoleGuard = 1e-12;

inline void pole_guard(cplx den, const char* what) {
  if (std::abs(den) < kPoleGuard) throw Error(ErrorKind::pole, std::string("pole in ") + what);
}

inline cplx trig_b(cplx z, double q) { return q * (1.0 - z) / (1.0 - q * q * z); }
inline cplx trig_c(cplx z, double q) { return (1.0 - q * q) / (1.0 - q * q * z); }

// rho(z) from the infinite products in base xi^2
inline cplx trig_rho(cplx z, const AlgebraSpec& s) {
  const double q = s.q;
  const double xi = s.xi;
  const double x2 = xi * xi;
  const auto P = [x2](cplx x) { return qpoch(x, x2); };
  if (s.family == Family::A) {
    const cplx den = P(z) * P(x2 * z);
    pole_guard(den, "rho(z)");
    return std::pow(q, -static_cast<double>(s.n) / (s.n + 1)) * P(q * q * z) * P(x2 * z / (q * q)) / den;
  }
  const cplx den = P(z) * P(xi * z / (q * q)) * P(q * q * xi * z) * P(x2 * z);
  pole_guard(den, "rho(z)");
  const cplx pxz = P(xi * z);
  return (1.0 / q) * P(q * q * z) * pxz * pxz * P(x2 * z / (q * q)) / den;
}

// epsilon_j and j-bar from the a_ij(z) block
inline int trig_eps(int j, const AlgebraSpec& s) { return (s.family == Family::C && j < 0) ? -1 : 1; }

inline int trig_bar(int j, const AlgebraSpec& s) {
  if (j > 0) return j - trig_eps(j, s);
  if (j == 0) return s.n - trig_eps(j, s);
  return j + s.N - trig_eps(j, s);
}

inline BlockMatrix trig_R(cplx z, const AlgebraSpec& s, bool with_rho = true) {
  const double q = s.q;
  const double xi = s.xi;
  const int N = s.N;
  pole_guard(1.0 - q * q * z, "b(z), c(z)");
  BlockMatrix R{s, MatC::Zero(N * N, N * N), z};
  const cplx b = trig_b(z, q);
  const cplx c = trig_c(z, q);
  for (int i : s.J) {
    if (i != 0) R.coeff(i, i, i, i) += 1.0;
    for (int j : s.J) {
      if (i != j && i != -j) R.coeff(i, i, j, j) += b;
      if (precedes(i, j, s) && i != -j) {
        R.coeff(i, j, j, i) += c;
        R.coeff(j, i, i, j) += z * c;
      }
    }
  }
  if (s.family != Family::A) {
    const cplx den = (1.0 - q * q * z) * (1.0 - xi * z);
    pole_guard(den, "a_ij(z) block");
    for (int i : s.J)
      for (int j : s.J) {
        cplx v;
        const double ee = trig_eps(i, s) * trig_eps(j, s) * std::pow(q, trig_bar(j, s) - trig_bar(i, s));
        const double dneg = (i == -j) ? 1.0 : 0.0;
        if (i == j)
          v = (q * q - xi * z) * (1.0 - z) + (i == 0 ? 1.0 : 0.0) * (1.0 - q) * (q + z) * (1.0 - xi * z);
        else if (precedes(i, j, s))
          v = (1.0 - q * q) * (ee * (z - 1.0) + dneg * (1.0 - xi * z));
        else
          v = (1.0 - q * q) * z * (xi * ee * (z - 1.0) + dneg * (1.0 - xi * z));
        R.coeff(i, j, -i, -j) += v / den;
      }
  }
  if (with_rho) R.m *= trig_rho(z, s);
  return R;
}

// the flip P on V (x) V
inline MatC flip(int N) {
  MatC P = MatC::Zero(N * N, N * N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) P(i * N + j, j * N + i) = 1.0;
  return P;
}

// Embed an operator on V (x) V into V (x) V (x) V acting on tensor slots
// (s1, s2) in that order; the remaining slot carries the identity.
inline MatC embed3(const MatC& M, int N, int s1, int s2) {
  const int o = 3 - s1 - s2;
  const int D = N * N * N;
  MatC out = MatC::Zero(D, D);
  std::array<int, 3> x{}, y{};
  const auto lin = [N](const std::array<int, 3>& v) { return (v[0] * N + v[1]) * N + v[2]; };
  for (int r1 = 0; r1 < N; ++r1)
    for (int r2 = 0; r2 < N; ++r2)
      for (int c1 = 0; c1 < N; ++c1)
        for (int c2 = 0; c2 < N; ++c2) {
          const cplx v = M(r1 * N + r2, c1 * N + c2);
          if (v == cplx(0.0)) continue;
          for (int b = 0; b < N; ++b) {
            x[s1] = r1; x[s2] = r2; x[o] = b;
            y[s1] = c1; y[s2] = c2; y[o] = b;
            out(lin(x), lin(y)) += v;
          }
        }
  return out;
}

// Sum over basis vectors c of slot k: projector(slot k = c) times embed3(M_c).
// Used for the dynamical shifts lambda + h^{(k)}.
template <class Fn>
MatC embed3_graded(Fn&& Mc, const AlgebraSpec& s, int s1, int s2, int k) {
  const int N = s.N;
  const int D = N * N * N;
  MatC out = MatC::Zero(D, D);
  for (int c : s.J) {
    const MatC E = embed3(Mc(c), N, s1, s2);
    const int ci = s.index(c);
    for (int r = 0; r < D; ++r) {
      const int digit = (k == 0 ? r / (N * N) : (k == 1 ? (r / N) % N : r % N));
      if (digit == ci) out.row(r) = E.row(r);
    }
  }
  return out;
}

inline double max_abs(const MatC& m) { return m.cwiseAbs().maxCoeff(); }

inline double qybe_residual_of(const MatC& R12, const MatC& R13, const MatC& R23) {
  const MatC L = R12 * R13 * R23;
  const MatC Rr = R23 * R13 * R12;
  return max_abs(L - Rr) / max_abs(L);
}

// R12(z1/z2) R13(z1) R23(z2) = R23(z2) R13(z1) R12(z1/z2), relative max norm
inline double qybe_residual(cplx z1, cplx z2, const AlgebraSpec& s) {
  const int N = s.N;
  return qybe_residual_of(embed3(trig_R(z1 / z2, s).m, N, 0, 1), embed3(trig_R(z1, s).m, N, 0, 2),
                          embed3(trig_R(z2, s).m, N, 1, 2));
}

}  // namespace ellface
