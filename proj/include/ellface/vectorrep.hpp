#pragma once

// Matrices of e_i, f_i, t_i in the vector representation, the Cartan data
// hbar_i, hbar^i, and the diagonal operators q^T and q^{-2 theta-bar}.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "liealg.hpp"

namespace ellface {

using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;

struct RepMatrices {
  std::vector<MatR> e, f, t;      // i = 0..n
  std::vector<double> qi;         // q_i with t_i = q_i^{h_i}
  std::vector<MatR> hbar, hbar_dual;  // i = 1..n stored at i-1
};

inline RepMatrices vector_rep(const AlgebraSpec& s) {
  const int n = s.n;
  const int N = s.N;
  const double q = s.q;
  const auto E = [&](int i, int j) {
    MatR m = MatR::Zero(N, N);
    m(s.index(i), s.index(j)) = 1.0;
    return m;
  };
  const auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  const auto T = [&](auto expo) {
    MatR m = MatR::Zero(N, N);
    for (int j : s.J) m(s.index(j), s.index(j)) = std::pow(q, expo(j));
    return m;
  };
  const auto Dg = [&](auto coef) {
    MatR m = MatR::Zero(N, N);
    for (int j : s.J) m(s.index(j), s.index(j)) = coef(j);
    return m;
  };
  RepMatrices r;
  r.e.resize(n + 1);
  r.t.resize(n + 1);
  r.qi.assign(n + 1, q);
  if (s.family == Family::A) {
    r.e[0] = E(n + 1, 1);
    r.t[0] = T([&](int j) { return -d(j, 1) + d(j, n + 1); });
    for (int i = 1; i <= n; ++i) {
      r.e[i] = E(i, i + 1);
      r.t[i] = T([&](int j) { return d(j, i) - d(j, i + 1); });
    }
  } else {
    if (s.family == Family::C) {
      r.e[0] = E(-1, 1);
      r.t[0] = T([&](int j) { return -2 * d(j, 1) + 2 * d(j, -1); });
      r.qi[0] = q * q;
    } else {
      const double sg = (s.family == Family::B ? (n % 2 ? -1.0 : 1.0) : ((n - 1) % 2 ? -1.0 : 1.0));
      r.e[0] = sg * (E(-1, 2) - E(-2, 1));
      r.t[0] = T([&](int j) { return -d(j, 1) - d(j, 2) + d(j, -1) + d(j, -2); });
    }
    for (int i = 1; i <= n - 1; ++i) {
      r.e[i] = E(i, i + 1) - E(-i - 1, -i);
      r.t[i] = T([&](int j) { return d(j, i) - d(j, i + 1) + d(j, -i - 1) - d(j, -i); });
    }
    if (s.family == Family::B) {
      const double qn = std::sqrt(q);
      r.e[n] = std::sqrt(qn + 1.0 / qn) * (E(n, 0) - E(0, -n));
      r.t[n] = T([&](int j) { return d(j, n) - d(j, -n); });
      r.qi[n] = qn;
    } else if (s.family == Family::C) {
      r.e[n] = E(n, -n);
      r.t[n] = T([&](int j) { return 2 * d(j, n) - 2 * d(j, -n); });
      r.qi[n] = q * q;
    } else {
      r.e[n] = E(n - 1, -n) - E(n, -n + 1);
      r.t[n] = T([&](int j) { return d(j, n - 1) + d(j, n) - d(j, -n) - d(j, -n + 1); });
    }
  }
  for (const auto& m : r.e) r.f.push_back(m.transpose());

  for (int i = 1; i <= n; ++i) {
    MatR h, hd;
    if (s.family == Family::A) {
      h = E(i, i) - E(i + 1, i + 1);
      hd = Dg([&](int j) { return (j <= i ? (n - i + 1.0) : -static_cast<double>(i)) / (n + 1.0); });
    } else {
      const auto sgn = [](int j) { return j > 0 ? 1.0 : (j < 0 ? -1.0 : 0.0); };
      if (i < n) {
        h = E(i, i) - E(i + 1, i + 1) + E(-i - 1, -i - 1) - E(-i, -i);
      } else if (s.family == Family::B) {
        h = 2.0 * (E(n, n) - E(-n, -n));
      } else if (s.family == Family::C) {
        h = E(n, n) - E(-n, -n);
      } else {
        h = E(n - 1, n - 1) + E(n, n) - E(-n, -n) - E(-n + 1, -n + 1);
      }
      const bool half_last = (s.family == Family::C && i == n);
      const bool spin_minus = (s.family == Family::D && i == n - 1);
      const bool spin_plus = (s.family == Family::D && i == n);
      hd = Dg([&](int j) {
        const int a = std::abs(j);
        if (a == 0) return 0.0;
        if (half_last) return 0.5 * sgn(j);
        if (spin_minus) return (a <= n - 1 ? 0.5 : -0.5) * sgn(j);
        if (spin_plus) return 0.5 * sgn(j);
        return a <= i ? sgn(j) : 0.0;
      });
    }
    r.hbar.push_back(h);
    r.hbar_dual.push_back(hd);
  }
  return r;
}

// diagonal of q^{pi_{V(x)V}(T)} on V (x) V, entry at index(i)*N + index(j)
inline VecC qT_diag(const AlgebraSpec& s) {
  const int N = s.N;
  VecC d(N * N);
  for (int i : s.J)
    for (int j : s.J) {
      double e;
      if (s.family == Family::A)
        e = -1.0 / (s.n + 1) + (i == j ? 1.0 : 0.0);
      else
        e = (i == j ? 1.0 : 0.0) - (i == -j ? 1.0 : 0.0);
      d(s.index(i) * N + s.index(j)) = std::pow(s.q, e);
    }
  return d;
}

inline MatC qT_matrix(const AlgebraSpec& s) { return qT_diag(s).asDiagonal(); }

// log of the diagonal of q^{-2 pi_V(theta-bar(lambda))}
inline Eigen::VectorXd qtheta_log(const AlgebraSpec& s, const Heights& h) {
  const double lq = std::log(s.q);
  Eigen::VectorXd l(s.N);
  for (int j : s.J) {
    const double a = av(h, j, s);
    l(s.index(j)) = (s.family == Family::A ? (s.n / (s.n + 1.0)) + 2.0 * a : 2.0 * a + 1.0) * lq;
  }
  return l;
}

inline VecC qtheta_diag(const AlgebraSpec& s, const Heights& h) {
  return qtheta_log(s, h).array().exp().cast<cplx>();
}

}  // namespace ellface
