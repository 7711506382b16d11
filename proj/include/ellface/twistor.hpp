#pragma once

// Face-type twistor F(z, lambda) in the vector representation: the ordered
// product, the closed 1x1 and 2x2 block solutions, the dynamical R matrix
// R(z, lambda) = P F(1/z) P R(z) F(z)^{-1}, and residuals for the difference
// equation, the dynamical YBE and the shifted cocycle condition.

#include <Eigen/LU>
#include <vector>

#include "trigr.hpp"

namespace ellface {

enum class TwistorMethod { product, closed, hybrid };

inline const char* to_string(TwistorMethod m) {
  switch (m) {
    case TwistorMethod::product: return "product";
    case TwistorMethod::closed: return "closed";
    case TwistorMethod::hybrid: return "hybrid";
  }
  return "?";
}

struct TwistorResult {
  BlockMatrix F;
  int K = 0;
  TwistorMethod method = TwistorMethod::product;
  bool domain_ok = false;
  double tail = 0.0;  // max |A_K - 1| of the last factor
};

inline constexpr int kDefaultK = 40;

// Lambda sign convention. negated maps lambda-bar to -lambda-bar, i.e.
// s_i + 1 -> -(s_i + 1) for i = 1..n.
enum class LambdaSign { standard, negated };

inline DynamicalWeight apply_lambda_sign(const DynamicalWeight& w, LambdaSign sg) {
  if (sg == LambdaSign::standard) return w;
  DynamicalWeight v = w;
  for (size_t i = 1; i < v.s.size(); ++i) v.s[i] = -v.s[i] - 2.0;
  return v;
}

// w_ij = q^{2(a_i - a_j)}
inline double w_pair(const Heights& h, int i, int j, const AlgebraSpec& s) {
  return std::pow(s.q, 2.0 * (av(h, i, s) - av(h, j, s)));
}

// Product convergence: every conjugated factor decays iff p < |w_ij| < 1 for i < j.
inline bool twistor_domain_ok(const Heights& h, const AlgebraSpec& s, const ModulusParams& m) {
  for (int i : s.J)
    for (int j : s.J) {
      if (!precedes(i, j, s)) continue;
      const double w = w_pair(h, i, j, s);
      if (!(w > m.p && w < 1.0)) return false;
    }
  return true;
}

// Ad(diag(exp(l))^k)(M) computed entrywise in the log domain, so that large
// conjugation factors never multiply tiny entries in floating point.
inline MatC conj_pow(const MatC& M, const Eigen::VectorXd& l, int k) {
  MatC out = MatC::Zero(M.rows(), M.cols());
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c) {
      const cplx v = M(r, c);
      if (v == cplx(0.0)) continue;
      out(r, c) = std::exp(std::log(v) + static_cast<double>(k) * (l(r) - l(c)));
    }
  return out;
}

inline MatC inverse(const MatC& M) { return Eigen::PartialPivLU<MatC>(M).inverse(); }

// R_0(z) = q^T R(z)
inline MatC R0(cplx z, const AlgebraSpec& s) { return qT_diag(s).asDiagonal() * trig_R(z, s).m; }

// row labels for slot-1 conjugation on V (x) V
inline Eigen::VectorXd slot1_log(const AlgebraSpec& s, const Heights& h) {
  const Eigen::VectorXd l = qtheta_log(s, h);
  Eigen::VectorXd out(s.N * s.N);
  for (int r = 0; r < s.N * s.N; ++r) out(r) = l(r / s.N);
  return out;
}

// F(z) = A_K ... A_2 A_1 with A_k = Ad(phi^k (x) 1)(R_0(p^k z)^{-1}); the
// limit factor is taken as the identity.
inline TwistorResult twistor_numeric(cplx z, const Heights& h, int K, const AlgebraSpec& s, const ModulusParams& m) {
  if (K < 1) throw Error(ErrorKind::domain, "truncation K must be positive");
  if (!twistor_domain_ok(h, s, m))
    throw Error(ErrorKind::domain, "dynamical weight outside the twistor convergence domain p < w_ij < 1");
  const Eigen::VectorXd l = slot1_log(s, h);
  const int D = s.N * s.N;
  MatC F = MatC::Identity(D, D);
  double tail = 0.0;
  for (int k = K; k >= 1; --k) {
    const MatC Ak = conj_pow(inverse(R0(std::pow(m.p, k) * z, s)), l, k);
    if (k == K) tail = max_abs(Ak - MatC::Identity(D, D));
    F = F * Ak;
  }
  if (!(tail < 1e-10)) throw Error(ErrorKind::convergence, "twistor factors fail to decay; increase K");
  return TwistorResult{BlockMatrix{s, F, z}, K, TwistorMethod::product, true, tail};
}

// f(z) from the 1x1 block
inline cplx f_closed(cplx z, const AlgebraSpec& s, const ModulusParams& m) {
  const double p = m.p, q = s.q, xi = s.xi;
  const auto D = [&](cplx x) { return dbl_prod(x, p, xi); };
  if (s.family == Family::A) return D(p * z) * D(p * xi * xi * z) / (D(p * q * q * z) * D(p * xi * xi * z / (q * q)));
  const cplx pxz = D(p * xi * z);
  return D(p * z) * D(p * xi * z / (q * q)) * D(p * q * q * xi * z) * D(p * xi * xi * z) /
         (D(p * q * q * z) * pxz * pxz * D(p * xi * xi * z / (q * q)));
}

struct XBlock {
  cplx ii, ij, ji, jj;  // X_ij^ij, X_ij^ji, X_ji^ij, X_ji^ji
};

// 2x2 block solutions. X_ji^ij carries z in the numerator and the constant
// 1 - p/w in the denominator; this is the form solving the block equation
// with X_ji^ij(0) = 0.
inline XBlock X_closed(cplx z, double w, double q, double p) {
  const cplx zz = p * z / (q * q);
  const double pw = p / w;
  XBlock x;
  x.ii = phi21(w * q * q, q * q, w, p, zz);
  x.ij = (q - 1.0 / q) * w / (1.0 - w) * phi21(w * q * q, p * q * q, p * w, p, zz);
  x.ji = (q - 1.0 / q) * pw * z / (1.0 - pw) * phi21(pw * q * q, p * q * q, p * pw, p, zz);
  x.jj = phi21(pw * q * q, q * q, pw, p, zz);
  return x;
}

inline bool in_nxn_block(int i, int j, int k, int l) { return k == -i && l == -j; }

// F assembled from f(z) and the X blocks; for B, C, D the N x N block is
// filled from the ordered product (method hybrid).
inline TwistorResult twistor_closed(cplx z, const Heights& h, const AlgebraSpec& s, const ModulusParams& m,
                                    int K = kDefaultK) {
  if (std::abs(m.p * z / (s.q * s.q)) >= 1.0) throw Error(ErrorKind::divergence, "closed twistor needs |p q^-2 z| < 1");
  if (!twistor_domain_ok(h, s, m))
    throw Error(ErrorKind::domain, "dynamical weight outside the twistor domain p < w_ij < 1");
  const int D = s.N * s.N;
  BlockMatrix F{s, MatC::Zero(D, D), z};
  const cplx f = f_closed(z, s, m);
  for (int i : s.J) {
    if (i != 0) F.coeff(i, i, i, i) = f;
    for (int j : s.J) {
      if (!precedes(i, j, s) || i == -j) continue;
      const XBlock x = X_closed(z, w_pair(h, i, j, s), s.q, m.p);
      F.coeff(i, i, j, j) = f * x.ii;
      F.coeff(j, j, i, i) = f * x.jj;
      F.coeff(i, j, j, i) = f * x.ij;
      F.coeff(j, i, i, j) = f * x.ji;
    }
  }
  TwistorResult out{F, 0, TwistorMethod::closed, true, 0.0};
  if (s.family != Family::A) {
    const TwistorResult num = twistor_numeric(z, h, K, s, m);
    for (int i : s.J)
      for (int j : s.J) F.coeff(i, j, -i, -j) = num.F.coeff(i, j, -i, -j);
    out = TwistorResult{F, K, TwistorMethod::hybrid, true, num.tail};
  }
  return out;
}

inline TwistorResult twistor(cplx z, const Heights& h, const AlgebraSpec& s, const ModulusParams& m,
                             TwistorMethod method, int K = kDefaultK) {
  if (method == TwistorMethod::product) return twistor_numeric(z, h, K, s, m);
  return twistor_closed(z, h, s, m, K);
}

// R(z, lambda) = P F(1/z) P R(z) F(z)^{-1}
inline BlockMatrix dynR(cplx z, const Heights& h, const AlgebraSpec& s, const ModulusParams& m,
                        TwistorMethod method = TwistorMethod::product, int K = kDefaultK) {
  const MatC P = flip(s.N);
  const MatC Fi = twistor(1.0 / z, h, s, m, method, K).F.m;
  const MatC Fz = twistor(z, h, s, m, method, K).F.m;
  return BlockMatrix{s, P * Fi * P * trig_R(z, s).m * inverse(Fz), z};
}

// rho_ell(z) = f(1/z) rho(z) / f(z), written as double products
inline cplx rho_ell(cplx z, const AlgebraSpec& s, const ModulusParams& m) {
  const double p = m.p, q = s.q, xi = s.xi;
  const double q2 = q * q, x2 = xi * xi;
  const auto D = [&](cplx x) { return dbl_prod(x, p, xi); };
  if (s.family == Family::A) {
    const cplx den = D(z) * D(x2 * z) * D(p * q2 / z) * D(p * x2 / (q2 * z));
    pole_guard(den, "rho_ell");
    return std::pow(q, -static_cast<double>(s.n) / (s.n + 1)) * D(q2 * z) * D(x2 * z / q2) * D(p / z) *
           D(p * x2 / z) / den;
  }
  const cplx dx = D(xi * z), dpx = D(p * xi / z);
  const cplx den = D(z) * D(xi * z / q2) * D(q2 * xi * z) * D(x2 * z) * D(p * q2 / z) * dpx * dpx * D(p * x2 / (q2 * z));
  pole_guard(den, "rho_ell");
  return (1.0 / q) * D(q2 * z) * dx * dx * D(x2 * z / q2) * D(p / z) * D(p * xi / (q2 * z)) * D(p * q2 * xi / z) *
         D(p * x2 / z) / den;
}

struct PairBlock {
  int i = 0, j = 0;
  double w = 0.0;
  cplx R_ii, R_jj, R_ij, R_ji;  // R_ij^ij, R_ji^ji, R_ij^ji, R^ij_ji
};

struct ClosedBlocks {
  cplx rho_ell;
  std::vector<PairBlock> pairs;
};

inline ClosedBlocks dynR_closed_blocks(cplx z, const Heights& h, const AlgebraSpec& s, const ModulusParams& m) {
  const double p = m.p, q = s.q;
  ClosedBlocks out;
  out.rho_ell = rho_ell(z, s, m);
  const auto th = [p](cplx x) { return theta_p(x, p); };
  const auto guard = [](cplx v, const char* what) {
    if (std::abs(v) < 1e-13) throw Error(ErrorKind::pole, std::string("theta zero in ") + what);
    return v;
  };
  for (int i : s.J)
    for (int j : s.J) {
      if (!precedes(i, j, s) || i == -j) continue;
      const double w = w_pair(h, i, j, s);
      const double pw = p / w;
      const cplx tz = th(z) / guard(th(q * q * z), "Theta_p(q^2 z)");
      const cplx qpw = guard(qpoch(pw, p), "(p/w;p)");
      const cplx qw = guard(qpoch(w, p), "(w;p)");
      PairBlock b;
      b.i = i;
      b.j = j;
      b.w = w;
      b.R_ii = q * qpoch(pw * q * q, p) * qpoch(pw / (q * q), p) / (qpw * qpw) * tz;
      b.R_jj = q * qpoch(w * q * q, p) * qpoch(w / (q * q), p) / (qw * qw) * tz;
      b.R_ij = th(q * q) / guard(th(w), "Theta_p(w)") * th(w * z) / th(q * q * z);
      b.R_ji = z * th(q * q) / guard(th(pw), "Theta_p(p/w)") * th(pw * z) / th(q * q * z);
      out.pairs.push_back(b);
    }
  return out;
}

// F(pz) = (q^{2 theta-bar} (x) 1) F(z) (q^{-2 theta-bar} (x) 1) q^T R(pz)
inline double twistor_diff_residual_of(const MatC& Fpz, const MatC& Fz, cplx z, const Heights& h,
                                       const AlgebraSpec& s, const ModulusParams& m) {
  const Eigen::VectorXd l = slot1_log(s, h);
  const MatC rhs = conj_pow(Fz, l, -1) * R0(m.p * z, s);
  return max_abs(Fpz - rhs) / max_abs(Fpz);
}

inline double twistor_diff_residual(cplx z, const Heights& h, int K, const AlgebraSpec& s, const ModulusParams& m,
                                    TwistorMethod method = TwistorMethod::product) {
  const MatC Fpz = twistor(m.p * z, h, s, m, method, K).F.m;
  const MatC Fz = twistor(z, h, s, m, method, K).F.m;
  return twistor_diff_residual_of(Fpz, Fz, z, h, s, m);
}

// R12(a+h3) R13(a) R23(a+h1) = R23(a) R13(a+h2) R12(a), with the spectral
// arguments z1/z2, z1, z2. The shift by the slot-k weight is applied through
// block-diagonal evaluation over the basis of slot k.
template <class RFn>
double dybe_residual_with(RFn&& Rdyn, cplx z1, cplx z2, const Heights& h, const AlgebraSpec& s) {
  const int N = s.N;
  const auto shifted = [&](cplx z) {
    return [&, z](int c) { return Rdyn(z, shift(h, c, s)); };
  };
  const MatC R12s = embed3_graded(shifted(z1 / z2), s, 0, 1, 2);
  const MatC R13 = embed3(Rdyn(z1, h), N, 0, 2);
  const MatC R23s = embed3_graded(shifted(z2), s, 1, 2, 0);
  const MatC R23 = embed3(Rdyn(z2, h), N, 1, 2);
  const MatC R13s = embed3_graded(shifted(z1), s, 0, 2, 1);
  const MatC R12 = embed3(Rdyn(z1 / z2, h), N, 0, 1);
  const MatC L = R12s * R13 * R23s;
  const MatC R = R23 * R13s * R12;
  return max_abs(L - R) / max_abs(L);
}

inline double dybe_residual(cplx z1, cplx z2, const Heights& h, const AlgebraSpec& s, const ModulusParams& m,
                            TwistorMethod method = TwistorMethod::product, int K = kDefaultK) {
  return dybe_residual_with([&](cplx z, const Heights& a) { return dynR(z, a, s, m, method, K).m; }, z1, z2, h, s);
}

// Shifted cocycle condition on V (x) V (x) V:
// F12(z1/z2, a) (Delta (x) id)F(a) = F23(z2/z3, a + h1) (id (x) Delta)F(a),
// with both coproduct images built from the same ordered product.
inline double cocycle_residual(cplx z1, cplx z2, cplx z3, const Heights& h, const AlgebraSpec& s,
                               const ModulusParams& m, int K = kDefaultK) {
  const int N = s.N;
  const int D = N * N * N;
  const Eigen::VectorXd lph = qtheta_log(s, h);
  Eigen::VectorXd lqT(N * N);
  const VecC qd = qT_diag(s);
  for (int k = 0; k < N * N; ++k) lqT(k) = std::log(qd(k).real());
  Eigen::VectorXd T12(D), T23(D), l1(D), l2(D);
  for (int x0 = 0; x0 < N; ++x0)
    for (int x1 = 0; x1 < N; ++x1)
      for (int x2 = 0; x2 < N; ++x2) {
        const int r = (x0 * N + x1) * N + x2;
        T12(r) = lqT(x0 * N + x1);
        T23(r) = lqT(x1 * N + x2);
        l1(r) = lph(x0);
        l2(r) = lph(x1);
      }
  const VecC e23 = T23.array().exp().cast<cplx>(), e12 = T12.array().exp().cast<cplx>();
  const VecC i23 = (-T23.array()).exp().cast<cplx>(), i12 = (-T12.array()).exp().cast<cplx>();
  const Eigen::VectorXd ld = l1 + l2 + 2.0 * T12;
  MatC DF = MatC::Identity(D, D), IF = MatC::Identity(D, D);
  for (int k = K; k >= 1; --k) {
    const double pk = std::pow(m.p, k);
    const MatC X1 = e23.asDiagonal() * embed3(R0(pk * z1 / z3, s), N, 0, 2) * i23.asDiagonal() *
                    embed3(R0(pk * z2 / z3, s), N, 1, 2);
    DF = DF * conj_pow(inverse(X1), ld, k);
    const MatC X2 = e12.asDiagonal() * embed3(R0(pk * z1 / z3, s), N, 0, 2) * i12.asDiagonal() *
                    embed3(R0(pk * z1 / z2, s), N, 0, 1);
    IF = IF * conj_pow(inverse(X2), l1, k);
  }
  const MatC F12 = embed3(twistor_numeric(z1 / z2, h, K, s, m).F.m, N, 0, 1);
  const MatC F23s =
      embed3_graded([&](int c) { return twistor_numeric(z2 / z3, shift(h, c, s), K, s, m).F.m; }, s, 1, 2, 0);
  const MatC L = F12 * DF;
  const MatC R = F23s * IF;
  return max_abs(L - R) / max_abs(L);
}

}  // namespace ellface
