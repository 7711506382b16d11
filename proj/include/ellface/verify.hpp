#pragma once

// Residuals for the face-model identities (face YBE, unitarity, second
// inversion, crossing), part-II uniqueness, and the gauge equivalence between
// the dynamical R matrix and the face weights.

#include <Eigen/QR>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "faceweights.hpp"
#include "twistor.hpp"

namespace ellface {

struct ResidualReport {
  std::string identity;
  std::string algebra;
  double q = 0.0, r = 0.0;
  std::vector<double> a;  // a_mu in J order
  std::vector<cplx> point;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::map<std::string, std::string> meta;
};

inline ResidualReport make_report(std::string identity, const AlgebraSpec& s, const ModulusParams& m,
                                  const Heights& h, std::vector<cplx> point, double residual, double tol) {
  ResidualReport rep;
  rep.identity = std::move(identity);
  rep.algebra = s.name();
  rep.q = m.q;
  rep.r = m.r;
  rep.a = h.a;
  rep.point = std::move(point);
  rep.residual = residual;
  rep.tolerance = tol;
  rep.pass = residual < tol;
  return rep;
}

// |L - R| relative to max(|L|, |R|, 1): relative for large sides, absolute near zero
inline double side_diff(cplx L, cplx R) { return std::abs(L - R) / std::max({std::abs(L), std::abs(R), 1.0}); }

// A weight functor maps (a, b, c, d, u) to a complex number.
using WeightFn = std::function<cplx(const Heights&, const Heights&, const Heights&, const Heights&, cplx)>;

inline WeightFn wbar_fn(const AlgebraSpec& s, const ModulusParams& m) {
  return [s, m](const Heights& a, const Heights& b, const Heights& c, const Heights& d, cplx u) {
    return wbar(a, b, c, d, u, s, m);
  };
}

inline WeightFn weight_fn(const AlgebraSpec& s, const ModulusParams& m, const Kappa& k) {
  return [s, m, &k](const Heights& a, const Heights& b, const Heights& c, const Heights& d, cplx u) {
    return k(u) * wbar(a, b, c, d, u, s, m);
  };
}

inline bool contains_height(const std::vector<Heights>& v, const Heights& h) {
  for (const auto& x : v)
    if (same_heights(x, h)) return true;
  return false;
}

// sum_g W(f g/e d|u) W(a b/f g|u+v) W(b c/g d|v)  and
// sum_g W(a b/g c|u) W(g c/e d|u+v) W(a g/f e|v)
inline std::pair<cplx, cplx> face_ybe_sides(const WeightFn& W, const Heights& a, const Heights& b, const Heights& c,
                                            const Heights& d, const Heights& e, const Heights& f, cplx u, cplx v,
                                            const AlgebraSpec& s, const ModulusParams& m) {
  cplx L = 0.0, R = 0.0;
  for (const auto& g : successors(f, s, m))
    if (adjacent(g, d, s) && adjacent(b, g, s)) L += W(f, g, e, d, u) * W(a, b, f, g, u + v) * W(b, c, g, d, v);
  for (const auto& g : successors(a, s, m))
    if (adjacent(g, c, s) && adjacent(g, e, s)) R += W(a, b, g, c, u) * W(g, c, e, d, u + v) * W(a, g, f, e, v);
  return {L, R};
}

// Visit every corner configuration (a, b, c, d, e, f) of the face YBE based at a.
template <class Fn>
void for_each_ybe_config(const Heights& a, const AlgebraSpec& s, const ModulusParams& m, Fn&& fn) {
  for (const auto& b : successors(a, s, m))
    for (const auto& c : successors(b, s, m))
      for (const auto& d : successors(c, s, m))
        for (const auto& f : successors(a, s, m))
          for (const auto& e : successors(f, s, m))
            if (adjacent(e, d, s)) fn(b, c, d, e, f);
}

inline double face_ybe_scan_with(const WeightFn& W, const Heights& a, cplx u, cplx v, const AlgebraSpec& s,
                                 const ModulusParams& m, int* count = nullptr) {
  double worst = 0.0;
  int n = 0;
  for_each_ybe_config(a, s, m, [&](const Heights& b, const Heights& c, const Heights& d, const Heights& e,
                                   const Heights& f) {
    const auto [L, R] = face_ybe_sides(W, a, b, c, d, e, f, u, v, s, m);
    worst = std::max(worst, side_diff(L, R));
    ++n;
  });
  if (count) *count = n;
  return worst;
}

inline ResidualReport face_ybe_residual(const Heights& a, const Heights& b, const Heights& c, const Heights& d,
                                        const Heights& e, const Heights& f, cplx u, cplx v, const AlgebraSpec& s,
                                        const ModulusParams& m, double tol) {
  const auto [L, R] = face_ybe_sides(wbar_fn(s, m), a, b, c, d, e, f, u, v, s, m);
  return make_report("face-ybe", s, m, a, {u, v}, side_diff(L, R), tol);
}

inline ResidualReport face_ybe_scan(const Heights& a, cplx u, cplx v, const AlgebraSpec& s, const ModulusParams& m,
                                    double tol) {
  int n = 0;
  const double res = face_ybe_scan_with(wbar_fn(s, m), a, u, v, s, m, &n);
  auto rep = make_report("face-ybe", s, m, a, {u, v}, res, tol);
  rep.meta["configurations"] = std::to_string(n);
  return rep;
}

// sum_g W(a g/d c|u) W(a b/g c|-u) - delta_{bd}
inline cplx unitarity_defect(const WeightFn& W, const Heights& a, const Heights& b, const Heights& c,
                             const Heights& d, cplx u, const AlgebraSpec& s, const ModulusParams& m) {
  cplx sum = 0.0;
  for (const auto& g : successors(a, s, m))
    if (adjacent(g, c, s)) sum += W(a, g, d, c, u) * W(a, b, g, c, -u);
  return sum - (same_heights(b, d) ? 1.0 : 0.0);
}

inline double unitarity_scan_with(const WeightFn& W, const Heights& a, cplx u, const AlgebraSpec& s,
                                  const ModulusParams& m, int* count = nullptr) {
  double worst = 0.0;
  int n = 0;
  const auto succ = successors(a, s, m);
  for (const auto& b : succ)
    for (const auto& d : succ)
      for (const auto& c : successors(b, s, m))
        if (adjacent(d, c, s)) {
          worst = std::max(worst, std::abs(unitarity_defect(W, a, b, c, d, u, s, m)));
          ++n;
        }
  if (count) *count = n;
  return worst;
}

inline ResidualReport unitarity_residual(const Heights& a, const Heights& b, const Heights& c, const Heights& d,
                                         cplx u, const AlgebraSpec& s, const ModulusParams& m, double tol) {
  return make_report("unitarity", s, m, a, {u}, std::abs(unitarity_defect(wbar_fn(s, m), a, b, c, d, u, s, m)), tol);
}

inline ResidualReport unitarity_scan(const Heights& a, cplx u, const AlgebraSpec& s, const ModulusParams& m,
                                     double tol) {
  int n = 0;
  const double res = unitarity_scan_with(wbar_fn(s, m), a, u, s, m, &n);
  auto rep = make_report("unitarity", s, m, a, {u}, res, tol);
  rep.meta["configurations"] = std::to_string(n);
  return rep;
}

// sum_g G_a G_g / (G_b G_d) W(a b/d g|-u) W(c d/b g|2 eta + u) - delta_{ac}.
// The epsilon signs cancel in the G ratio.
inline cplx second_inversion_defect(const WeightFn& W, const Heights& a, const Heights& b, const Heights& c,
                                    const Heights& d, cplx u, const AlgebraSpec& s, const ModulusParams& m) {
  cplx sum = 0.0;
  const cplx ga = g_char_plain(a, s, m), gb = g_char_plain(b, s, m), gd = g_char_plain(d, s, m);
  for (const auto& g : successors(b, s, m))
    if (adjacent(d, g, s))
      sum += ga * g_char_plain(g, s, m) / (gb * gd) * W(a, b, d, g, -u) * W(c, d, b, g, 2.0 * s.eta + u);
  return sum - (same_heights(a, c) ? 1.0 : 0.0);
}

inline double second_inversion_scan_with(const WeightFn& W, const Heights& a, cplx u, const AlgebraSpec& s,
                                         const ModulusParams& m, int* count = nullptr) {
  double worst = 0.0;
  int n = 0;
  const auto succ = successors(a, s, m);
  for (const auto& b : succ)
    for (const auto& d : succ)
      for (const auto& c : predecessors(b, s, m))
        if (adjacent(c, d, s)) {
          worst = std::max(worst, std::abs(second_inversion_defect(W, a, b, c, d, u, s, m)));
          ++n;
        }
  if (count) *count = n;
  return worst;
}

inline ResidualReport second_inversion_residual(const Heights& a, const Heights& b, const Heights& c,
                                                const Heights& d, cplx u, const AlgebraSpec& s,
                                                const ModulusParams& m, const Kappa& k, double tol) {
  auto rep = make_report("inversion2", s, m, a, {u},
                         std::abs(second_inversion_defect(weight_fn(s, m, k), a, b, c, d, u, s, m)), tol);
  rep.meta["eta"] = std::to_string(s.eta);
  return rep;
}

inline ResidualReport second_inversion_scan(const Heights& a, cplx u, const AlgebraSpec& s, const ModulusParams& m,
                                            const Kappa& k, double tol) {
  int n = 0;
  const double res = second_inversion_scan_with(weight_fn(s, m, k), a, u, s, m, &n);
  auto rep = make_report("inversion2", s, m, a, {u}, res, tol);
  rep.meta["eta"] = std::to_string(s.eta);
  rep.meta["configurations"] = std::to_string(n);
  return rep;
}

inline void require_crossing(const AlgebraSpec& s) {
  if (s.family == Family::A && s.n > 1)
    throw Error(ErrorKind::unsupported, "crossing symmetry does not hold for A_n with n > 1");
}

struct CrossingDefect {
  double rel = 0.0;      // |lhs - rhs| / |lhs|
  double rel_sq = 0.0;   // same for the squared relation
};

// W(a b/c d|u) = sqrt(G_b G_c / (G_a G_d)) W(c a/d b|eta - u); the root is
// s_sign times the product of per-height principal roots.
inline CrossingDefect crossing_defect(const WeightFn& W, const Heights& a, const Heights& b, const Heights& c,
                                      const Heights& d, cplx u, const AlgebraSpec& s, const ModulusParams& m) {
  require_crossing(s);
  const cplx lhs = W(a, b, c, d, u);
  const cplx root = static_cast<double>(s.s_sign) * g_root(b, s, m) * g_root(c, s, m) / (g_root(a, s, m) * g_root(d, s, m));
  const cplx rhs = root * W(c, a, d, b, s.eta - u);
  const double scale = std::max(std::abs(lhs), 1e-300);
  return {std::abs(lhs - rhs) / scale, std::abs(lhs * lhs - rhs * rhs) / (scale * scale)};
}

inline CrossingDefect crossing_scan_with(const WeightFn& W, const Heights& a, cplx u, const AlgebraSpec& s,
                                         const ModulusParams& m, int* count = nullptr) {
  require_crossing(s);
  CrossingDefect worst;
  int n = 0;
  const auto succ = successors(a, s, m);
  for (const auto& c : succ)
    for (const auto& d : successors(c, s, m))
      for (const auto& b : succ)
        if (adjacent(b, d, s)) {
          const auto x = crossing_defect(W, a, b, c, d, u, s, m);
          worst.rel = std::max(worst.rel, x.rel);
          worst.rel_sq = std::max(worst.rel_sq, x.rel_sq);
          ++n;
        }
  if (count) *count = n;
  return worst;
}

inline ResidualReport crossing_residual(const Heights& a, const Heights& b, const Heights& c, const Heights& d, cplx u,
                                        const AlgebraSpec& s, const ModulusParams& m, const Kappa& k, double tol) {
  const auto x = crossing_defect(weight_fn(s, m, k), a, b, c, d, u, s, m);
  auto rep = make_report("crossing", s, m, a, {u}, x.rel, tol);
  rep.meta["squared_residual"] = std::to_string(x.rel_sq);
  return rep;
}

inline ResidualReport crossing_scan(const Heights& a, cplx u, const AlgebraSpec& s, const ModulusParams& m,
                                    const Kappa& k, double tol) {
  int n = 0;
  const auto x = crossing_scan_with(weight_fn(s, m, k), a, u, s, m, &n);
  auto rep = make_report("crossing", s, m, a, {u}, x.rel, tol);
  rep.meta["squared_residual"] = std::to_string(x.rel_sq);
  rep.meta["configurations"] = std::to_string(n);
  return rep;
}

// ---------------------------------------------------------------------------
// Part-II uniqueness. The unknowns are X = Wbar(a, a+mu, a+mu, a | w) and
// Y = Wbar(a+nu, a+mu+nu, a+mu+nu, a+nu | w), mu != +-nu. Two face-YBE
// configurations containing them are affine in (X, Y); solving the 2x2
// system reproduces the closed part-II formula.

struct Part2Result {
  cplx X, Y;                  // solved
  cplx X_formula, Y_formula;  // closed formula
  double residual = 0.0;      // max relative mismatch
  double condition = 0.0;     // |det| / (|row1| |row2|)
  std::vector<std::string> types;  // entry types entering the two equations
};

inline Part2Result part2_uniqueness(const Heights& a, int mu, int nu, double w, const AlgebraSpec& s,
                                    const ModulusParams& m, const WeightFn& base = nullptr) {
  if (!s.orthogonal_type()) throw Error(ErrorKind::unsupported, "part-II weights exist only for B, C, D");
  if (mu == nu || mu == -nu) throw Error(ErrorKind::domain, "part-II uniqueness needs mu != +-nu");
  const WeightFn W0 = base ? base : wbar_fn(s, m);
  const Heights an = shift(a, nu, s);
  const Heights am = shift(a, mu, s);
  const Heights amn = shift(am, nu, s);
  std::map<std::string, int> seen;
  bool foreign = false;

  const auto solve_eqs = [&](cplx X, cplx Y) {
    const WeightFn W = [&](const Heights& p, const Heights& b, const Heights& c, const Heights& d, cplx u) -> cplx {
      const FacePlaquette f = make_plaquette(p, b, c, d, s);
      seen[to_string(f.type)]++;
      if (f.type == EntryType::II2) {
        const bool at_w = std::abs(u - cplx(w)) < 1e-12 && f.beta == mu;
        if (at_w && same_heights(p, a)) return X;
        if (at_w && same_heights(p, an)) return Y;
        foreign = true;
      }
      return W0(p, b, c, d, u);
    };
    // the second split keeps w - u2 away from 0, where the equation is trivial
    const double v1 = 0.22, u2 = std::abs(w - 0.13) >= 0.1 ? 0.13 : 0.41;
    const auto e1 = face_ybe_sides(W, a, am, a, an, amn, an, w, v1, s, m);
    const auto e2 = face_ybe_sides(W, a, am, amn, an, amn, am, u2, w - u2, s, m);
    return std::pair<cplx, cplx>{e1.first - e1.second, e2.first - e2.second};
  };

  const auto f00 = solve_eqs(0.0, 0.0);
  const auto f10 = solve_eqs(1.0, 0.0);
  const auto f01 = solve_eqs(0.0, 1.0);
  if (foreign) throw Error(ErrorKind::construction, "part-II equations contain further unknown weights");
  Eigen::Matrix2cd M;
  M << f10.first - f00.first, f01.first - f00.first, f10.second - f00.second, f01.second - f00.second;
  Eigen::Vector2cd rhs(-f00.first, -f00.second);
  const double cond = std::abs(M.determinant()) / (M.row(0).norm() * M.row(1).norm());
  if (!(cond > 1e-10)) throw Error(ErrorKind::degenerate, "part-II equations are singular");
  const Eigen::Vector2cd sol = M.partialPivLu().solve(rhs);
  Part2Result r;
  r.X = sol(0);
  r.Y = sol(1);
  r.X_formula = W0(a, am, am, a, w);
  r.Y_formula = W0(an, amn, amn, an, w);
  r.residual = std::max(std::abs(r.X - r.X_formula) / std::abs(r.X_formula),
                        std::abs(r.Y - r.Y_formula) / std::abs(r.Y_formula));
  r.condition = cond;
  for (const auto& [k, v] : seen) r.types.push_back(k);
  return r;
}

// ---------------------------------------------------------------------------
// Gauge equivalence. With M = P R(z, lambda), the entry M_{ij}^{kl} at
// dynamical weight a corresponds to W(a, a+k, a+i, a+i+j | u), z = q^{2u}.

struct GaugeOptions {
  std::vector<double> us{0.31, 0.77, -0.45, 0.12, 1.3, -0.9};
  TwistorMethod method = TwistorMethod::hybrid;
  int K = kDefaultK;
  // optional hook applied to every M entry before the fit: (i, j, k, l, grid index, value)
  std::function<cplx(int, int, int, int, int, cplx)> perturb;
};

struct GaugeStage1Row {
  int i = 0, j = 0;
  double u = 0.0;
  cplx Q_R, Q_W;  // cross-ratios
  double residual = 0.0;
};

struct GaugeStage1 {
  std::vector<GaugeStage1Row> rows;
  double cross_ratio = 0.0;          // max |Q_R / Q_W - 1|
  double diag_double_ratio = 0.0;    // R-diagonal entries, double ratio across u1, u2
  double equal_second_ratio = 0.0;   // b=c entries, second ratio over equally spaced u
  double equal_double_ratio = 0.0;   // b=c entries, double ratio after the factor q^{4 a_ij (u1-u2)/r}
};

struct GaugeStage2 {
  int equations = 0, unknowns = 0, rank = 0;
  double log_residual = 0.0;
  double max_residual = 0.0;
  double vertex_coeff = 0.0;
  bool signs_consistent = false;
};

struct GaugeReport {
  GaugeStage1 stage1;
  GaugeStage2 stage2;
};

// Solve A x = b over GF(2); rows are bitsets over nvar variables.
inline std::optional<std::vector<int>> gf2_solve(std::vector<std::vector<uint64_t>> rows, std::vector<int> rhs,
                                                 int nvar) {
  const int words = (nvar + 63) / 64;
  const auto bit = [](const std::vector<uint64_t>& r, int c) { return (r[c / 64] >> (c % 64)) & 1u; };
  int row = 0;
  std::vector<int> pivcol;
  for (int col = 0; col < nvar && row < static_cast<int>(rows.size()); ++col) {
    int sel = -1;
    for (int r = row; r < static_cast<int>(rows.size()); ++r)
      if (bit(rows[r], col)) {
        sel = r;
        break;
      }
    if (sel < 0) continue;
    std::swap(rows[sel], rows[row]);
    std::swap(rhs[sel], rhs[row]);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r)
      if (r != row && bit(rows[r], col)) {
        for (int w = 0; w < words; ++w) rows[r][w] ^= rows[row][w];
        rhs[r] ^= rhs[row];
      }
    pivcol.push_back(col);
    ++row;
  }
  for (int r = row; r < static_cast<int>(rows.size()); ++r)
    if (rhs[r]) return std::nullopt;
  std::vector<int> x(nvar, 0);
  for (int r = 0; r < row; ++r) x[pivcol[r]] = rhs[r];
  return x;
}

// psi(h) = sum of a_nu^2 over nonzero nu; enters the u-dependent vertex gauge
inline double gauge_psi(const Heights& h, const AlgebraSpec& s) {
  double v = 0.0;
  for (int nu : s.J)
    if (nu != 0) v += av(h, nu, s) * av(h, nu, s);
  return v;
}

inline GaugeReport gauge_equivalence(const Heights& a, const AlgebraSpec& s, const ModulusParams& m, const Kappa& kap,
                                     const GaugeOptions& opt = {}) {
  const int N = s.N;
  const double lq = std::log(s.q);
  if (opt.us.size() < 2) throw Error(ErrorKind::domain, "gauge test needs at least two grid points");
  const auto M_at = [&](double u, int gi) {
    const BlockMatrix R = dynR(std::exp(2.0 * u * lq), a, s, m, opt.method, opt.K);
    BlockMatrix M{s, flip(N) * R.m, R.z};
    if (opt.perturb)
      for (int i : s.J)
        for (int j : s.J)
          for (int k : s.J)
            for (int l : s.J) {
              cplx& v = M.m(M.pair(i, j), M.pair(k, l));
              v = opt.perturb(i, j, k, l, gi, v);
            }
    return M;
  };
  const auto Mv = [&](const BlockMatrix& M, int i, int j, int k, int l) { return M.m(M.pair(i, j), M.pair(k, l)); };
  const auto Wv = [&](int i, int j, int k, int /*l*/, double u) {
    const Heights c = shift(a, i, s);
    return wbar(a, shift(a, k, s), c, shift(c, j, s), u, s, m);
  };

  std::vector<BlockMatrix> Ms;
  for (size_t g = 0; g < opt.us.size(); ++g) Ms.push_back(M_at(opt.us[g], static_cast<int>(g)));
  const double u1 = opt.us[0], u2 = opt.us[1], u3 = 2.0 * u2 - u1;
  const BlockMatrix M3 = M_at(u3, -1);

  GaugeReport rep;
  // stage 1
  for (int i : s.J)
    for (int j : s.J) {
      if (!precedes(i, j, s) || i == -j) continue;
      for (size_t g = 0; g < opt.us.size(); ++g) {
        const double u = opt.us[g];
        const auto& M = Ms[g];
        const cplx QR = Mv(M, i, j, j, i) * Mv(M, j, i, i, j) / (Mv(M, i, j, i, j) * Mv(M, j, i, j, i));
        const cplx QW = Wv(i, j, j, i, u) * Wv(j, i, i, j, u) / (Wv(i, j, i, j, u) * Wv(j, i, j, i, u));
        const double res = std::abs(QR / QW - 1.0);
        rep.stage1.rows.push_back({i, j, u, QR, QW, res});
        rep.stage1.cross_ratio = std::max(rep.stage1.cross_ratio, res);
      }
      // R-diagonal entries E_ii (x) E_jj and E_jj (x) E_ii sit at M_{ji}^{ij} and M_{ij}^{ji}
      const auto rdiag_M = [&](const BlockMatrix& M) { return Mv(M, j, i, i, j) / Mv(M, i, j, j, i); };
      const auto rdiag_W = [&](double u) { return Wv(j, i, i, j, u) / Wv(i, j, j, i, u); };
      const cplx drM = rdiag_M(Ms[0]) / rdiag_M(Ms[1]);
      const cplx drW = rdiag_W(u1) / rdiag_W(u2);
      rep.stage1.diag_double_ratio = std::max(rep.stage1.diag_double_ratio, std::abs(drM / drW - 1.0));
      // b = c entries M_{ij}^{ij} and M_{ji}^{ji}
      const auto bc_M = [&](const BlockMatrix& M) { return Mv(M, i, j, i, j) / Mv(M, j, i, j, i); };
      const auto bc_W = [&](double u) { return Wv(i, j, i, j, u) / Wv(j, i, j, i, u); };
      const cplx sM = bc_M(Ms[0]) * bc_M(M3) / (bc_M(Ms[1]) * bc_M(Ms[1]));
      const cplx sW = bc_W(u1) * bc_W(u3) / (bc_W(u2) * bc_W(u2));
      rep.stage1.equal_second_ratio = std::max(rep.stage1.equal_second_ratio, std::abs(sM / sW - 1.0));
      const double x = av(a, i, s) - av(a, j, s);
      const double factor = std::exp(4.0 * x * (u1 - u2) * lq / m.r);
      const cplx dM = bc_M(Ms[0]) / bc_M(Ms[1]);
      const cplx dW = bc_W(u1) / bc_W(u2);
      rep.stage1.equal_double_ratio = std::max(rep.stage1.equal_double_ratio, std::abs(dM / (dW * factor) - 1.0));
    }

  // stage 2: log|M/W| = log f(u) + F(a,b) + F(b,d) - F(a,c) - F(c,d) + c u (psi(a)+psi(d)-psi(b)-psi(c))
  struct Row {
    int g;
    int top, right, left, bottom;
    double dpsi, u;
    cplx Mval, Wval;
  };
  std::map<std::pair<std::vector<long long>, std::vector<long long>>, int> edges;
  const auto edge = [&](const Heights& x, const Heights& y) {
    const auto key = std::make_pair(height_key(x), height_key(y));
    const auto it = edges.find(key);
    if (it != edges.end()) return it->second;
    const int id = static_cast<int>(edges.size());
    edges[key] = id;
    return id;
  };
  std::vector<Row> rows;
  for (size_t g = 0; g < opt.us.size(); ++g) {
    const double u = opt.us[g];
    const cplx ku = kap(u);
    for (int i : s.J)
      for (int j : s.J)
        for (int k : s.J)
          for (int l : s.J) {
            const Heights b = shift(a, k, s), c = shift(a, i, s), d = shift(c, j, s);
            if (!same_heights(shift(b, l, s), d)) continue;
            const cplx Mval = Mv(Ms[g], i, j, k, l);
            const cplx Wval = ku * wbar(a, b, c, d, u, s, m);
            if (std::abs(Mval) < 1e-280 && std::abs(Wval) < 1e-280) continue;
            const double dpsi = gauge_psi(a, s) + gauge_psi(d, s) - gauge_psi(b, s) - gauge_psi(c, s);
            rows.push_back({static_cast<int>(g), edge(a, b), edge(b, d), edge(a, c), edge(c, d), dpsi, u, Mval, Wval});
          }
  }
  const int nf = static_cast<int>(opt.us.size());
  const int ne = static_cast<int>(edges.size());
  const int nv = nf + ne + 1;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), nv);
  Eigen::VectorXd y(static_cast<int>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    const auto& w = rows[r];
    X(r, w.g) += 1.0;
    X(r, nf + w.top) += 1.0;
    X(r, nf + w.right) += 1.0;
    X(r, nf + w.left) -= 1.0;
    X(r, nf + w.bottom) -= 1.0;
    X(r, nv - 1) = w.u * w.dpsi;
    y(r) = std::log(std::abs(w.Mval)) - std::log(std::abs(w.Wval));
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
  const Eigen::VectorXd sol = cod.solve(y);
  rep.stage2.equations = static_cast<int>(rows.size());
  rep.stage2.unknowns = nv;
  rep.stage2.rank = static_cast<int>(cod.rank());
  rep.stage2.log_residual = (X * sol - y).cwiseAbs().maxCoeff();
  rep.stage2.vertex_coeff = sol(nv - 1);

  // signs: parity of f and edge variables, all entries real for real u
  const int nsv = nf + ne;
  const int words = (nsv + 63) / 64;
  std::vector<std::vector<uint64_t>> srows;
  std::vector<int> srhs;
  for (const auto& w : rows) {
    std::vector<uint64_t> bits(words, 0);
    for (int v : {w.g, nf + w.top, nf + w.right, nf + w.left, nf + w.bottom}) bits[v / 64] ^= (uint64_t(1) << (v % 64));
    srows.push_back(bits);
    srhs.push_back((w.Mval / w.Wval).real() < 0.0 ? 1 : 0);
  }
  const auto sg = gf2_solve(srows, srhs, nsv);
  rep.stage2.signs_consistent = sg.has_value();
  if (!sg) {
    rep.stage2.max_residual = std::numeric_limits<double>::infinity();
    return rep;
  }
  double worst = 0.0;
  for (size_t r = 0; r < rows.size(); ++r) {
    const auto& w = rows[r];
    int par = 0;
    for (int v : {w.g, nf + w.top, nf + w.right, nf + w.left, nf + w.bottom}) par ^= (*sg)[v];
    const cplx pred = w.Wval * std::exp(X.row(r).dot(sol)) * (par ? -1.0 : 1.0);
    worst = std::max(worst, std::abs(pred - w.Mval) / std::abs(w.Mval));
  }
  rep.stage2.max_residual = worst;
  return rep;
}

}  // namespace ellface
