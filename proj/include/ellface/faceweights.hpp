#pragma once

// Elliptic face weights W(a b / c d | u) = kappa(u) Wbar(a b / c d | u) of the
// vector-representation face models, their corner-pattern dispatch, and the
// normalization kappa(u) built from elliptic gamma functions.

#include <cmath>
#include <optional>
#include <vector>

#include "liealg.hpp"

namespace ellface {

// Corner layout: a top-left, b top-right, c bottom-left, d bottom-right.
// Steps: beta = a->b, delta = b->d, gamma = a->c, epsl = c->d.
enum class EntryType { I1, I2, I3, II1, II2 };

inline const char* to_string(EntryType t) {
  switch (t) {
    case EntryType::I1: return "I1";
    case EntryType::I2: return "I2";
    case EntryType::I3: return "I3";
    case EntryType::II1: return "II1";
    case EntryType::II2: return "II2";
  }
  return "?";
}

inline std::optional<int> step_between(const Heights& x, const Heights& y, const AlgebraSpec& s) {
  for (int mu : s.J)
    if (same_heights(shift(x, mu, s), y)) return mu;
  return std::nullopt;
}

inline EntryType classify(int beta, int delta, int gamma, int epsl, const AlgebraSpec& s) {
  const bool ortho = s.orthogonal_type();
  if (beta == gamma) {
    if (delta != epsl) throw Error(ErrorKind::domain, "unknown corner pattern");
    if (delta == beta && beta != 0) return EntryType::I1;
    if (ortho && delta == -beta) return EntryType::II2;
    return EntryType::I2;
  }
  if (delta == gamma && epsl == beta && !(ortho && gamma == -beta)) return EntryType::I3;
  if (ortho && delta == -beta && epsl == -gamma) return EntryType::II1;
  throw Error(ErrorKind::domain, "unknown corner pattern");
}

struct FacePlaquette {
  Heights a, b, c, d;
  int beta = 0, delta = 0, gamma = 0, epsl = 0;
  EntryType type = EntryType::I1;
};

inline FacePlaquette make_plaquette(const Heights& a, const Heights& b, const Heights& c, const Heights& d,
                                    const AlgebraSpec& s) {
  const auto be = step_between(a, b, s), ga = step_between(a, c, s);
  const auto de = step_between(b, d, s), ep = step_between(c, d, s);
  if (!be || !ga || !de || !ep) throw Error(ErrorKind::domain, "inadmissible plaquette");
  FacePlaquette f{a, b, c, d, *be, *de, *ga, *ep, EntryType::I1};
  f.type = classify(f.beta, f.delta, f.gamma, f.epsl, s);
  return f;
}

// plaquette from a and the steps beta (a->b), gamma (a->c), delta (b->d)
inline FacePlaquette plaquette_from_steps(const Heights& a, int beta, int gamma, int delta, const AlgebraSpec& s) {
  const Heights b = shift(a, beta, s);
  const Heights c = shift(a, gamma, s);
  return make_plaquette(a, b, c, shift(b, delta, s), s);
}

// sign of the I3 entry: sgn(mu) sgn(nu) for C, -1 for A_1, +1 otherwise
inline double i3_sign(int mu, int nu, const AlgebraSpec& s) {
  if (s.family == Family::C) return (mu > 0 ? 1.0 : -1.0) * (nu > 0 ? 1.0 : -1.0);
  if (s.family == Family::A && s.n == 1) return -1.0;
  return 1.0;
}

// Principal root of the epsilon-free G_a. Square roots of G-ratio products
// are taken as s_sign times products of these per-height roots.
inline cplx g_root(const Heights& h, const AlgebraSpec& s, const ModulusParams& m) {
  return std::sqrt(g_char_plain(h, s, m));
}

inline cplx wbar_steps(const Heights& a, int beta, int delta, int gamma, int epsl, cplx u, const AlgebraSpec& s,
                       const ModulusParams& m) {
  const auto B = [&](cplx x) { return bracket(x, m); };
  const auto A = [&](int mu) { return av(a, mu, s); };
  const auto den = [&](cplx x, const char* what) {
    const cplx v = B(x);
    if (std::abs(v) < kDegenerate * std::abs(B(1.0))) throw Error(ErrorKind::degenerate, std::string("zero bracket in ") + what);
    return v;
  };
  const double eta = s.eta;
  switch (classify(beta, delta, gamma, epsl, s)) {
    case EntryType::I1:
      return 1.0;
    case EntryType::I2: {
      const double x = A(beta) - A(delta);
      return B(1.0) * B(x - u) / (B(1.0 + u) * den(x, "I2"));
    }
    case EntryType::I3: {
      const int mu = gamma, nu = beta;
      const double x = A(mu) - A(nu);
      const cplx bx = den(x, "I3");
      return i3_sign(mu, nu, s) * B(u) * std::sqrt(B(x + 1.0) * B(x - 1.0) / (bx * bx)) / B(1.0 + u);
    }
    case EntryType::II1: {
      const int mu = gamma, nu = beta;
      const double x = A(mu) - a_neg(a, nu, s);
      const cplx sq = static_cast<double>(s.s_sign) * g_root(shift(a, mu, s), s, m) * g_root(shift(a, nu, s), s, m) /
                      (g_root(a, s, m) * g_root(a, s, m));
      return B(u) * B(1.0) * B(x + 1.0 + eta - u) / (den(eta - u, "II1") * B(1.0 + u) * den(x + 1.0, "II1")) * sq;
    }
    case EntryType::II2: {
      const int mu = beta;
      const double x = A(mu) - a_neg(a, mu, s);
      cplx sum = 0.0;
      for (int k : s.J) {
        if (k == mu) continue;
        const double y = A(mu) - a_neg(a, k, s);
        sum += B(y + 1.0 + 2.0 * eta) / den(y + 1.0, "II2 sum") * g_ratio(a, k, s, m);
      }
      const cplx d0 = den(eta - u, "II2") * B(1.0 + u) * den(x + 1.0 + 2.0 * eta, "II2");
      return B(eta + u) * B(1.0) * B(x + 1.0 + 2.0 * eta - u) / d0 - B(u) * B(1.0) * B(x + 1.0 + eta - u) / d0 * sum;
    }
  }
  return 0.0;
}

inline cplx wbar(const FacePlaquette& f, cplx u, const AlgebraSpec& s, const ModulusParams& m) {
  return wbar_steps(f.a, f.beta, f.delta, f.gamma, f.epsl, u, s, m);
}

inline cplx wbar(const Heights& a, const Heights& b, const Heights& c, const Heights& d, cplx u, const AlgebraSpec& s,
                 const ModulusParams& m) {
  return wbar(make_plaquette(a, b, c, d, s), u, s, m);
}

// A weight is generic when no bracket entering the weights vanishes.
inline bool is_generic(const Heights& h, const AlgebraSpec& s, const ModulusParams& m) {
  const double b1 = std::abs(bracket(1.0, m));
  const auto ok = [&](double x) { return std::abs(bracket(x, m)) >= kDegenerate * b1; };
  for (int mu : s.J)
    for (int nu : s.J) {
      if (mu == nu) continue;
      if (!ok(av(h, mu, s) - av(h, nu, s))) return false;
      if (s.orthogonal_type()) {
        const double y = av(h, mu, s) - a_neg(h, nu, s);
        if (!ok(y + 1.0)) return false;
      }
    }
  if (s.orthogonal_type())
    for (int mu : s.J)
      if (!ok(av(h, mu, s) - a_neg(h, mu, s) + 1.0 + 2.0 * s.eta)) return false;
  try {
    g_char_plain(h, s, m);
  } catch (const Error&) {
    return false;
  }
  return true;
}

inline std::vector<int> admissible_steps(const Heights& h, const AlgebraSpec& s, const ModulusParams& m) {
  std::vector<int> out;
  for (int mu : s.J)
    if (is_generic(shift(h, mu, s), s, m)) out.push_back(mu);
  return out;
}

inline std::vector<Heights> successors(const Heights& h, const AlgebraSpec& s, const ModulusParams& m) {
  std::vector<Heights> out;
  for (int mu : admissible_steps(h, s, m)) out.push_back(shift(h, mu, s));
  return out;
}

inline std::vector<Heights> predecessors(const Heights& h, const AlgebraSpec& s, const ModulusParams& m) {
  std::vector<Heights> out;
  for (int mu : s.J) {
    const Heights g = shift(h, mu, s, -1);
    if (is_generic(g, s, m)) out.push_back(g);
  }
  return out;
}

inline bool adjacent(const Heights& x, const Heights& y, const AlgebraSpec& s) {
  return step_between(x, y, s).has_value();
}

// Gamma(x; p, xi) = prod_{j,k >= 0} (1 - p^{j+1} xi^{k+1} / x) / (1 - p^j xi^k x).
// skip0 drops the j = k = 0 denominator factor (1 - x).
inline cplx elliptic_gamma(cplx x, double p, double xi, bool skip0 = false) {
  const double big = std::max({1.0, std::abs(x), 1.0 / std::abs(x)});
  cplx v = 1.0;
  for (double pj = 1.0; pj * big > kTail; pj *= p)
    for (double pk = pj; pk * big > kTail; pk *= xi) {
      v *= 1.0 - p * xi * pk / x;
      if (!(skip0 && pk == 1.0)) v /= 1.0 - pk * x;
    }
  return v;
}

// Kappa(u) solving kappa(u) kappa(-u) = 1 and the family relation
//   A:     kappa(eta-u) kappa(eta+u) = [1+eta+u][1+eta-u] / ([eta+u][eta-u])
//   B,C,D: kappa(u) kappa(eta+u)     = [-u][1+eta+u] / ([1-u][eta+u]).
// Built from Phi_c(w) = exp(cubic(w)) / Gamma(q^{2(w+c)}; p, q^{2T}), T = |2 eta|,
// which satisfies Phi_c(w) / Phi_c(w+T) = [w+c].
class Kappa {
 public:
  struct Residuals {
    double inversion = 0.0;  // max |kappa(u) kappa(-u) - 1|
    double family = 0.0;     // max |lhs - rhs| of the family relation
    double family_rel = 0.0; // same, relative to |rhs|
  };

  Kappa(const AlgebraSpec& s, const ModulusParams& m, double tol = 1e-9) : s_(s), m_(m), T_(std::abs(2.0 * s.eta)) {
    if (s.family == Family::A) {
      phi1_ = make_phi(1.0);
      phi0_ = make_phi(0.0);
    } else {
      phi1_ = make_phi(T_);
      phi0_ = make_phi(T_ + 1.0 + s.eta);
    }
    res_ = check(default_grid());
    if (!(res_.inversion < tol && res_.family < tol))
      throw Error(ErrorKind::construction, "kappa construction fails its functional equations");
  }

  static std::vector<double> default_grid() {
    std::vector<double> g;
    for (int i = 0; i < 20; ++i) g.push_back(-0.93 + 0.1 * i + 0.013);
    return g;
  }

  cplx operator()(cplx u) const {
    if (s_.family != Family::A) {
      const auto Q = [&](cplx w) { return 1.0 / (phi(phi1_, w) * phi(phi0_, w)); };
      return Q(u) * Q(s_.eta - u) / (Q(u + s_.eta) * Q(-u));
    }
    // Phi_0(-u)/Phi_0(u) with the common zero of the j=k=0 gamma factor
    // cancelled analytically; the overall sign makes kappa(0) = 1.
    const cplx x = std::exp(2.0 * u * std::log(s_.q));
    const double xq = std::pow(s_.q, 2.0 * T_);
    const cplx r0 = std::exp(cubic(phi0_, -u) - cubic(phi0_, u)) * (-1.0 / x) *
                    elliptic_gamma(x, m_.p, xq, true) / elliptic_gamma(1.0 / x, m_.p, xq, true);
    return -phi(phi1_, u) / phi(phi1_, -u) * r0;
  }

  Residuals check(const std::vector<double>& grid) const {
    Residuals r;
    const auto B = [&](cplx x) { return bracket(x, m_); };
    const double eta = s_.eta;
    for (double u : grid) {
      r.inversion = std::max(r.inversion, std::abs((*this)(u) * (*this)(-u) - 1.0));
      cplx lhs, rhs;
      if (s_.family == Family::A) {
        lhs = (*this)(eta - u) * (*this)(eta + u);
        rhs = B(1.0 + eta + u) * B(1.0 + eta - u) / (B(eta + u) * B(eta - u));
      } else {
        lhs = (*this)(u) * (*this)(eta + u);
        rhs = B(-u) * B(1.0 + eta + u) / (B(1.0 - u) * B(eta + u));
      }
      r.family = std::max(r.family, std::abs(lhs - rhs));
      r.family_rel = std::max(r.family_rel, std::abs(lhs - rhs) / std::abs(rhs));
    }
    return r;
  }

  const Residuals& residuals() const { return res_; }

 private:
  struct Phi {
    double c = 0.0;
    cplx d1, d2, d3;
  };

  Phi make_phi(double c) const {
    const double lq = std::log(s_.q), r = m_.r, T = T_;
    const cplx e2 = lq / r;
    const cplx e1 = lq * (2.0 * c / r - 1.0);
    const cplx e0 = std::log(m_.scale * qpoch(m_.p, m_.p)) + lq * (c * c / r - c);
    Phi f;
    f.c = c;
    f.d3 = -e2 / (3.0 * T);
    f.d2 = -(e1 + 3.0 * f.d3 * T * T) / (2.0 * T);
    f.d1 = -(e0 + f.d2 * T * T + f.d3 * T * T * T) / T;
    return f;
  }

  static cplx cubic(const Phi& f, cplx w) { return f.d1 * w + f.d2 * w * w + f.d3 * w * w * w; }

  cplx phi(const Phi& f, cplx w) const {
    return std::exp(cubic(f, w)) /
           elliptic_gamma(std::exp(2.0 * (w + f.c) * std::log(s_.q)), m_.p, std::pow(s_.q, 2.0 * T_));
  }

  AlgebraSpec s_;
  ModulusParams m_;
  double T_;
  Phi phi1_, phi0_;
  Residuals res_;
};

inline cplx weight(const FacePlaquette& f, cplx u, const AlgebraSpec& s, const ModulusParams& m, const Kappa& k) {
  return k(u) * wbar(f, u, s, m);
}

}  // namespace ellface
