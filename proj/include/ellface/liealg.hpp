#pragma once

// Index sets, the order on J, vector-representation weights, dynamical
// coordinates a_mu and the principally specialized characters G_a.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qspecial.hpp"

namespace ellface {

enum class Family { A, B, C, D };

inline char family_char(Family f) { return "ABCD"[static_cast<int>(f)]; }

inline Family parse_family(const std::string& s) {
  if (s == "A" || s == "a") return Family::A;
  if (s == "B" || s == "b") return Family::B;
  if (s == "C" || s == "c") return Family::C;
  if (s == "D" || s == "d") return Family::D;
  throw Error(ErrorKind::domain, "unknown family '" + s + "'");
}

struct AlgebraSpec {
  Family family = Family::A;
  int n = 1;
  int N = 2;
  std::vector<int> J;  // in the order 1 < 2 < ... < n (< 0) < -n < ... < -1
  int hvee = 2;
  int t = 1;
  int s_sign = 1;
  double q = 0.4;
  double xi = 0.0;
  double eta = 0.0;

  bool contains(int j) const { return std::find(J.begin(), J.end(), j) != J.end(); }

  int index(int j) const {
    // position of j in J; J is laid out so this is arithmetic
    if (family == Family::A) {
      if (j >= 1 && j <= n + 1) return j - 1;
    } else if (j >= 1 && j <= n) {
      return j - 1;
    } else if (j == 0 && family == Family::B) {
      return n;
    } else if (j <= -1 && j >= -n) {
      return N + j;
    }
    throw Error(ErrorKind::domain, "index " + std::to_string(j) + " not in J");
  }

  std::string name() const { return std::string(1, family_char(family)) + std::to_string(n); }
  bool orthogonal_type() const { return family != Family::A; }
};

inline AlgebraSpec build_algebra(Family f, int n, double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::domain, "q must lie in (0,1)");
  AlgebraSpec s;
  s.family = f;
  s.n = n;
  s.q = q;
  switch (f) {
    case Family::A:
      if (n < 1) throw Error(ErrorKind::domain, "rank must be >= 1 for A");
      s.N = n + 1;
      s.hvee = n + 1;
      for (int j = 1; j <= n + 1; ++j) s.J.push_back(j);
      break;
    case Family::B:
      if (n < 2) throw Error(ErrorKind::domain, "rank must be >= 2 for B");
      s.N = 2 * n + 1;
      s.hvee = 2 * n - 1;
      break;
    case Family::C:
      if (n < 2) throw Error(ErrorKind::domain, "rank must be >= 2 for C");
      s.N = 2 * n;
      s.hvee = n + 1;
      s.t = 2;
      s.s_sign = -1;
      break;
    case Family::D:
      if (n < 3) throw Error(ErrorKind::domain, "rank must be >= 3 for D");
      s.N = 2 * n;
      s.hvee = 2 * n - 2;
      break;
  }
  if (f != Family::A) {
    for (int j = 1; j <= n; ++j) s.J.push_back(j);
    if (f == Family::B) s.J.push_back(0);
    for (int j = n; j >= 1; --j) s.J.push_back(-j);
  }
  s.xi = std::pow(q, s.t * s.hvee);
  s.eta = -0.5 * s.t * s.hvee;
  return s;
}

inline bool precedes(int i, int j, const AlgebraSpec& s) { return s.index(i) < s.index(j); }

// mu-hat in the epsilon basis. For A the n+1 coordinates carry the -epsilon offset.
inline std::vector<double> hat(int mu, const AlgebraSpec& s) {
  s.index(mu);
  if (s.family == Family::A) {
    std::vector<double> v(s.n + 1, -1.0 / (s.n + 1));
    v[mu - 1] += 1.0;
    return v;
  }
  std::vector<double> v(s.n, 0.0);
  if (mu > 0) v[mu - 1] = 1.0;
  if (mu < 0) v[-mu - 1] = -1.0;
  return v;
}

inline double hat_inner(int mu, int nu, const AlgebraSpec& s) {
  const auto a = hat(mu, s);
  const auto b = hat(nu, s);
  double v = 0.0;
  for (size_t k = 0; k < a.size(); ++k) v += a[k] * b[k];
  return v;
}

// a + rho = sum_i s_i Lambda_i; s[0] is the level coordinate.
struct DynamicalWeight {
  std::vector<double> s;
};

inline void check_weight(const DynamicalWeight& w, const AlgebraSpec& spec) {
  if (static_cast<int>(w.s.size()) != spec.n + 1)
    throw Error(ErrorKind::domain, "dynamical weight needs n+1 coordinates s_0..s_n");
}

inline double a_coord(const DynamicalWeight& w, int mu, const AlgebraSpec& spec) {
  check_weight(w, spec);
  spec.index(mu);
  const int n = spec.n;
  const auto& s = w.s;
  if (spec.family == Family::A) {
    double v = 0.0;
    for (int j = 1; j < mu; ++j) v -= j * s[j];
    for (int j = mu; j <= n; ++j) v += (n + 1 - j) * s[j];
    return v / (n + 1);
  }
  if (mu == 0) return -0.5;
  const int i = std::abs(mu);
  double v = 0.0;
  switch (spec.family) {
    case Family::B:
      for (int j = i; j <= n - 1; ++j) v += s[j];
      v += 0.5 * s[n];
      break;
    case Family::C:
      for (int j = i; j <= n; ++j) v += s[j];
      break;
    case Family::D:
      for (int j = i; j <= n - 1; ++j) v += s[j];
      v += 0.5 * (s[n] - s[n - 1]);
      break;
    default:
      break;
  }
  return mu > 0 ? v : -v;
}

// Inverse of the closed forms: s-coordinates from a_1..a_n (B, C, D) or
// a_1..a_{n+1} with zero sum (A). The level coordinate s_0 is set to s0.
inline DynamicalWeight weight_from_a(const std::vector<double>& a, const AlgebraSpec& spec, double s0 = 0.0) {
  const int n = spec.n;
  DynamicalWeight w;
  w.s.assign(n + 1, 0.0);
  w.s[0] = s0;
  if (spec.family == Family::A) {
    if (static_cast<int>(a.size()) != n + 1) throw Error(ErrorKind::domain, "A needs n+1 values a_1..a_{n+1}");
    double sum = 0.0;
    for (double x : a) sum += x;
    if (std::abs(sum) > 1e-9) throw Error(ErrorKind::domain, "A coordinates must sum to zero");
    for (int j = 1; j <= n; ++j) w.s[j] = a[j - 1] - a[j];
    return w;
  }
  if (static_cast<int>(a.size()) != n) throw Error(ErrorKind::domain, "B/C/D need n values a_1..a_n");
  for (int j = 1; j <= n - 1; ++j) w.s[j] = a[j - 1] - a[j];
  switch (spec.family) {
    case Family::B: w.s[n] = 2.0 * a[n - 1]; break;
    case Family::C: w.s[n] = a[n - 1]; break;
    case Family::D:
      w.s[n - 1] = a[n - 2] - a[n - 1];
      w.s[n] = a[n - 2] + a[n - 1];
      break;
    default: break;
  }
  return w;
}

// Dynamical weight in a-coordinates, indexed by position in J. steps counts
// the lattice steps taken from the reference weight; it carries the sign
// epsilon(a) = s_sign^steps, which is path independent because every step
// changes the parity of sum_i a_i.
struct Heights {
  std::vector<double> a;
  int steps = 0;
};

inline Heights heights(const DynamicalWeight& w, const AlgebraSpec& spec) {
  Heights h;
  h.a.resize(spec.N);
  for (int mu : spec.J) h.a[spec.index(mu)] = a_coord(w, mu, spec);
  return h;
}

inline double av(const Heights& h, int mu, const AlgebraSpec& spec) { return h.a[spec.index(mu)]; }

// a_{-nu}, with a_{-0} = -a_0 = 1/2 so that a_{mu,-nu} = a_mu + a_nu for every nu
inline double a_neg(const Heights& h, int nu, const AlgebraSpec& spec) { return -av(h, nu, spec); }

// a -> a + sign * mu-hat. a_nu moves by (mu-hat|nu-hat); a_0 of B stays at -1/2.
inline Heights shift(const Heights& h, int mu, const AlgebraSpec& spec, int sign = 1) {
  Heights g = h;
  for (int nu : spec.J) {
    if (spec.family == Family::B && nu == 0) continue;
    g.a[spec.index(nu)] += sign * hat_inner(mu, nu, spec);
  }
  g.steps += sign;
  return g;
}

inline bool same_heights(const Heights& x, const Heights& y, double eps = 1e-9) {
  for (size_t k = 0; k < x.a.size(); ++k)
    if (std::abs(x.a[k] - y.a[k]) > eps) return false;
  return true;
}

// classical height key for maps; rounding makes shifted copies compare equal
inline std::vector<long long> height_key(const Heights& h) {
  std::vector<long long> k(h.a.size());
  for (size_t i = 0; i < h.a.size(); ++i) k[i] = std::llround(h.a[i] * 1e8);
  return k;
}

// Relative size below which a bracket is treated as a theta zero.
inline constexpr double kDegenerate = 1e-8;

inline cplx checked_bracket(double x, const ModulusParams& m, const char* what) {
  const cplx b = bracket(x, m);
  if (std::abs(b) < kDegenerate * std::abs(bracket(1.0, m)))
    throw Error(ErrorKind::degenerate, std::string("vanishing bracket in ") + what);
  return b;
}

// G_a without the sign epsilon(a)
inline cplx g_char_plain(const Heights& h, const AlgebraSpec& spec, const ModulusParams& m) {
  const int n = spec.n;
  const auto A = [&](int i) { return av(h, i, spec); };
  cplx g = 1.0;
  if (spec.family == Family::A) {
    for (int i = 1; i <= n + 1; ++i)
      for (int j = i + 1; j <= n + 1; ++j) g *= checked_bracket(A(i) - A(j), m, "G_a");
    return g;
  }
  for (int i = 1; i <= n; ++i) {
    if (spec.family == Family::B) g *= checked_bracket(A(i), m, "G_a");
    if (spec.family == Family::C) g *= checked_bracket(2.0 * A(i), m, "G_a");
  }
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      g *= checked_bracket(A(i) - A(j), m, "G_a") * checked_bracket(A(i) + A(j), m, "G_a");
  return g;
}

inline int epsilon_sign(const Heights& h, const AlgebraSpec& spec) {
  return (spec.s_sign < 0 && (h.steps % 2 != 0)) ? -1 : 1;
}

// G_a including epsilon(a)
inline cplx g_char(const Heights& h, const AlgebraSpec& spec, const ModulusParams& m) {
  return static_cast<double>(epsilon_sign(h, spec)) * g_char_plain(h, spec, m);
}

// G_{a mu} = G_{a + mu-hat} / G_a
inline cplx g_ratio(const Heights& h, int mu, const AlgebraSpec& spec, const ModulusParams& m) {
  return g_char(shift(h, mu, spec), spec, m) / g_char(h, spec, m);
}

}  // namespace ellface
