#pragma once

// Independent reference implementations used only by the tests. Theta
// functions come from the Jacobi triple product series, not from products.

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Theta_p(z) = sum_n (-1)^n p^{n(n-1)/2} z^n
inline cplx theta_series(cplx z, double p) {
  // terms in the log domain: p^e and z^n separately under- and overflow
  const double lp = std::log(p);
  const cplx lz = std::log(z);
  cplx s = 0.0;
  for (int n = -60; n <= 60; ++n) {
    const double e = 0.5 * n * (n - 1);
    const cplx term = std::exp(e * lp + double(n) * lz);
    s += (n % 2 ? -1.0 : 1.0) * term;
  }
  return s;
}

// [u] = q^{u^2/r - u} Theta_p(q^{2u}) up to the constant, which cancels in
// every ratio the tests use
inline cplx bracket_series(cplx u, double q, double r) {
  const double p = std::pow(q, 2.0 * r);
  const double lq = std::log(q);
  return std::exp((u * u / r - u) * lq) * theta_series(std::exp(2.0 * u * lq), p);
}

// finite q-Pochhammer
inline cplx poch_n(cplx a, double q, int n) {
  cplx v = 1.0;
  for (int k = 0; k < n; ++k) v *= 1.0 - a * std::pow(q, k);
  return v;
}

// 2phi1 by direct summation of a fixed number of terms
inline cplx phi21_sum(cplx A, cplx B, cplx C, double q, cplx z, int terms = 600) {
  cplx s = 0.0;
  for (int n = 0; n < terms; ++n) s += poch_n(A, q, n) * poch_n(B, q, n) / (poch_n(C, q, n) * poch_n(q, q, n)) * std::pow(z, n);
  return s;
}

inline cplx poch_inf(cplx a, double q) { return poch_n(a, q, 2000); }

// simple roots in the epsilon basis; index 0 is delta - theta (delta dropped)
struct RootData {
  std::vector<std::vector<double>> alpha;
};

inline RootData roots(char family, int n) {
  const int dim = family == 'A' ? n + 1 : n;
  const auto e = [dim](int i) {
    std::vector<double> v(dim, 0.0);
    v[i - 1] = 1.0;
    return v;
  };
  const auto add = [](std::vector<double> a, const std::vector<double>& b, double c) {
    for (size_t k = 0; k < a.size(); ++k) a[k] += c * b[k];
    return a;
  };
  RootData d;
  d.alpha.resize(n + 1);
  for (int i = 1; i < n; ++i) d.alpha[i] = add(e(i), e(i + 1), -1.0);
  std::vector<double> theta;
  switch (family) {
    case 'A':
      d.alpha[n] = add(e(n), e(n + 1), -1.0);
      theta = add(e(1), e(n + 1), -1.0);
      break;
    case 'B':
      d.alpha[n] = e(n);
      theta = add(e(1), e(2), 1.0);
      break;
    case 'C':
      d.alpha[n] = add(e(n), e(n), 1.0);
      theta = add(e(1), e(1), 1.0);
      break;
    default:
      d.alpha[n] = add(e(n - 1), e(n), 1.0);
      theta = add(e(1), e(2), 1.0);
      break;
  }
  d.alpha[0] = add(std::vector<double>(dim, 0.0), theta, -1.0);
  return d;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace oracle
