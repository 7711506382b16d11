#pragma once

// q-Pochhammer symbols, theta functions, the bracket [u], double products,
// q-Gamma and the basic hypergeometric series 2phi1.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ellface {

using cplx = std::complex<double>;

enum class ErrorKind { domain, pole, divergence, degenerate, unsupported, construction, convergence };

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::pole: return "pole";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::construction: return "construction";
    case ErrorKind::convergence: return "convergence";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Factors below this magnitude no longer change a double-precision product.
inline constexpr double kTail = 1e-18;
inline constexpr long kInf = -1;

struct ModulusParams {
  double q = 0.4;
  double r = 6.0;
  double p = 0.0;
  int series_cutoff = 4000;
  int product_cutoff = 0;
  double tol = 1e-10;
  cplx scale;  // q^{r/4} e^{i pi/4} (-2 pi i / log p)^{-1/2}

  static ModulusParams make(double q, double r, double tol = 1e-10, int series_cutoff = 4000) {
    if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::domain, "q must lie in (0,1)");
    if (!(r > 0.0)) throw Error(ErrorKind::domain, "r must be positive");
    if (!(tol > 0.0)) throw Error(ErrorKind::domain, "tol must be positive");
    ModulusParams m;
    m.q = q;
    m.r = r;
    m.tol = tol;
    m.series_cutoff = series_cutoff;
    m.p = std::exp(2.0 * r * std::log(q));
    if (!(m.p > 0.0 && m.p < 1.0)) throw Error(ErrorKind::domain, "p = q^{2r} must lie in (0,1)");
    // smallest cutoff with p^cutoff < tol * 1e-3
    m.product_cutoff = static_cast<int>(std::ceil(std::log(tol * 1e-3) / std::log(m.p))) + 1;
    const double pi = std::numbers::pi;
    const cplx i(0.0, 1.0);
    const cplx base = -2.0 * pi * i / std::log(m.p);
    m.scale = std::exp(0.25 * r * std::log(q)) * std::exp(i * (pi / 4.0)) * std::pow(base, -0.5);
    return m;
  }

  void validate() const {
    if (!(q > 0.0 && q < 1.0 && r > 0.0 && p > 0.0 && p < 1.0))
      throw Error(ErrorKind::domain, "invalid modulus parameters");
    if (std::pow(p, product_cutoff) >= tol * 1e-3)
      throw Error(ErrorKind::domain, "product cutoff too small for tolerance");
  }
};

// real power x^y for x > 0 via the principal logarithm
inline cplx rpow(double x, cplx y) { return std::exp(y * std::log(x)); }

// (x;q)_n for finite n, or the infinite product when n == kInf.
// The infinite product stops once |x q^k| / (1-q) drops below kTail.
inline cplx qpoch(cplx x, double q, long n = kInf, long max_factors = 200000) {
  if (n >= 0) {
    cplx v = 1.0;
    cplx t = x;
    for (long k = 0; k < n; ++k) {
      v *= 1.0 - t;
      t *= q;
    }
    return v;
  }
  if (std::abs(q) >= 1.0) throw Error(ErrorKind::domain, "infinite q-Pochhammer needs |q| < 1");
  cplx v = 1.0;
  cplx t = x;
  const double gain = 1.0 / (1.0 - std::abs(q));
  for (long k = 0; k < max_factors; ++k) {
    if (std::abs(t) * gain < kTail) return v;
    v *= 1.0 - t;
    t *= q;
  }
  throw Error(ErrorKind::convergence, "q-Pochhammer product did not converge");
}

// Theta_p(z) = (z;p)(p/z;p)(p;p)
inline cplx theta_p(cplx z, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::domain, "theta_p needs 0 < p < 1");
  if (z == cplx(0.0)) throw Error(ErrorKind::domain, "theta_p undefined at z = 0");
  return qpoch(z, p) * qpoch(p / z, p) * qpoch(cplx(p), p);
}

// [u] = scale * q^{u^2/r - u} * Theta_p(q^{2u})
inline cplx bracket(cplx u, const ModulusParams& m) {
  const double lq = std::log(m.q);
  return m.scale * std::exp((u * u / m.r - u) * lq) * theta_p(std::exp(2.0 * u * lq), m.p);
}

// {z} = prod_{n,m >= 0} (1 - z xi^{2n} p^m)
inline cplx dbl_prod(cplx z, double p, double xi) {
  if (!(p > 0.0 && p < 1.0 && xi > 0.0 && xi < 1.0))
    throw Error(ErrorKind::domain, "dbl_prod needs 0 < p, xi < 1");
  const double x2 = xi * xi;
  cplx v = 1.0;
  cplx zm = z;
  while (std::abs(zm) > kTail) {
    cplx t = zm;
    while (std::abs(t) > kTail) {
      v *= 1.0 - t;
      t *= x2;
    }
    zm *= p;
  }
  return v;
}

inline bool near_nonpositive_integer(cplx z, double eps = 1e-12) {
  const double k = std::round(z.real());
  return k <= 0.0 && std::abs(z.real() - k) < eps && std::abs(z.imag()) < eps;
}

// Gamma_q(z) = (q;q)/(q^z;q) (1-q)^{1-z}
inline cplx qgamma(cplx z, double q) {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::domain, "qgamma needs 0 < q < 1");
  if (near_nonpositive_integer(z)) throw Error(ErrorKind::pole, "qgamma pole at nonpositive integer");
  return qpoch(cplx(q), q) / qpoch(rpow(q, z), q) * rpow(1.0 - q, 1.0 - z);
}

// 2phi1(A, B; C; q, z) with the parameters passed as the values q^a, q^b, q^c.
// Summed by the running-term recursion; stops when the geometric tail bound
// |t| |z| / (1 - |z|) falls below machine precision relative to the sum.
inline cplx phi21(cplx A, cplx B, cplx C, double q, cplx z, int cutoff = 4000) {
  if (std::abs(z) >= 1.0) throw Error(ErrorKind::divergence, "2phi1 series needs |z| < 1");
  cplx s = 0.0;
  cplx t = 1.0;
  cplx qk = 1.0;
  const double tailgain = 1.0 / (1.0 - std::abs(z));
  for (int k = 0; k < cutoff; ++k) {
    s += t;
    const cplx den = (1.0 - C * qk) * (1.0 - qk * q);
    if (std::abs(1.0 - C * qk) < 1e-14) throw Error(ErrorKind::pole, "2phi1 denominator (C;q)_n vanishes");
    t *= (1.0 - A * qk) * (1.0 - B * qk) / den * z;
    qk *= q;
    if (std::abs(t) * tailgain <= 1e-17 * std::abs(s)) return s + t;
    if (t == cplx(0.0)) return s;
  }
  throw Error(ErrorKind::convergence, "2phi1 series did not converge within cutoff");
}

// Relative residual of the 2phi1 connection formula between z -> 1/z and
// q^{c-a-b+1} z, with exponents a, b, c (so the series parameters are q^a etc).
inline double connection_residual(cplx a, cplx b, cplx c, double q, cplx z) {
  if (std::abs(1.0 / z) >= 1.0) throw Error(ErrorKind::divergence, "connection formula needs |1/z| < 1");
  const cplx zr = rpow(q, c - a - b + 1.0) * z;
  if (std::abs(zr) >= 1.0) throw Error(ErrorKind::divergence, "connection formula needs |q^{c-a-b+1} z| < 1");
  const auto Q = [q](cplx e) { return rpow(q, e); };
  const cplx lhs = phi21(Q(a), Q(b), Q(c), q, 1.0 / z);
  const cplx thz = theta_p(q * z, q);
  const cplx t1 = qgamma(c, q) * qgamma(b - a, q) * theta_p(Q(1.0 - a) * z, q) /
                  (qgamma(b, q) * qgamma(c - a, q) * thz) *
                  phi21(Q(a), Q(a - c + 1.0), Q(a - b + 1.0), q, zr);
  const cplx t2 = qgamma(c, q) * qgamma(a - b, q) * theta_p(Q(1.0 - b) * z, q) /
                  (qgamma(a, q) * qgamma(c - b, q) * thz) *
                  phi21(Q(b), Q(b - c + 1.0), Q(b - a + 1.0), q, zr);
  const cplx rhs = t1 + t2;
  return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
}

}  // namespace ellface
