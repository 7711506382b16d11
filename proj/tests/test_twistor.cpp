#include <doctest.h>

#include <ellface/defaults.hpp>
#include <ellface/twistor.hpp>

#include "oracles.hpp"

using namespace ellface;

namespace {

struct Pt {
  AlgebraSpec s;
  Heights h;
};

Pt point(Family f, int n, const std::vector<double>& a) {
  const auto s = build_algebra(f, n, 0.4);
  return {s, heights(weight_from_a(a, s), s)};
}

std::vector<Pt> points() {
  return {point(Family::A, 1, {1.15, -1.15}), point(Family::A, 2, {4.31, -0.02, -4.29}),
          point(Family::B, 2, {5.0, 2.5}), point(Family::C, 2, {4.3, 2.2}), point(Family::D, 3, {5.9, 3.9, 1.95})};
}

const ModulusParams kM = ModulusParams::make(0.4, 14.0);

// max |F_product - F_closed| outside the N x N sector
double sector_gap(const BlockMatrix& a, const BlockMatrix& b) {
  double worst = 0.0;
  const auto& s = a.spec;
  for (int i : s.J)
    for (int j : s.J)
      for (int k : s.J)
        for (int l : s.J)
          if (!(k == -i && l == -j)) worst = std::max(worst, std::abs(a.coeff(i, j, k, l) - b.coeff(i, j, k, l)));
  return worst;
}

}  // namespace

TEST_SUITE("twistor") {
  TEST_CASE("closed forms at z = 0") {
    const auto s = build_algebra(Family::A, 1, 0.4);
    CHECK(std::abs(f_closed(0.0, s, kM) - 1.0) < 1e-15);
    const XBlock x = X_closed(0.0, 0.3, 0.4, kM.p);
    CHECK(std::abs(x.ji) < 1e-15);
  }

  TEST_CASE("A_1 twistor is triangular at z = 0") {
    const auto P = point(Family::A, 1, {1.15, -1.15});
    const BlockMatrix F0 = twistor(0.0, P.h, P.s, kM, TwistorMethod::product).F;
    CHECK(std::abs(F0.coeff(2, 1, 1, 2)) < 1e-15);
    CHECK(std::abs(F0.coeff(1, 2, 2, 1)) > 1e-6);
    // away from z = 0 the lower entry is switched on
    const BlockMatrix F = twistor(cplx(0.63, 0.21), P.h, P.s, kM, TwistorMethod::product).F;
    CHECK(std::abs(F.coeff(2, 1, 1, 2)) > 0.0);
  }

  TEST_CASE("product and closed twistors agree") {
    for (const auto& P : points()) {
      CAPTURE(P.s.name());
      for (cplx z : {cplx(0.0), cplx(0.63, 0.21), cplx(-0.4, 0.5), cplx(1.7, -0.3), cplx(0.05, 0.9)}) {
        const auto a = twistor(z, P.h, P.s, kM, TwistorMethod::product).F;
        const auto b = twistor(z, P.h, P.s, kM, TwistorMethod::hybrid).F;
        CHECK(sector_gap(a, b) < 1e-8);
      }
    }
  }

  TEST_CASE("difference equation by both methods") {
    for (const auto& P : points()) {
      CAPTURE(P.s.name());
      for (cplx z : {cplx(0.63, 0.21), cplx(-0.4, 0.5)}) {
        CHECK(twistor_diff_residual(z, P.h, 40, P.s, kM, TwistorMethod::product) < 1e-8);
        CHECK(twistor_diff_residual(z, P.h, 40, P.s, kM, TwistorMethod::hybrid) < 1e-9);
      }
    }
  }

  TEST_CASE("a wrong twistor fails the difference equation") {
    const auto P = point(Family::A, 1, {1.15, -1.15});
    const MatC I = MatC::Identity(4, 4);
    const double res = twistor_diff_residual_of(I, I, cplx(0.63, 0.21), P.h, P.s, kM);
    CHECK(res > 0.1);
  }

  TEST_CASE("product residual decreases with K") {
    const auto P = point(Family::A, 1, {1.15, -1.15});
    const auto m6 = ModulusParams::make(0.4, 3.0);
    const Heights h = heights(weight_from_a({0.7, -0.7}, P.s), P.s);
    const cplx z(0.63, 0.21);
    const auto F = [&](int K) { return twistor(z, h, P.s, m6, TwistorMethod::product, K).F.m; };
    const MatC ref = F(80);
    const double e10 = max_abs(F(10) - ref), e12 = max_abs(F(12) - ref);
    CHECK(e12 < 0.1 * e10);
    CHECK(e12 < 1e-13);
    // too short a product is refused rather than returned
    CHECK_THROWS_AS(F(4), Error);
  }

  TEST_CASE("closed dynamical R blocks match the assembled matrix") {
    for (const auto& P : points()) {
      CAPTURE(P.s.name());
      const cplx z(0.55, 0.1);
      const BlockMatrix R = dynR(z, P.h, P.s, kM, TwistorMethod::product);
      const ClosedBlocks cb = dynR_closed_blocks(z, P.h, P.s, kM);
      const cplx re = cb.rho_ell;
      CHECK(std::abs(R.coeff(1, 1, 1, 1) / re - 1.0) < 1e-10);
      for (const auto& b : cb.pairs) {
        const int i = b.i, j = b.j;
        CHECK(std::abs(R.coeff(i, i, j, j) / re / b.R_ii - 1.0) < 1e-9);
        CHECK(std::abs(R.coeff(j, j, i, i) / re / b.R_jj - 1.0) < 1e-9);
        CHECK(std::abs(R.coeff(i, j, j, i) / re / b.R_ij - 1.0) < 1e-9);
        CHECK(std::abs(R.coeff(j, i, i, j) / re / b.R_ji - 1.0) < 1e-9);
      }
    }
  }

  TEST_CASE("closed R_ij^ji against the series theta oracle") {
    const auto P = point(Family::A, 1, {1.15, -1.15});
    const cplx z(0.55, 0.1);
    const ClosedBlocks cb = dynR_closed_blocks(z, P.h, P.s, kM);
    const double w = w_pair(P.h, 1, 2, P.s), p = kM.p, q = 0.4;
    const auto th = [p](cplx x) { return oracle::theta_series(x, p); };
    const cplx ref = th(q * q) * th(w * z) / (th(w) * th(q * q * z));
    CHECK(std::abs(cb.pairs.at(0).R_ij / ref - 1.0) < 1e-12);
  }

  TEST_CASE("dynamical Yang-Baxter equation") {
    const std::vector<std::pair<cplx, cplx>> zs{{{0.63, 0.21}, {0.41, -0.17}}, {{1.3, -0.2}, {0.35, 0.4}},
                                                {{-0.5, 0.6}, {0.8, 0.1}}};
    for (const auto& P : points()) {
      CAPTURE(P.s.name());
      const double tol = small_rank(P.s) ? 1e-8 : 1e-7;
      for (const auto& [z1, z2] : zs) CHECK(dybe_residual(z1, z2, P.h, P.s, kM) < tol);
    }
  }

  TEST_CASE("the opposite shift sign breaks the dynamical YBE") {
    const auto P = point(Family::A, 1, {1.15, -1.15});
    const auto neg = [&](cplx z, const Heights& a) {
      Heights b = a;
      for (size_t k = 0; k < b.a.size(); ++k) b.a[k] = 2.0 * P.h.a[k] - a.a[k];
      return dynR(z, b, P.s, kM).m;
    };
    CHECK(dybe_residual_with(neg, cplx(0.63, 0.21), cplx(0.41, -0.17), P.h, P.s) > 1e-5);
  }

  TEST_CASE("shifted cocycle condition") {
    for (const auto& P : {points()[0], points()[2]}) {
      CAPTURE(P.s.name());
      for (cplx z : {cplx(0.63, 0.21), cplx(-0.4, 0.5), cplx(1.2, 0.1)})
        CHECK(cocycle_residual(z, z * kZPartner, z * kZPartner * kZPartner, P.h, P.s, kM) < 1e-7);
    }
  }

  TEST_CASE("domain checks") {
    const auto s = build_algebra(Family::A, 1, 0.4);
    const Heights wide = heights(weight_from_a({9.0, -9.0}, s), s);
    CHECK_FALSE(twistor_domain_ok(wide, s, kM));
    CHECK_THROWS_AS(twistor_numeric(0.3, wide, 40, s, kM), Error);
    const Heights h = heights(weight_from_a({1.15, -1.15}, s), s);
    CHECK_THROWS_AS(twistor_numeric(0.3, h, 0, s, kM), Error);
  }

  TEST_CASE("negated lambda convention") {
    const auto s = build_algebra(Family::A, 2, 0.4);
    const DynamicalWeight w{{0.0, 1.2, 0.7}};
    const DynamicalWeight v = apply_lambda_sign(w, LambdaSign::negated);
    CHECK(v.s[1] == doctest::Approx(-3.2));
    CHECK(v.s[2] == doctest::Approx(-2.7));
    CHECK(v.s[0] == 0.0);
    (void)s;
  }
}
