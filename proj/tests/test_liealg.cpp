#include <doctest.h>

#include <ellface/faceweights.hpp>
#include <ellface/vectorrep.hpp>

#include "oracles.hpp"

using namespace ellface;

namespace {

struct Case {
  Family f;
  int n;
  char c;
};

const std::vector<Case> kCases{{Family::A, 1, 'A'}, {Family::A, 2, 'A'}, {Family::A, 3, 'A'}, {Family::B, 2, 'B'},
                               {Family::B, 3, 'B'}, {Family::C, 2, 'C'}, {Family::C, 3, 'C'}, {Family::D, 3, 'D'},
                               {Family::D, 4, 'D'}};

MatR comm(const MatR& a, const MatR& b) { return a * b - b * a; }

}  // namespace

TEST_SUITE("liealg") {
  TEST_CASE("algebra data") {
    const auto b2 = build_algebra(Family::B, 2, 0.4);
    CHECK(b2.N == 5);
    CHECK(b2.J == std::vector<int>{1, 2, 0, -2, -1});
    CHECK(b2.hvee == 3);
    CHECK(b2.eta == doctest::Approx(-1.5));
    const auto c2 = build_algebra(Family::C, 2, 0.4);
    CHECK(c2.t == 2);
    CHECK(c2.eta == doctest::Approx(-3.0));
    CHECK(std::abs(c2.xi - std::pow(0.4, 6)) < 1e-15);
    const auto a2 = build_algebra(Family::A, 2, 0.4);
    CHECK(a2.J == std::vector<int>{1, 2, 3});
    CHECK(a2.eta == doctest::Approx(-1.5));
    CHECK_THROWS_AS(build_algebra(Family::D, 2, 0.4), Error);
    CHECK_THROWS_AS(build_algebra(Family::B, 1, 0.4), Error);
    CHECK_THROWS_AS(parse_family("E"), Error);
  }

  TEST_CASE("hat vectors and inner products") {
    const auto a2 = build_algebra(Family::A, 2, 0.4);
    CHECK(hat_inner(1, 1, a2) == doctest::Approx(2.0 / 3.0));
    CHECK(hat_inner(1, 2, a2) == doctest::Approx(-1.0 / 3.0));
    const auto b2 = build_algebra(Family::B, 2, 0.4);
    CHECK(hat_inner(0, 0, b2) == doctest::Approx(0.0));
    CHECK(hat_inner(1, -1, b2) == doctest::Approx(-1.0));
  }

  TEST_CASE("a-coordinates round trip through s-coordinates") {
    for (const auto& c : kCases) {
      const auto s = build_algebra(c.f, c.n, 0.4);
      std::vector<double> a;
      const int k = c.f == Family::A ? c.n + 1 : c.n;
      for (int j = 0; j < k; ++j) a.push_back(3.1 - 1.27 * j + 0.01 * j * j);
      if (c.f == Family::A) {
        double mean = 0.0;
        for (double x : a) mean += x / k;
        for (double& x : a) x -= mean;
      }
      const Heights h = heights(weight_from_a(a, s, 0.7), s);
      for (int j = 1; j <= k; ++j) CHECK(av(h, j, s) == doctest::Approx(a[j - 1]).epsilon(1e-13));
      if (c.f != Family::A)
        for (int j = 1; j <= k; ++j) CHECK(av(h, -j, s) == doctest::Approx(-a[j - 1]).epsilon(1e-13));
      if (c.f == Family::B) CHECK(av(h, 0, s) == doctest::Approx(-0.5));
    }
  }

  TEST_CASE("shifts move a_nu by inner products and keep a_0 of B") {
    const auto s = build_algebra(Family::B, 2, 0.4);
    const Heights h = heights(weight_from_a({7.3, 4.1}, s), s);
    const Heights g = shift(h, -2, s);
    CHECK(av(g, 2, s) == doctest::Approx(3.1));
    CHECK(av(g, -2, s) == doctest::Approx(-3.1));
    CHECK(av(g, 0, s) == doctest::Approx(-0.5));
    CHECK(same_heights(shift(h, 0, s), h));
    CHECK(shift(h, 0, s).steps == h.steps + 1);
    CHECK(same_heights(shift(g, -2, s, -1), h));
  }

  TEST_CASE("admissible step counts") {
    const auto m = ModulusParams::make(0.4, 14.0);
    const auto b2 = build_algebra(Family::B, 2, 0.4);
    CHECK(admissible_steps(heights(weight_from_a({7.3, 4.1}, b2), b2), b2, m).size() == 5);
    const auto a2 = build_algebra(Family::A, 2, 0.4);
    CHECK(admissible_steps(heights(weight_from_a({4.31, -0.02, -4.29}, a2), a2), a2, m).size() == 3);
    // a_1 - a_2 = 1 makes a+2-hat degenerate ([a_1 - a_2 - 1] = [0] in G)
    const auto a1 = build_algebra(Family::A, 1, 0.4);
    const Heights d = heights(weight_from_a({0.5, -0.5}, a1), a1);
    CHECK(admissible_steps(d, a1, m).size() == 1);
  }

  TEST_CASE("G ratio carries the epsilon sign for C") {
    const auto m = ModulusParams::make(0.4, 14.0);
    const auto c2 = build_algebra(Family::C, 2, 0.4);
    const Heights h = heights(weight_from_a({4.43, 2.17}, c2), c2);
    const cplx plain = g_char_plain(shift(h, 1, c2), c2, m) / g_char_plain(h, c2, m);
    CHECK(std::abs(g_ratio(h, 1, c2, m) + plain) < 1e-12 * std::abs(plain));
  }
}

TEST_SUITE("vectorrep") {
  TEST_CASE("quantum affine relations in the vector representation") {
    const double q = 0.4;
    for (const auto& c : kCases) {
      const auto s = build_algebra(c.f, c.n, q);
      const auto rep = vector_rep(s);
      const auto rd = oracle::roots(c.c, c.n);
      CAPTURE(s.name());
      for (int i = 0; i <= c.n; ++i) {
        const double qi = rep.qi[i];
        // q_i^2 = q^{(alpha_i|alpha_i)}
        CHECK(qi * qi == doctest::Approx(std::pow(q, oracle::dot(rd.alpha[i], rd.alpha[i]))));
        for (int j = 0; j <= c.n; ++j) {
          const MatR lhs = rep.e[i] * rep.f[j] - rep.f[j] * rep.e[i];
          MatR rhs = MatR::Zero(s.N, s.N);
          if (i == j) rhs = (rep.t[i] - MatR(rep.t[i].inverse())) / (qi - 1.0 / qi);
          CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
          const MatR conj = rep.t[i] * rep.e[j] * rep.t[i].inverse();
          const double fac = std::pow(q, oracle::dot(rd.alpha[i], rd.alpha[j]));
          CHECK((conj - fac * rep.e[j]).cwiseAbs().maxCoeff() < 1e-12);
        }
      }
    }
  }

  TEST_CASE("Cartan elements and their duals") {
    for (const auto& c : kCases) {
      const auto s = build_algebra(c.f, c.n, 0.4);
      const auto rep = vector_rep(s);
      CAPTURE(s.name());
      for (int i = 1; i <= c.n; ++i) {
        // t_i = q_i^{hbar_i}
        MatR t = MatR::Zero(s.N, s.N);
        for (int k = 0; k < s.N; ++k) t(k, k) = std::pow(rep.qi[i], rep.hbar[i - 1](k, k));
        CHECK((t - rep.t[i]).cwiseAbs().maxCoeff() < 1e-12);
        // [hbar^j, e_i] = delta_ij e_i
        for (int j = 1; j <= c.n; ++j) {
          const MatR lhs = comm(rep.hbar_dual[j - 1], rep.e[i]);
          CHECK((lhs - (i == j ? 1.0 : 0.0) * rep.e[i]).cwiseAbs().maxCoeff() < 1e-12);
        }
      }
    }
  }
}
