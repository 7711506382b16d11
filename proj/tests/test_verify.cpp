#include <doctest.h>

#include <ellface/defaults.hpp>
#include <ellface/verify.hpp>

using namespace ellface;

namespace {

const ModulusParams kM = ModulusParams::make(0.4, 14.0);

struct Pt {
  AlgebraSpec s;
  Heights h;
};

Pt face_point(Family f, int n) {
  const auto s = build_algebra(f, n, 0.4);
  return {s, heights(weight_from_a(default_points(s).face, s), s)};
}

std::vector<Pt> face_points() {
  return {face_point(Family::A, 1), face_point(Family::A, 2), face_point(Family::B, 2), face_point(Family::C, 2),
          face_point(Family::D, 3)};
}

// multiplies a single plaquette weight by (1 + eps)
WeightFn perturbed(const WeightFn& W, const Heights& a, const Heights& b, const Heights& c, const Heights& d,
                   double eps) {
  return [=](const Heights& x, const Heights& y, const Heights& z, const Heights& w, cplx u) {
    const cplx v = W(x, y, z, w, u);
    if (same_heights(x, a) && same_heights(y, b) && same_heights(z, c) && same_heights(w, d)) return v * (1.0 + eps);
    return v;
  };
}

}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("face YBE, unitarity over all configurations") {
    for (const auto& P : face_points()) {
      CAPTURE(P.s.name());
      const double tol = small_rank(P.s) ? 1e-9 : 1e-8;
      int n = 0;
      CHECK(face_ybe_scan_with(wbar_fn(P.s, kM), P.h, 0.31, 0.17, P.s, kM, &n) < tol);
      CHECK(n > 0);
      CHECK(unitarity_scan_with(wbar_fn(P.s, kM), P.h, -0.44, P.s, kM) < tol);
    }
  }

  TEST_CASE("face YBE degenerates at v = 0") {
    const auto P = face_point(Family::B, 2);
    CHECK(face_ybe_scan_with(wbar_fn(P.s, kM), P.h, 0.31, 0.0, P.s, kM) < 1e-12);
  }

  TEST_CASE("face YBE is symmetric under swapping the spectral arguments of the sides") {
    const auto P = face_point(Family::C, 2);
    const double a = face_ybe_scan_with(wbar_fn(P.s, kM), P.h, 0.31, 0.17, P.s, kM);
    const double b = face_ybe_scan_with(wbar_fn(P.s, kM), P.h, 0.17, 0.31, P.s, kM);
    CHECK(a < 1e-8);
    CHECK(b < 1e-8);
  }

  TEST_CASE("single-configuration reports") {
    const auto P = face_point(Family::A, 1);
    const auto& s = P.s;
    const Heights a = P.h, b = shift(a, 1, s), c = shift(b, 2, s), d = shift(c, 1, s);
    const Heights f = shift(a, 2, s), e = shift(f, 1, s);
    const auto rep = face_ybe_residual(a, b, c, d, e, f, 0.31, 0.17, s, kM, 1e-9);
    CHECK(rep.pass);
    CHECK(rep.identity == "face-ybe");
    CHECK(rep.algebra == "A1");
    const auto un = unitarity_residual(a, b, c, b, 0.3, s, kM, 1e-9);
    CHECK(un.pass);
    const auto un0 = unitarity_residual(a, b, c, b, 0.0, s, kM, 1e-14);
    CHECK(un0.residual < 1e-14);
  }

  TEST_CASE("second inversion and crossing with kappa") {
    for (const auto& P : face_points()) {
      CAPTURE(P.s.name());
      const Kappa k(P.s, kM);
      CHECK(second_inversion_scan_with(weight_fn(P.s, kM, k), P.h, 0.31, P.s, kM) < 1e-8);
      if (P.s.family == Family::A && P.s.n > 1) {
        CHECK_THROWS_AS(crossing_scan_with(weight_fn(P.s, kM, k), P.h, 0.31, P.s, kM), Error);
      } else {
        const auto x = crossing_scan_with(weight_fn(P.s, kM, k), P.h, 0.31, P.s, kM);
        CHECK(x.rel < 1e-8);
        CHECK(x.rel_sq < 3e-8);
      }
    }
  }

  TEST_CASE("second inversion report records eta") {
    const auto P = face_point(Family::A, 1);
    const Kappa k(P.s, kM);
    const auto rep = second_inversion_scan(P.h, 0.31, P.s, kM, k, 1e-8);
    CHECK(rep.pass);
    CHECK(rep.meta.at("eta") == std::to_string(P.s.eta));
  }

  TEST_CASE("part-II weights are fixed by part-I weights") {
    for (Family f : {Family::B, Family::C, Family::D}) {
      const auto P = face_point(f, f == Family::D ? 3 : 2);
      CAPTURE(P.s.name());
      for (double w : {0.37, -0.61, 1.13, 0.13}) {
        const auto r = part2_uniqueness(P.h, 1, 2, w, P.s, kM);
        CHECK(r.residual < 1e-8);
        CHECK(std::find(r.types.begin(), r.types.end(), "II2") != r.types.end());
      }
    }
    const auto A = face_point(Family::A, 2);
    CHECK_THROWS_AS(part2_uniqueness(A.h, 1, 2, 0.3, A.s, kM), Error);
  }

  TEST_CASE("part-II uniqueness detects a wrong part-I weight") {
    const auto P = face_point(Family::B, 2);
    const auto& s = P.s;
    const Heights a = P.h, b = shift(a, 1, s), c = shift(b, 2, s);
    const auto W = perturbed(wbar_fn(s, kM), a, b, b, c, 1e-3);
    // the equations then yield weights away from the closed formula
    const auto base = part2_uniqueness(P.h, 1, 2, 0.37, s, kM, W);
    const auto good = part2_uniqueness(P.h, 1, 2, 0.37, s, kM);
    CHECK(std::abs(base.X - good.X) > 1e-5 * std::abs(good.X));
  }

  TEST_CASE("gauge equivalence of the dynamical R matrix and the face weights") {
    for (auto [f, n] : {std::pair{Family::A, 1}, {Family::A, 2}, {Family::B, 2}, {Family::C, 2}, {Family::D, 3}}) {
      const auto s = build_algebra(f, n, 0.4);
      CAPTURE(s.name());
      const Heights h = heights(weight_from_a(default_points(s).gauge, s), s);
      const Kappa k(s, kM);
      const auto g = gauge_equivalence(h, s, kM, k);
      CHECK(g.stage1.cross_ratio < 1e-8);
      CHECK(g.stage1.diag_double_ratio < 1e-8);
      CHECK(g.stage1.equal_second_ratio < 1e-8);
      CHECK(g.stage1.equal_double_ratio < 1e-8);
      CHECK(g.stage2.signs_consistent);
      CHECK(g.stage2.max_residual < 1e-7);
      const double expect = -std::log(0.4) / (f == Family::A ? 1.0 : 2.0) / 14.0;
      CHECK(g.stage2.vertex_coeff == doctest::Approx(expect).epsilon(1e-8));
    }
  }

  TEST_CASE("gauge fit rejects a perturbed R entry") {
    const auto s = build_algebra(Family::B, 2, 0.4);
    const Heights h = heights(weight_from_a(default_points(s).gauge, s), s);
    const Kappa k(s, kM);
    GaugeOptions opt;
    opt.perturb = [](int i, int j, int kk, int l, int g, cplx v) {
      return (i == 1 && j == -1 && kk == 1 && l == -1 && g == 2) ? v * (1.0 + 1e-3) : v;
    };
    const auto g = gauge_equivalence(h, s, kM, k, opt);
    CHECK(g.stage2.max_residual > 1e-5);
  }

  TEST_CASE("GF(2) solver") {
    // x0 + x1 = 1, x1 + x2 = 0, x0 + x2 = 1 is consistent; adding x0 = 1 and x0 = 0 is not
    std::vector<std::vector<uint64_t>> rows{{0b011}, {0b110}, {0b101}};
    const auto sol = gf2_solve(rows, {1, 0, 1}, 3);
    REQUIRE(sol.has_value());
    CHECK(((*sol)[0] ^ (*sol)[1]) == 1);
    CHECK(((*sol)[1] ^ (*sol)[2]) == 0);
    rows.push_back({0b001});
    rows.push_back({0b001});
    CHECK_FALSE(gf2_solve(rows, {1, 0, 1, 1, 0}, 3).has_value());
  }

  TEST_CASE("negative controls: a single perturbed weight breaks each identity") {
    for (const auto& P : face_points()) {
      CAPTURE(P.s.name());
      const auto& s = P.s;
      const Kappa k(s, kM);
      const Heights a = P.h;
      const auto st = admissible_steps(a, s, kM);
      const Heights b = shift(a, st[0], s), d = shift(b, st[1], s);
      // an I2 entry for the face identities
      const auto W = perturbed(wbar_fn(s, kM), a, b, b, d, 1e-3);
      CHECK(face_ybe_scan_with(W, a, 0.31, 0.17, s, kM) > 1e-5);
      CHECK(unitarity_scan_with(W, a, 0.31, s, kM) > 1e-5);
      const auto Wk = perturbed(weight_fn(s, kM, k), a, b, b, d, 1e-3);
      CHECK(second_inversion_scan_with(Wk, a, 0.31, s, kM) > 1e-5);
      if (!(s.family == Family::A && s.n > 1)) CHECK(crossing_scan_with(Wk, a, 0.31, s, kM).rel > 1e-5);
    }
  }
}
