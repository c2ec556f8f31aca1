#include <doctest.h>

#include <random>

#include "nare/error.hpp"
#include "nare/generators.hpp"
#include "nare/methods.hpp"
#include "nare/params.hpp"
#include "oracles.hpp"

using namespace nare;
using C = Complex;

namespace {

CMatrix scalar(C v) { return CMatrix::Constant(1, 1, v); }

NareProblem scalar_problem(C a, C b, C c, C d, double w) {
  NareProblem p;
  p.A = scalar(a);
  p.B = scalar(b);
  p.C = scalar(c);
  p.D = scalar(d);
  p.omega = w;
  return p;
}

/// Problem whose diagonal entries of Q all share one argument.
NareProblem common_phase(double w, double phase, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  NareProblem p;
  p.omega = w;
  p.A = oracle::random_cmatrix(3, 3, rng, 0.2);
  p.D = oracle::random_cmatrix(4, 4, rng, 0.2);
  p.B = oracle::random_cmatrix(3, 4, rng, 0.2);
  p.C = oracle::random_cmatrix(4, 3, rng, 0.2);
  std::uniform_real_distribution<double> mag(3.0, 5.0);
  for (Index i = 0; i < 3; ++i) p.A(i, i) = std::polar(mag(rng), phase);
  for (Index i = 0; i < 4; ++i) p.D(i, i) = std::polar(mag(rng), phase);
  return p;
}

const Method kDoublingMethods[] = {Method::SDA,   Method::ADDA,   Method::SDAn,   Method::ADDAn,
                                   Method::DAn,   Method::pSDA,   Method::pADDA,  Method::pSDAn,
                                   Method::pADDAn, Method::pDAn};

}  // namespace

TEST_CASE("row_quantities") {
  SUBCASE("zero off-diagonal sum") {
    const NareProblem p = scalar_problem(C(2, 2), 0.0, 0.0, C(1, 1), 0.5);
    const RowQuantities rq = row_quantities(assemble_q(p));
    CHECK(rq.theta(0) == doctest::Approx(1.0));
    CHECK(rq.sigma(0) == doctest::Approx(0.0));
    CHECK(rq.p(0) == doctest::Approx(0.5));
    CHECK(rq.s(0) == doctest::Approx(0.5));
    CHECK(rq.tau(0) == 0.0);
  }
  SUBCASE("purely imaginary diagonal at omega 0") {
    const RowQuantities rq = row_quantities(assemble_q(gen_example_72(2, 0.0, 0.0)));
    for (Index i = 0; i < 4; ++i) {
      CHECK(rq.theta(i) == doctest::Approx(3.0));
      CHECK(rq.sigma(i) == doctest::Approx(0.0));
      CHECK(rq.p(i) == doctest::Approx(2.0));
      CHECK(rq.s(i) == doctest::Approx(1.0));
    }
  }
  SUBCASE("both p formulas and the test-side definition agree") {
    for (std::uint64_t seed = 1; seed < 6; ++seed) {
      const NareProblem p = gen_random_homega(4, 3, 0.2 * static_cast<double>(seed), 0.3, seed);
      const RowQuantities rq = row_quantities(assemble_q(p));
      const oracle::RowData r = oracle::rows_of(p);
      for (Index i = 0; i < rq.size(); ++i) {
        const double def = oracle::p_over_varpi(r.q[i], r.theta[i], r.sigma[i], p.omega);
        CHECK(rq.p(i) / rq.varpi == doctest::Approx(def).epsilon(1e-12));
        CHECK(p_over_varpi_compact(rq, i) == doctest::Approx(def).epsilon(1e-12));
        CHECK(rq.p(i) - rq.s(i) == doctest::Approx(rq.q(i)).epsilon(1e-12));
        CHECK(rq.s(i) > 0.0);
      }
    }
  }
  SUBCASE("margin violation names the row") {
    const NareProblem p = scalar_problem(C(0, 1), 0.0, 0.0, 1.0, 1.0);
    try {
      (void)row_quantities(assemble_q(p));
      FAIL("expected MarginViolation");
    } catch (const MarginViolation& e) {
      CHECK(e.row() == 1);
    }
  }
}

TEST_CASE("psi_pair and immediate parameters") {
  SUBCASE("identical rows") {
    const auto [a, b] = psi_pair(row_quantities(assemble_q(gen_example_72(8, 0.0, 0.5))));
    CHECK(a == b);
    CHECK(a == doctest::Approx(7.0));
  }
  SUBCASE("scalar partition") {
    const NareProblem p = scalar_problem(C(5, 0), 1.0, 1.0, C(3, 0), 1.0);
    const auto [psi1, psi2] = psi_pair(row_quantities(assemble_q(p)));
    CHECK(psi1 == doctest::Approx((5.0 + 1.0) / 2.0));
    CHECK(psi2 == doctest::Approx((3.0 + 1.0) / 2.0));
  }
  SUBCASE("matches the test-side psi") {
    for (std::uint64_t seed = 1; seed < 6; ++seed) {
      const NareProblem p = gen_random_homega(5, 3, 0.3, 0.2, seed);
      const auto [psi1, psi2] = psi_pair(row_quantities(assemble_q(p)));
      const auto [o1, o2] = oracle::psi(p);
      CHECK(psi1 == doctest::Approx(o1).epsilon(1e-12));
      CHECK(psi2 == doctest::Approx(o2).epsilon(1e-12));
    }
  }
  SUBCASE("ADDA and SDA coincide when psi1 = psi2") {
    const NareProblem p = gen_example_72(8, 0.0, 0.5);
    const ParamChoice a = immediate_params(p, DoublingMode::ADDA);
    const ParamChoice s = immediate_params(p, DoublingMode::SDA);
    CHECK(a.t == s.t);
    CHECK(a.gamma == s.gamma);
  }
  SUBCASE("direction of the shifts") {
    const ParamChoice one = immediate_params(gen_example_71(8, 1.05, -5.0, 0.01, 1.0), DoublingMode::SDA);
    CHECK(one.alpha.imag() == 0.0);
    CHECK(one.alpha.real() > 0.0);
    const ParamChoice zero = immediate_params(gen_example_71(8, -5.0, 1.05, 0.01, 0.0), DoublingMode::SDA);
    CHECK(zero.alpha.real() == 0.0);
    CHECK(zero.alpha.imag() > 0.0);
  }
}

TEST_CASE("rotation objective") {
  SUBCASE("common phase attains every row minimum") {
    const NareProblem p = common_phase(0.3, 1.1, 3);
    const QAssembly qa = assemble_q(p);
    const RowQuantities rq = row_quantities(qa);
    const double delta = row_offset(qa, 0);
    const FProfile f = f_profile(qa, rq, delta);
    for (Index i = 0; i < rq.size(); ++i) {
      const double w = rq.varpi;
      const double mod = rq.modulus(i);
      const double best = (w * mod * mod - rq.q(i) * rq.q(i)) / (w * (mod * std::sqrt(w) - rq.q(i)));
      CHECK(f.f(i) == doctest::Approx(best).epsilon(1e-12));
    }
    CHECK(bisect_vartheta(qa, rq) == doctest::Approx(delta).epsilon(1e-6));
  }
  SUBCASE("matches the rotated row quantities") {
    const NareProblem p = gen_random_homega(4, 4, 0.6, 0.5, 4);
    const QAssembly qa = assemble_q(p);
    const RowQuantities rq = row_quantities(qa);
    for (double vt : {-0.2, 0.0, 0.15}) {
      CHECK(f_profile(qa, rq, vt).max ==
            doctest::Approx(oracle::rotated_objective(p, vt)).epsilon(1e-11));
    }
  }
  SUBCASE("infeasible angle") {
    const NareProblem p = gen_random_homega(3, 3, 0.5, 0.1, 5);
    const QAssembly qa = assemble_q(p);
    CHECK_THROWS_AS(f_profile(qa, row_quantities(qa), 2.5), Infeasible);
  }
  SUBCASE("bisection against a fine grid") {
    for (std::uint64_t seed = 6; seed < 10; ++seed) {
      const NareProblem p = gen_random_homega(4, 4, 0.4, 0.4, seed);
      const QAssembly qa = assemble_q(p);
      const RowQuantities rq = row_quantities(qa);
      const double vt = bisect_vartheta(qa, rq);
      const double fv = f_profile(qa, rq, vt).max;
      CHECK(fv <= f_profile(qa, rq, 0.0).max + 1e-9);
      double best = INFINITY, arg = 0.0;
      const int pts = 100000;
      const double h = 2.0 * M_PI / pts;
      for (int k = 0; k < pts; ++k) {
        const double x = -M_PI + k * h;
        const double v = oracle::rotated_objective(p, x);
        if (v < best) {
          best = v;
          arg = x;
        }
      }
      CHECK(fv <= best + 1e-6);
      CHECK(std::abs(vt - arg) <= 1e-6 + h);
    }
  }
}

TEST_CASE("preprocessed parameters") {
  SUBCASE("already rotated optimally") {
    const NareProblem p = common_phase(0.5, std::atan2(0.5, 0.5), 11);
    const ParamChoice pc = preprocessed_params(p, DoublingMode::ADDA);
    CHECK(std::abs(pc.chi - C(1.0)) < 1e-5);
    CHECK(*pc.diagnostics.psi1_tilde == doctest::Approx(*pc.diagnostics.psi1).epsilon(1e-6));
    CHECK(*pc.diagnostics.psi2_tilde == doctest::Approx(*pc.diagnostics.psi2).epsilon(1e-6));
  }
  SUBCASE("rotation does not enlarge the bound") {
    for (std::uint64_t seed = 12; seed < 22; ++seed) {
      const NareProblem p = gen_random_homega(4, 4, 0.5, 0.3, seed);
      const ParamChoice pc = preprocessed_params(p, DoublingMode::SDA);
      const double before = std::max(*pc.diagnostics.psi1, *pc.diagnostics.psi2);
      const double after = std::max(*pc.diagnostics.psi1_tilde, *pc.diagnostics.psi2_tilde);
      CHECK(after <= before * (1 + 1e-9));
    }
  }
  SUBCASE("unrotated problem outside the class") {
    // Common phase pi/2 at omega = 0.9: theta = 0.1 |Q_ii| falls below q.
    NareProblem p = common_phase(0.9, M_PI / 2, 23);
    for (Index i = 0; i < 3; ++i) p.A(i, i) = C(0, 3);
    for (Index i = 0; i < 4; ++i) p.D(i, i) = C(0, 3);
    p.B *= 2.0;
    p.C *= 2.0;
    const QAssembly qa = assemble_q(p);
    REQUIRE((qa.theta.array() <= qa.q.array()).any());
    CHECK_THROWS_AS(row_quantities(qa), MarginViolation);
    const RowQuantities loose = row_quantities(qa, false);
    CHECK(std::isnan(loose.p(0)));
    CHECK(loose.modulus(0) == doctest::Approx(3.0));

    const double a = feasible_angle(qa, loose);
    CHECK_NOTHROW(f_profile(qa, loose, a));
    const double vt = bisect_vartheta(qa, loose);
    // Every diagonal has argument pi/2, so the optimum aligns it with z_perp.
    CHECK(vt == doctest::Approx(M_PI / 2 - perp_angle(0.9)).epsilon(1e-5));

    for (Method m : {Method::pSDA, Method::pADDA, Method::pSDAn, Method::pADDAn, Method::pDAn}) {
      CAPTURE(method_name(m));
      const MethodRun run = run_method(p, m);
      REQUIRE(run.result.converged);
      CHECK(verify_extremal(p, run.result.phi).all_in_upper_right);
      CHECK_FALSE(run.params->diagnostics.psi1.has_value());
    }
    CHECK_THROWS_AS(choose_params(p, Method::SDA), MarginViolation);
  }
  SUBCASE("no feasible rotation") {
    const NareProblem p = scalar_problem(C(1, 0), C(2, 0), C(2, 0), C(0, 1), 0.5);
    const QAssembly qa = assemble_q(p);
    CHECK_THROWS_AS(feasible_angle(qa, row_quantities(qa, false)), Infeasible);
    CHECK_THROWS_AS(preprocessed_params(p, DoublingMode::SDA), Infeasible);
  }
}

TEST_CASE("line-cut roots") {
  SUBCASE("c = 1 gives tau") {
    for (std::uint64_t seed = 1; seed < 8; ++seed) {
      const NareProblem p = gen_random_homega(3, 4, 0.14 * static_cast<double>(seed), 0.3, seed);
      const RowQuantities rq = row_quantities(assemble_q(p));
      for (Index i = 0; i < rq.size(); ++i) {
        CHECK(r_of_c(rq, i, 1.0) == doctest::Approx(rq.tau(i)).epsilon(1e-12));
        const double direct = std::sqrt(rq.p(i) * rq.p(i) - rq.s(i) * rq.s(i)) / rq.varpi;
        CHECK(rq.tau(i) == doctest::Approx(direct).epsilon(1e-12));
      }
    }
  }
  SUBCASE("degenerate row with q = 0") {
    for (double c : {1.0, 1.5, 4.0}) CHECK(r_of_c(2.0, 2.0, 0.5, c, Block::D) == 0.0);
    CHECK(r_of_c(2.0, 2.0, 0.5, 0.5, Block::D) == doctest::Approx(0.5 * 2.0 / (0.5 * 0.5)));
  }
  SUBCASE("monotone in c and equal to the quadratic root") {
    const NareProblem p = gen_random_homega(4, 4, 0.35, 0.3, 12);
    const RowQuantities rq = row_quantities(assemble_q(p));
    const double cs[] = {0.5, 1.0, 2.0, 4.0};
    for (Index i = 0; i < rq.size(); ++i) {
      for (int k = 0; k < 4; ++k) {
        const double root = oracle::r_root(rq.p(i) / rq.varpi, rq.s(i) / rq.varpi, cs[k], rq.in_d_block(i));
        CHECK(r_of_c(rq, i, cs[k]) == doctest::Approx(root).epsilon(1e-10));
      }
      for (int k = 0; k + 1 < 4; ++k) {
        if (rq.in_d_block(i)) CHECK(r_of_c(rq, i, cs[k + 1]) < r_of_c(rq, i, cs[k]));
        else CHECK(r_of_c(rq, i, cs[k + 1]) > r_of_c(rq, i, cs[k]));
      }
    }
  }
  SUBCASE("eta at c = 1 and monotonicity") {
    const NareProblem p = gen_random_homega(5, 3, 0.8, 0.3, 13);
    const RowQuantities rq = row_quantities(assemble_q(p));
    const auto [e1, e2] = eta_pair(rq, 1.0);
    CHECK(e1 == doctest::Approx(rq.tau.head(5).maxCoeff()));
    CHECK(e2 == doctest::Approx(rq.tau.tail(3).maxCoeff()));
    double prev1 = INFINITY, prev2 = 0.0;
    for (double c = 0.1; c < 10.0; c *= 1.5) {
      const auto [a, b] = eta_pair(rq, c);
      CHECK(a < prev1);
      CHECK(b > prev2);
      prev1 = a;
      prev2 = b;
    }
  }
  SUBCASE("singleton blocks") {
    const NareProblem p = scalar_problem(C(4, 1), 0.5, 0.7, C(3, -1), 0.5);
    const RowQuantities rq = row_quantities(assemble_q(p));
    const auto [e1, e2] = eta_pair(rq, 1.7);
    CHECK(e1 == r_of_c(rq, 0, 1.7));
    CHECK(e2 == r_of_c(rq, 1, 1.7));
  }
}

TEST_CASE("balanced slope") {
  SUBCASE("symmetric problem") {
    NareProblem p = gen_random_homega(3, 3, 0.5, 0.3, 14);
    p.A = p.D;
    p.B = p.C;
    const CStar cs = bisect_c_star(row_quantities(assemble_q(p)));
    CHECK(cs.c_star == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(cs.t_star == doctest::Approx(cs.gamma_star).epsilon(1e-7));
  }
  SUBCASE("random instances") {
    for (std::uint64_t seed = 15; seed < 25; ++seed) {
      const NareProblem p = gen_random_homega(4, 6, 0.1 * static_cast<double>(seed - 15), 0.3, seed);
      const RowQuantities rq = row_quantities(assemble_q(p));
      const CStar cs = bisect_c_star(rq);
      const auto [e1, e2] = oracle::eta(p, cs.c_star);
      CHECK(std::abs(e1 - e2) <= 1e-6 * (1 + e1));
      CHECK(cs.t_star == doctest::Approx(e1).epsilon(1e-6));
      CHECK(cs.gamma_star == doctest::Approx(cs.c_star * cs.t_star).epsilon(1e-12));
      const auto [psi1, psi2] = oracle::psi(p);
      CHECK(cs.t_star < psi1);
      CHECK(cs.gamma_star < psi2);
      // Exactly one sign change of eta1 - eta2 on a log grid over the bracket.
      int changes = 0;
      double prev = 0.0;
      for (int k = 0; k <= 1000; ++k) {
        const double c = cs.lo * std::pow(cs.hi / cs.lo, k / 1000.0);
        const auto [a, b] = eta_pair(rq, c);
        const double g = a - b;
        if (k > 0 && (g > 0) != (prev > 0)) ++changes;
        prev = g;
      }
      CHECK(changes == 1);
    }
  }
}

TEST_CASE("refined strategies") {
  SUBCASE("equal bounds dispatch DAn to SDAn") {
    const ParamChoice pc = refined_params(gen_example_72(8, 0.0, 0.5), RefinedMode::DAn);
    CHECK(pc.note.find("SDAn") != std::string::npos);
    CHECK(pc.strategy == ParamChoice::Strategy::DAn);
  }
  SUBCASE("decoupled rows") {
    NareProblem p = gen_random_homega(3, 3, 0.5, 0.3, 30);
    p.B.setZero();
    p.C.setZero();
    const CVector da = p.A.diagonal(), dd = p.D.diagonal();
    p.A = da.asDiagonal();
    p.D = dd.asDiagonal();
    const ParamChoice pc = refined_params(p, RefinedMode::ADDAn);
    CHECK(pc.t == 1.0);
    CHECK(pc.gamma == 1.0);
  }
  SUBCASE("zeta must exceed one") {
    CHECK_THROWS_AS(refined_params(gen_example_72(4, 0.0, 0.5), RefinedMode::SDAn, 1.0), BadParam);
  }
}

TEST_CASE("convergence inequalities hold for every strategy") {
  for (std::uint64_t seed = 40; seed < 55; ++seed) {
    const double w = 0.25 * static_cast<double>(seed % 5);
    const NareProblem p = gen_random_homega(4, 5, w, 0.2, seed);
    for (Method m : kDoublingMethods) {
      CAPTURE(method_name(m));
      const ParamChoice pc = choose_params(p, m);
      const double slack = oracle::min_condition_slack(p, pc.alpha, pc.beta, pc.chi);
      CHECK(slack >= -1e-12);
      CHECK(min_feasibility_slack(p, pc) == doctest::Approx(slack).epsilon(1e-9));
    }
  }
}

TEST_CASE("monotone threshold") {
  const C x(1.0, 1.0);
  CHECK(monotone_threshold(x, 1.0, 0.5) == doctest::Approx(std::abs(x) / std::sqrt(0.5)));
  const double th = monotone_threshold(x, 1.0, 0.5);
  const C z = z_perp(0.5);
  double prev = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double t = th * (1.0 + 3.0 * k / 200.0);
    const double f = std::abs(x - t * z) / std::abs(x + t * z);
    CHECK(f >= prev - 1e-15);
    prev = f;
  }
  CHECK(monotone_region_check(x, 1.0, 1.01 * th, 0.5));
  CHECK_FALSE(monotone_region_check(x, 1.0, 0.5 * th, 0.5));

  // With c = 1 the threshold is |x| / sqrt(varpi) at any angle; for c > 1 it
  // grows as x turns toward the ray direction at fixed modulus.
  for (double off : {1.2, 0.6, 0.0})
    CHECK(monotone_threshold(std::polar(2.0, std::atan2(0.5, 0.5) + off), 1.0, 0.5) ==
          doctest::Approx(2.0 / std::sqrt(0.5)));
  double last = 0.0;
  for (double off : {1.2, 0.8, 0.4, 0.0}) {
    const double v = monotone_threshold(std::polar(2.0, std::atan2(0.5, 0.5) + off), 1.3, 0.5);
    CHECK(v > last);
    last = v;
  }
}
