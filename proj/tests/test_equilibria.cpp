#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "seirv/equilibria.hpp"
#include "seirv/integrator.hpp"
#include "seirv/poly.hpp"
#include "support.hpp"

using namespace seirv;
using seirv::testing::random_params;
using seirv::testing::rel_err;

namespace {

double fixed_point_residual(const State& x, const ModelParams& p) {
    return rhs(x, p).cwiseAbs().maxCoeff() / (p.lambda + p.mu * total_population(x));
}

ModelParams random_endemic_params(std::mt19937_64& rng) {
    for (;;) {
        ModelParams p = random_params(rng);
        if (compute_rc(p).rc > 1.0) return p;
    }
}

}  // namespace

TEST_CASE("mfe closed form") {
    ModelParams p = default_params();
    p.eta1 = 0.0;
    MfePoint m = compute_mfe(p);
    CHECK(m.s0 == doctest::Approx(p.lambda / p.mu).epsilon(1e-15));
    CHECK(m.r0 == 0.0);
    CHECK(m.v0 == 0.0);

    m = compute_mfe(default_params().with_controls(0.1, 0.0));
    CHECK(m.denominator_d == doctest::Approx(0.0182687090).epsilon(1e-9));
    CHECK(m.s0 == doctest::Approx(1.2546042545e7).epsilon(1e-9));
    CHECK(m.e0 == 0.0);
    CHECK(m.i0 == 0.0);

    p = default_params();
    p.mu = 0.0;
    CHECK_THROWS_AS(compute_mfe(p), ValidationError);
}

TEST_CASE("equilibria zero the vector field") {
    std::mt19937_64 rng(2024);
    double worst_mfe = 0.0, worst_ee = 0.0;
    int endemic = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const ModelParams p = random_params(rng);
        worst_mfe = std::max(worst_mfe, fixed_point_residual(compute_mfe(p).state(), p));
        if (const auto e = compute_endemic(p)) {
            ++endemic;
            worst_ee = std::max(worst_ee, fixed_point_residual(e->state(), p));
        }
    }
    CHECK(worst_mfe < 1e-9);
    CHECK(worst_ee < 1e-9);
    CHECK(endemic > 50);
}

TEST_CASE("threshold values") {
    const ModelParams p = default_params();
    CHECK(compute_rc(p.with_beta(0.0)).rc == 0.0);
    CHECK(compute_rc(p.with_controls(0.1, 0.1)).rc == doctest::Approx(0.59367365).epsilon(1e-7));
    CHECK(compute_rc(p).rc == doctest::Approx(13.032).epsilon(1e-4));
    CHECK(rel_err(compute_rc(p.with_beta(4.0 * p.beta)).rc, 2.0 * compute_rc(p).rc) < 1e-15);

    const ThresholdResult r = compute_rc(p);
    CHECK(r.rc == std::sqrt(r.rc_squared));
    CHECK(r.n_tilde == doctest::Approx(1e9 + 1.0));
    CHECK(compute_rc(p, 1e6).n_tilde == doctest::Approx(p.lambda / p.mu));

    CHECK(compute_rc(p.with_beta(threshold_beta(p))).rc == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mfe spectrum") {
    SUBCASE("below threshold everything decays") {
        const MfeSpectrum s = mfe_spectrum(default_params().with_controls(0.1, 0.1));
        CHECK((s.eigenvalues.array() < 0.0).all());
        CHECK(s.verdict == Verdict::stable);
    }
    SUBCASE("above threshold exactly one root is positive") {
        const MfeSpectrum s = mfe_spectrum(default_params());
        CHECK((s.eigenvalues.array() > 0.0).count() == 1);
        CHECK(s.eigenvalues(1) > 0.0);
        CHECK(s.verdict == Verdict::unstable);
    }
    SUBCASE("closed form matches the Jacobian spectrum") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 200; ++trial) {
            const ModelParams p = random_params(rng);
            const MfeSpectrum s = mfe_spectrum(p);
            CHECK(s.eigenvalues(0) == -p.mu);
            CHECK((s.eigenvalues(1) > 0.0) == (s.rc > 1.0));

            Eigen::VectorXd direct = Eigen::EigenSolver<Jacobian>(jacobian(compute_mfe(p).state(), p), false)
                                         .eigenvalues()
                                         .real();
            Eigen::VectorXd closed = s.eigenvalues;
            std::sort(direct.begin(), direct.end());
            std::sort(closed.begin(), closed.end());
            const double scale = closed.cwiseAbs().maxCoeff();
            CHECK((direct - closed).cwiseAbs().maxCoeff() < 1e-9 * scale);
        }
    }
}

TEST_CASE("endemic point") {
    const ModelParams p = default_params();
    CHECK_FALSE(compute_endemic(p.with_controls(0.1, 0.1)).has_value());
    CHECK_FALSE(compute_endemic(p.with_beta(threshold_beta(p))).has_value());

    const auto e = compute_endemic(p);
    REQUIRE(e.has_value());
    CHECK(e->se == doctest::Approx(0.35455 * 0.0004 / (4e-9 * 0.25)).epsilon(1e-12));
    CHECK(e->se == doctest::Approx(1.4182e5).epsilon(1e-4));
    CHECK(e->ie > 0.0);

    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const ModelParams q = random_params(rng);
        const double a = q.alpha, mu = q.mu;
        const double lhs = a * (q.sigma1 + mu);
        const double want = mu * (q.sigma1 * (a + q.c2 + mu) + (a + q.eta2 + mu) * (q.c2 + mu));
        if (const auto ee = compute_endemic(q)) {
            CHECK(rel_err(lhs * ee->a1, want) < 1e-12);
            CHECK(rel_err(ee->se * compute_rc(q).rc_squared, compute_mfe(q).s0) < 1e-12);
            CHECK(ee->ee == doctest::Approx((q.c2 + mu) / a * ee->ie).epsilon(1e-14));
        }
    }
}

TEST_CASE("characteristic polynomial utilities") {
    Eigen::Matrix3d a;
    a << 2, 0, 0, 0, 3, 0, 0, 0, -1;
    const Eigen::VectorXd c = characteristic_polynomial(a);
    // (x-2)(x-3)(x+1) = x^3 - 4x^2 + x + 6
    CHECK(c(0) == 1.0);
    CHECK(c(1) == doctest::Approx(-4.0));
    CHECK(c(2) == doctest::Approx(1.0));
    CHECK(c(3) == doctest::Approx(6.0));
    Eigen::VectorXd r = polynomial_roots(c).real();
    std::sort(r.begin(), r.end());
    CHECK(r(0) == doctest::Approx(-1.0));
    CHECK(r(1) == doctest::Approx(2.0));
    CHECK(r(2) == doctest::Approx(3.0));

    // (x+1)^5 satisfies every test; (x-1)(x+1)^4 fails at least one.
    Eigen::Matrix<double, 5, 1> h;
    h << 5, 10, 10, 5, 1;
    for (bool b : routh_hurwitz_quintic(h)) CHECK(b);
    h << 3, 2, -2, -3, -1;
    const auto cond = routh_hurwitz_quintic(h);
    CHECK_FALSE(std::all_of(cond.begin(), cond.end(), [](bool b) { return b; }));
}

TEST_CASE("endemic stability with light controls") {
    const RouthHurwitzReport r = endemic_stability(default_params().with_controls(0.02, 0.02));
    CHECK(r.stable);
    for (bool b : r.conditions) CHECK(b);
    CHECK(r.eigen_verdict == Verdict::stable);
    for (const auto& z : r.eigenvalues) CHECK(z.real() < 0.0);

    CHECK_THROWS_AS(endemic_stability(default_params().with_controls(0.1, 0.1)), NoEndemicPointError);
    // R_c = 0.961 here, so there is no endemic point to assess.
    CHECK(compute_rc(default_params().with_controls(0.05, 0.05)).rc == doctest::Approx(0.9609).epsilon(1e-3));
    CHECK_THROWS_AS(endemic_stability(default_params().with_controls(0.05, 0.05)), NoEndemicPointError);
}

TEST_CASE("Routh-Hurwitz verdict agrees with the eigenvalues") {
    std::mt19937_64 rng(99);
    int compared = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const ModelParams p = random_endemic_params(rng);
        const RouthHurwitzReport r = endemic_stability(p);
        CHECK(r.consistent());
        if (r.eigen_verdict != Verdict::marginal) ++compared;

        // Vieta: product of roots = -h5; coefficients rebuilt from roots.
        std::complex<double> prod = 1.0;
        for (const auto& z : r.eigenvalues) prod *= z;
        CHECK(std::abs(prod + r.h(4)) <= 1e-8 * std::abs(r.h(4)));

        Eigen::VectorXcd rebuilt = Eigen::VectorXcd::Zero(6);
        rebuilt(0) = 1.0;
        for (Eigen::Index k = 0; k < 5; ++k) {
            for (Eigen::Index j = k + 1; j >= 1; --j) rebuilt(j) -= r.eigenvalues(k) * rebuilt(j - 1);
        }
        for (Eigen::Index k = 0; k < 5; ++k)
            CHECK(std::abs(rebuilt(k + 1) - r.h(k)) <= 1e-8 * std::abs(r.h(k)));

        // Direct Jacobian eigenvalues land on the same verdict.
        const auto e = compute_endemic(p);
        const Eigen::VectorXcd direct = Eigen::EigenSolver<Jacobian>(jacobian(e->state(), p), false).eigenvalues();
        const Verdict v = classify_spectrum(direct);
        if (v != Verdict::marginal && r.eigen_verdict != Verdict::marginal) CHECK(v == r.eigen_verdict);
    }
    CHECK(compared > 250);
}

TEST_CASE("threshold governs long-run dynamics") {
    const ModelParams base = default_params();
    SUBCASE("below threshold infection dies out") {
        for (double c2 : {0.2, 0.5}) {
            const ModelParams p = base.with_controls(0.1, c2);
            REQUIRE(compute_rc(p).rc < 0.9);
            const Trajectory t = integrate(p, default_initial_state(), 2000.0, {.dt = 0.1});
            CHECK(t.states(t.size() - 1, kI) < 1e-3);
        }
    }
    SUBCASE("above threshold infection settles on the endemic level") {
        const ModelParams p = base.with_controls(0.0, 0.02);
        REQUIRE(compute_rc(p).rc > 1.1);
        const auto e = compute_endemic(p);
        const Trajectory t = integrate(p, default_initial_state(), 40000.0, {.dt = 0.2});
        CHECK(rel_err(t.states(t.size() - 1, kI), e->ie) < 0.01);
    }
}

TEST_CASE("bifurcation scan") {
    const ModelParams p = default_params();
    const double bstar = threshold_beta(p);
    const BifurcationBranch b = bifurcation_scan(p, 0.0, 4.0 * bstar, 81);
    CHECK(b.beta_star == bstar);
    REQUIRE(b.beta_grid.size() == 81);
    bool bracketed = false;
    for (std::size_t k = 0; k < b.beta_grid.size(); ++k) {
        if (b.rc_values[k] < 1.0) {
            CHECK(b.ie_values[k] == 0.0);
            CHECK(b.stability_flags[k]);
        } else if (b.rc_values[k] > 1.0) {
            CHECK(b.ie_values[k] > 0.0);
            CHECK(b.stability_flags[k]);
        }
        if (k > 0) {
            CHECK(b.ie_values[k] >= b.ie_values[k - 1]);
            if (b.beta_grid[k - 1] <= bstar && bstar <= b.beta_grid[k]) bracketed = true;
        }
    }
    CHECK(bracketed);
    CHECK_THROWS_AS(bifurcation_scan(p, 0.0, 1e-9, 1), ValidationError);
}
