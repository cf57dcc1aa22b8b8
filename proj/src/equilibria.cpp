#include "seirv/equilibria.hpp"

#include <algorithm>
#include <cmath>

#include "seirv/poly.hpp"

namespace seirv {

namespace {

// Roots of x^2 + b x + c, larger first. Tiny negative discriminants from rounding are treated as zero.
std::array<double, 2> real_quadratic_roots(double b, double c) {
    const double disc = std::max(b * b - 4.0 * c, 0.0);
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q == 0.0) return {0.0, 0.0};
    const double r1 = q, r2 = c / q;
    return {std::max(r1, r2), std::min(r1, r2)};
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::stable: return "stable";
        case Verdict::unstable: return "unstable";
        case Verdict::marginal: return "marginal";
    }
    return "marginal";
}

double mfe_denominator(const ModelParams& p) {
    return p.eta1 - p.sigma1 * p.eta1 / (p.sigma1 + p.mu) + p.c1 + p.mu - p.c1 * p.sigma2 / (p.sigma2 + p.mu);
}

MfePoint compute_mfe(const ModelParams& p) {
    p.validate();
    MfePoint m;
    m.denominator_d = mfe_denominator(p);
    m.s0 = p.lambda / m.denominator_d;
    m.r0 = p.eta1 * m.s0 / (p.sigma1 + p.mu);
    m.v0 = p.c1 * m.s0 / (p.sigma2 + p.mu);
    return m;
}

ThresholdResult compute_rc(const ModelParams& p, double n0) {
    const MfePoint m = compute_mfe(p);
    ThresholdResult r;
    r.rc_squared = p.beta * m.s0 * p.alpha / ((p.c2 + p.mu) * (p.alpha + p.eta2 + p.mu));
    r.rc = std::sqrt(r.rc_squared);
    r.n_tilde = std::max(n0, p.carrying_population());
    return r;
}

double threshold_beta(const ModelParams& p) {
    const MfePoint m = compute_mfe(p);
    return (p.c2 + p.mu) * (p.alpha + p.eta2 + p.mu) / (m.s0 * p.alpha);
}

Verdict classify_spectrum(const Eigen::Ref<const Eigen::VectorXcd>& eigenvalues, double band) {
    bool marginal = false;
    for (const auto& z : eigenvalues) {
        if (z.real() > band) return Verdict::unstable;
        if (z.real() >= -band) marginal = true;
    }
    return marginal ? Verdict::marginal : Verdict::stable;
}

MfeSpectrum mfe_spectrum(const ModelParams& p) {
    const ThresholdResult th = compute_rc(p);
    const double mu = p.mu;
    MfeSpectrum s;
    s.rc = th.rc;
    s.l1 = p.alpha + p.c2 + p.eta2 + 2.0 * mu;
    s.l2 = (p.c2 + mu) * (p.alpha + p.eta2 + mu) * (1.0 - th.rc_squared);
    s.l3 = p.c1 + p.eta1 + p.sigma1 + p.sigma2 + 2.0 * mu;
    s.l4 = p.c1 * mu + p.c1 * p.sigma1 + p.eta1 * mu + p.eta1 * p.sigma2 + mu * mu + mu * p.sigma1 + mu * p.sigma2 +
           p.sigma1 * p.sigma2;
    const auto infected = real_quadratic_roots(s.l1, s.l2);
    const auto free = real_quadratic_roots(s.l3, s.l4);
    s.eigenvalues << -mu, infected[0], infected[1], free[0], free[1];
    s.verdict = classify_spectrum(s.eigenvalues.cast<std::complex<double>>());
    return s;
}

std::optional<EndemicPoint> compute_endemic(const ModelParams& p) {
    const ThresholdResult th = compute_rc(p);
    if (!(th.rc > 1.0)) return std::nullopt;
    const double a = p.alpha, mu = p.mu, c2 = p.c2;
    EndemicPoint e;
    e.se = (a + p.eta2 + mu) * (c2 + mu) / (p.beta * a);
    e.a0 = p.lambda - mfe_denominator(p) * e.se;
    e.a1 = mu * (p.sigma1 * (a + c2 + mu) + (a + p.eta2 + mu) * (c2 + mu)) / (a * (p.sigma1 + mu));
    e.ie = e.a0 / e.a1;
    e.ee = (c2 + mu) / a * e.ie;
    e.ve = p.c1 * e.se / (p.sigma2 + mu);
    e.re = (p.eta1 * e.se + p.eta2 * e.ee + c2 * e.ie) / (p.sigma1 + mu);
    return e;
}

RouthHurwitzReport endemic_stability(const ModelParams& p) {
    const auto e = compute_endemic(p);
    if (!e) throw NoEndemicPointError(compute_rc(p).rc);

    const Jacobian j = jacobian(e->state(), p);
    const Eigen::VectorXd c = characteristic_polynomial(j);

    RouthHurwitzReport r;
    r.h = c.tail<5>();
    r.conditions = routh_hurwitz_quintic(r.h);
    r.stable = std::all_of(r.conditions.begin(), r.conditions.end(), [](bool b) { return b; });

    r.eigenvalues = polynomial_roots(c);
    for (const auto& z : r.eigenvalues) {
        // Scaled by the magnitudes of the summed terms, so large roots are judged fairly.
        const double scale = polynomial_eval(c.cwiseAbs().eval(), std::abs(z));
        r.max_residual = std::max(r.max_residual, std::abs(polynomial_eval(c, z)) / scale);
    }
    if (!(r.max_residual < 1e-8)) throw NumericalError("endemic spectrum: root residual check failed");
    r.eigen_verdict = classify_spectrum(r.eigenvalues);
    return r;
}

BifurcationBranch bifurcation_scan(const ModelParams& p, double beta_lo, double beta_hi, int n_points) {
    if (n_points < 2) throw ValidationError("bifurcation scan needs at least 2 points");
    if (!(beta_lo >= 0.0) || !(beta_hi > beta_lo)) throw ValidationError("bifurcation scan needs 0 <= beta_lo < beta_hi");
    BifurcationBranch b;
    b.beta_star = threshold_beta(p);
    for (int k = 0; k < n_points; ++k) {
        const double beta = beta_lo + (beta_hi - beta_lo) * k / (n_points - 1);
        const ModelParams q = p.with_beta(beta);
        const double rc = compute_rc(q).rc;
        b.beta_grid.push_back(beta);
        b.rc_values.push_back(rc);
        if (const auto e = compute_endemic(q)) {
            b.ie_values.push_back(e->ie);
            b.stability_flags.push_back(endemic_stability(q).stable);
        } else {
            b.ie_values.push_back(0.0);
            b.stability_flags.push_back(mfe_spectrum(q).verdict == Verdict::stable);
        }
    }
    return b;
}

}  // namespace seirv
