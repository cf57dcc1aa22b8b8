#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "seirv/error.hpp"

namespace seirv {

/// Compartment positions inside a state vector.
enum Compartment : Eigen::Index { kS = 0, kE = 1, kI = 2, kR = 3, kV = 4, kCompartments = 5 };

template <typename Scalar>
using StateT = Eigen::Matrix<Scalar, kCompartments, 1>;

template <typename Scalar>
using JacobianT = Eigen::Matrix<Scalar, kCompartments, kCompartments>;

using State = StateT<double>;
using StateDerivative = StateT<double>;
using Jacobian = JacobianT<double>;

/// Rate constants of the SEIRV system plus the two control rates.
///
/// All rates are per abstract time unit. `lambda` is an absolute inflow
/// (devices per time unit); `beta` is the mass-action transmission rate.
template <typename Scalar>
struct ModelParamsT {
    Scalar lambda{0};
    Scalar beta{0};
    Scalar alpha{0};
    Scalar eta1{0};
    Scalar eta2{0};
    Scalar sigma1{0};
    Scalar sigma2{0};
    Scalar mu{0};
    Scalar c1{0};  ///< vaccination rate of susceptible devices
    Scalar c2{0};  ///< treatment rate of infected devices

    /// Throws ValidationError unless every rate is finite and non-negative,
    /// the controls lie in [0,1] and mu > 0.
    void validate() const {
        auto check = [](Scalar v, const char* name) {
            using std::isfinite;
            if (!isfinite(v) || v < Scalar(0))
                throw ValidationError(std::string("parameter ") + name + " must be finite and >= 0");
        };
        check(lambda, "lambda");
        check(beta, "beta");
        check(alpha, "alpha");
        check(eta1, "eta1");
        check(eta2, "eta2");
        check(sigma1, "sigma1");
        check(sigma2, "sigma2");
        check(mu, "mu");
        check(c1, "c1");
        check(c2, "c2");
        if (c1 > Scalar(1) || c2 > Scalar(1)) throw ValidationError("controls c1, c2 must lie in [0,1]");
        if (!(mu > Scalar(0))) throw ValidationError("mu must be > 0");
    }

    ModelParamsT with_controls(Scalar vaccination, Scalar treatment) const {
        ModelParamsT p = *this;
        p.c1 = vaccination;
        p.c2 = treatment;
        return p;
    }

    ModelParamsT with_beta(Scalar b) const {
        ModelParamsT p = *this;
        p.beta = b;
        return p;
    }

    template <typename Other>
    ModelParamsT<Other> cast() const {
        return {Other(lambda), Other(beta), Other(alpha), Other(eta1), Other(eta2),
                Other(sigma1), Other(sigma2), Other(mu),   Other(c1),   Other(c2)};
    }

    Scalar carrying_population() const { return lambda / mu; }
};

using ModelParams = ModelParamsT<double>;

/// Reference parameter set (controls zero).
inline ModelParams default_params() {
    ModelParams p;
    p.lambda = 0.2292e6;
    p.beta = 4e-9;
    p.alpha = 0.25;
    p.eta1 = 0.10415;
    p.eta2 = 0.10415;
    p.sigma1 = 0.00417;
    p.sigma2 = 0.00417;
    p.mu = 0.0004;
    return p;
}

/// The seeded initial state used throughout: 1e9 susceptible devices and `infected` infected ones.
inline State default_initial_state(double infected = 1.0) {
    State x;
    x << 1e9, 0.0, infected, 0.0, 0.0;
    return x;
}

template <typename Derived>
typename Derived::Scalar total_population(const Eigen::MatrixBase<Derived>& x) {
    return x.sum();
}

namespace detail {

template <typename Derived, typename Scalar>
StateT<Scalar> rhs_unchecked(const Eigen::MatrixBase<Derived>& x, const ModelParamsT<Scalar>& p) {
    const Scalar s = x(kS), e = x(kE), i = x(kI), r = x(kR), v = x(kV);
    const Scalar infection = p.beta * s * i;
    StateT<Scalar> dx;
    dx(kS) = p.lambda - infection - p.eta1 * s + p.sigma1 * r + p.sigma2 * v - p.c1 * s - p.mu * s;
    dx(kE) = infection - p.alpha * e - p.eta2 * e - p.mu * e;
    dx(kI) = p.alpha * e - p.c2 * i - p.mu * i;
    dx(kR) = p.eta1 * s + p.eta2 * e + p.c2 * i - p.sigma1 * r - p.mu * r;
    dx(kV) = p.c1 * s - p.sigma2 * v - p.mu * v;
    return dx;
}

}  // namespace detail

/// Time derivative of the SEIRV system at state `x`.
template <typename Derived, typename Scalar>
StateT<Scalar> rhs(const Eigen::MatrixBase<Derived>& x, const ModelParamsT<Scalar>& p) {
    if (!x.allFinite()) throw ValidationError("rhs: state has non-finite components");
    p.validate();
    return detail::rhs_unchecked(x, p);
}

/// Jacobian of rhs with respect to the state.
template <typename Derived, typename Scalar>
JacobianT<Scalar> jacobian(const Eigen::MatrixBase<Derived>& x, const ModelParamsT<Scalar>& p) {
    const Scalar bs = p.beta * x(kS);
    const Scalar bi = p.beta * x(kI);
    JacobianT<Scalar> j;
    // clang-format off
    j << -(bi + p.eta1 + p.c1 + p.mu), Scalar(0),                     -bs,             p.sigma1,               p.sigma2,
          bi,                          -(p.alpha + p.eta2 + p.mu),     bs,             Scalar(0),              Scalar(0),
          Scalar(0),                   p.alpha,                        -(p.c2 + p.mu), Scalar(0),              Scalar(0),
          p.eta1,                      p.eta2,                         p.c2,           -(p.sigma1 + p.mu),     Scalar(0),
          p.c1,                        Scalar(0),                      Scalar(0),      Scalar(0),              -(p.sigma2 + p.mu);
    // clang-format on
    return j;
}

/// Closed-form total population: N(t) = Λ/μ + (N0 − Λ/μ) e^{−μt}.
template <typename Scalar>
Scalar population_closed_form(const ModelParamsT<Scalar>& p, Scalar n0, Scalar t) {
    using std::exp;
    const Scalar limit = p.lambda / p.mu;
    return limit + (n0 - limit) * exp(-p.mu * t);
}

}  // namespace seirv
