#pragma once

#include <cmath>
#include <random>

#include "seirv/model.hpp"

namespace seirv::testing {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

/// Every rate log-uniform over +-2 decades around the reference set.
inline ModelParams random_params(std::mt19937_64& rng, double decades = 2.0) {
    std::uniform_real_distribution<double> u(-decades, decades);
    auto jitter = [&](double v) { return v * std::pow(10.0, u(rng)); };
    ModelParams p = default_params();
    p.lambda = jitter(p.lambda);
    p.beta = jitter(p.beta);
    p.alpha = jitter(p.alpha);
    p.eta1 = jitter(p.eta1);
    p.eta2 = jitter(p.eta2);
    p.sigma1 = jitter(p.sigma1);
    p.sigma2 = jitter(p.sigma2);
    p.mu = jitter(p.mu);
    std::uniform_real_distribution<double> c(0.0, 1.0);
    p.c1 = c(rng);
    p.c2 = c(rng);
    return p;
}

}  // namespace seirv::testing
