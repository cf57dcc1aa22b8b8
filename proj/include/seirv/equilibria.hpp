#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "seirv/model.hpp"

namespace seirv {

struct MfePoint {
    double s0 = 0.0, e0 = 0.0, i0 = 0.0, r0 = 0.0, v0 = 0.0;
    double denominator_d = 0.0;

    State state() const {
        State x;
        x << s0, e0, i0, r0, v0;
        return x;
    }
};

struct ThresholdResult {
    double rc = 0.0;
    double rc_squared = 0.0;
    double n_tilde = 0.0;  ///< max(N0, lambda/mu)
};

enum class Verdict { stable, unstable, marginal };

const char* to_string(Verdict v);

/// Eigenvalues at the malware-free point: -mu and the roots of two quadratics.
struct MfeSpectrum {
    double l1 = 0.0, l2 = 0.0, l3 = 0.0, l4 = 0.0;
    Eigen::Matrix<double, 5, 1> eigenvalues = Eigen::Matrix<double, 5, 1>::Zero();
    double rc = 0.0;
    Verdict verdict = Verdict::marginal;
};

struct EndemicPoint {
    double se = 0.0, ee = 0.0, ie = 0.0, re = 0.0, ve = 0.0;
    double a0 = 0.0, a1 = 0.0;

    State state() const {
        State x;
        x << se, ee, ie, re, ve;
        return x;
    }
};

struct RouthHurwitzReport {
    Eigen::Matrix<double, 5, 1> h = Eigen::Matrix<double, 5, 1>::Zero();  ///< h1..h5
    std::array<bool, 5> conditions{};
    bool stable = false;
    Eigen::Matrix<std::complex<double>, 5, 1> eigenvalues;
    Verdict eigen_verdict = Verdict::marginal;
    double max_residual = 0.0;  ///< max |p(lambda)| / sum |c_k| |lambda|^(5-k) over the roots

    /// Both tests agree, or the eigenvalues sit inside the marginal band.
    bool consistent() const {
        return eigen_verdict == Verdict::marginal || stable == (eigen_verdict == Verdict::stable);
    }
};

struct BifurcationBranch {
    std::vector<double> beta_grid;
    std::vector<double> ie_values;
    std::vector<double> rc_values;
    std::vector<bool> stability_flags;  ///< endemic point above threshold, MFE below
    double beta_star = 0.0;
};

inline constexpr double kMarginalBand = 1e-10;

/// S^0 denominator eta1 - sigma1 eta1/(sigma1+mu) + c1 + mu - c1 sigma2/(sigma2+mu).
double mfe_denominator(const ModelParams& p);

MfePoint compute_mfe(const ModelParams& p);

ThresholdResult compute_rc(const ModelParams& p, double n0 = default_initial_state().sum());

/// Transmission rate at which R_c = 1, other parameters fixed.
double threshold_beta(const ModelParams& p);

MfeSpectrum mfe_spectrum(const ModelParams& p);

std::optional<EndemicPoint> compute_endemic(const ModelParams& p);

/// Throws NoEndemicPointError when R_c <= 1.
RouthHurwitzReport endemic_stability(const ModelParams& p);

/// Classifies eigenvalues by the sign of their real parts.
Verdict classify_spectrum(const Eigen::Ref<const Eigen::VectorXcd>& eigenvalues, double band = kMarginalBand);

/// Linear beta grid on [beta_lo, beta_hi].
BifurcationBranch bifurcation_scan(const ModelParams& p, double beta_lo, double beta_hi, int n_points);

}  // namespace seirv
