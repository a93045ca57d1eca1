#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qsl/model.hpp"

namespace qsl {

using cplx = std::complex<double>;

/// Bosonic amplitude E_{n,n'}(j, t) for one index pair.
struct BosonAmplitude {
    int n = 0;
    int n_prime = 0;
    cplx value;
};

/// All amplitudes E_{n,n'}(j, t) with 0 <= n, n' <= n_max, and optionally their
/// time derivatives.
///
/// Each entry is the closed-form triple sum over (n2, n3, n4) built from alpha,
/// zeta and psi. It equals the matrix element <n| exp(-i t (beta b^+b + gamma (b^+ + b))) |n'>
/// in the normalized Fock basis. The n3 sum is open-ended and is truncated once
/// every entry has received three consecutive contributions below
/// 1e-14 exp(-(alpha^2 + zeta^2)/2). Sums are carried in long double.
struct AmplitudeTable {
    Spin j;
    double t = 0.0;
    Eigen::MatrixXcd value;
    /// dE/dt, empty unless requested.
    Eigen::MatrixXcd rate;
    /// Number of n3 values summed.
    int n3_terms = 0;

    [[nodiscard]] BosonAmplitude at(int n, int n_prime) const;
};

inline constexpr double kAmplitudeTermTolerance = 1e-14;
inline constexpr int kAmplitudeN3Cap = 200;

AmplitudeTable amplitude_table(Spin j, double t, const ModelParams& params, bool with_rate = false);

/// E_{n,n'}(j, t). Throws IndexOutOfRange if an index exceeds n_max and
/// NonConvergence if the n3 sum does not settle before the cap.
cplx amplitude_E(int n, int n_prime, Spin j, double t, const ModelParams& params);

/// E*_{n'',n}(j, t), evaluated from its own sum with i in place of -i.
cplx amplitude_E_conj(int n_dprime, int n, Spin j, double t, const ModelParams& params);

struct EnvFactor {
    Spin j1;
    Spin j2;
    double t = 0.0;
    cplx value;
    double normalization = 1.0;
};

/// Environment factor and its time derivative for j1 = j2 = params.j.
struct EnvFactorWithRate {
    EnvFactor factor;
    cplx rate;
};

/// Omega_E(j1, j2; t) = (1/N) sum_{n<=n_max} (1/n!) sum_{n',n''} E_{n,n'}(j1) E*_{n'',n}(j2) / sqrt(n'! n''!).
EnvFactor env_factor(Spin j1, Spin j2, double t, const ModelParams& params,
                     NormalizationMode mode = NormalizationMode::InitialUnit);

EnvFactorWithRate env_factor_with_rate(double t, const ModelParams& params,
                                       NormalizationMode mode = NormalizationMode::InitialUnit);

/// N(t). InitialUnit returns the t = 0 retained trace for every t; TotalTrace
/// returns the retained trace at t, so that Omega_E(j, j; t) = 1.
double normalization_N(double t, const ModelParams& params, NormalizationMode mode);

} // namespace qsl
