#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qsl/amplitudes.hpp"
#include "qsl/model.hpp"

namespace qsl {

/// Reduced density matrix of the spin in the |j m> basis, ordered m = +j, ..., -j.
struct ReducedDensity {
    double t = 0.0;
    std::vector<double> m_basis;
    Eigen::MatrixXcd matrix;
};

/// d rho_S / dt for j = 1/2, with its (real) eigenvalues sorted descending.
struct DerivativeMatrix {
    double t = 0.0;
    Eigen::Matrix2cd matrix;
    std::array<double, 2> eigenvalues{};
};

struct Norms {
    double op = 0.0;
    double tr = 0.0;
    double hs = 0.0;
};

inline constexpr double kHermitianTolerance = 1e-10;

std::vector<double> m_basis(Spin j);

/// rho_S(t)[m1][m2] = exp(-i omega (m1 - m2) t) Omega_E(j, j; t) / (2j + 1).
ReducedDensity rho_S(double t, const ModelParams& params, NormalizationMode mode = NormalizationMode::InitialUnit);

/// Same matrix for a given environment factor; used by the analytic derivative
/// and by sensitivity checks.
Eigen::MatrixXcd rho_from_env(double t, const ModelParams& params, cplx env);

/// Largest |M - M^dagger| entry.
double hermiticity_defect(const Eigen::MatrixXcd& m);

/// Analytic: chain rule through alpha, zeta and psi. FiniteDiff: Ridders'
/// Richardson-extrapolated differences, central where t allows and forward
/// near t = 0. Throws StepUnderflow if the extrapolation cannot certify 1e-8
/// relative accuracy.
DerivativeMatrix drho_dt(double t, const ModelParams& params, DerivativeMethod method = DerivativeMethod::Analytic,
                         NormalizationMode mode = NormalizationMode::InitialUnit);

/// Closed-form eigenvalues of a 2x2 Hermitian matrix, sorted descending.
/// Throws NotHermitian if |M - M^dagger| exceeds 1e-10 (relative to max(1, |M|)).
std::pair<double, double> eigenvalues_2x2(const Eigen::Matrix2cd& m);

/// Operator, trace and Hilbert-Schmidt norms from the eigenvalue magnitudes.
Norms norms(const DerivativeMatrix& d);
Norms norms_from_eigenvalues(double l1, double l2);

} // namespace qsl
