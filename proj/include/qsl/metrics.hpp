#pragma once

#include <span>
#include <vector>

#include "qsl/model.hpp"
#include "qsl/reduced_density.hpp"

namespace qsl {

enum class NormKind { Op, Tr, Hs };

/// One time point of the speed-limit analysis (hbar = 1).
struct QslRecord {
    double t = 0.0;
    double F = 1.0;
    double B = 0.0;
    double delta_op = 0.0;
    double delta_tr = 0.0;
    double delta_hs = 0.0;
    double t_lb = 0.0;
};

/// Time-averaged norms of d rho_S / dt over [0, t].
struct Deltas {
    double op = 0.0;
    double tr = 0.0;
    double hs = 0.0;
};

/// t_LB together with the norm whose reciprocal won the max.
struct LowerBound {
    double value = 0.0;
    NormKind selected = NormKind::Op;
};

inline constexpr double kQuadratureTolerance = 1e-8;
inline constexpr int kQuadratureBudget = 100000;
inline constexpr double kFidelitySlack = 1e-10;

/// F = 2 Omega (1 + cos omega t) / (2j + 1)^2 for a given environment factor (j = 1/2).
double fidelity_from_env(double env, double t, const ModelParams& params);
double fidelity_model(double t, const ModelParams& params, NormalizationMode mode = NormalizationMode::InitialUnit);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 for Hermitian PSD inputs.
/// Throws NotHermitian / NotPositive on bad input.
double fidelity_uhlmann(const ReducedDensity& rho_initial, const ReducedDensity& rho_t);

/// B = arccos(F). Inputs within 1e-10 outside [0, 1] are clipped; beyond that
/// OutOfDomain is thrown.
double bures_angle(double F);

Norms norms_at(double t, const ModelParams& params, NormalizationMode mode = NormalizationMode::InitialUnit,
               DerivativeMethod method = DerivativeMethod::Analytic);

/// Quarter of the shortest of 2 pi / omega, 2 pi / beta and 2 pi / gamma.
double seed_panel_width(const ModelParams& params);

/// (1/t) integral_0^t of the three norms, adaptive to 1e-8 absolute on the
/// integral. At t = 0 the integrand value is returned.
Deltas deltas(double t, const ModelParams& params, NormalizationMode mode = NormalizationMode::InitialUnit,
              DerivativeMethod method = DerivativeMethod::Analytic);
double delta_k(double t, const ModelParams& params, NormKind k,
               NormalizationMode mode = NormalizationMode::InitialUnit,
               DerivativeMethod method = DerivativeMethod::Analytic);

/// Deltas at every grid point (ascending, non-negative), integrating interval by
/// interval so that the total absolute error stays below 1e-8.
std::vector<Deltas> cumulative_deltas(std::span<const double> grid, const ModelParams& params,
                                      NormalizationMode mode = NormalizationMode::InitialUnit,
                                      DerivativeMethod method = DerivativeMethod::Analytic);

/// max(1/Delta_op, 1/Delta_tr, 1/Delta_hs) |cos B - 1|. Throws ZeroDenominator
/// when every Delta vanishes.
LowerBound lower_bound(double F, const Deltas& d);

double t_lower_bound(double t, const ModelParams& params, NormalizationMode mode = NormalizationMode::InitialUnit,
                     DerivativeMethod method = DerivativeMethod::Analytic);

QslRecord qsl_record(double t, const ModelParams& params, NormalizationMode mode = NormalizationMode::InitialUnit,
                     DerivativeMethod method = DerivativeMethod::Analytic);

} // namespace qsl
