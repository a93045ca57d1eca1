#include "qsl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "qsl/errors.hpp"
#include "qsl/quadrature.hpp"

namespace qsl {

namespace {

constexpr double kPsdTolerance = 1e-10;

void require_spin_half(const ModelParams& params)
{
    if (params.j != spin_half)
        throw Error(ErrorKind::InvalidConfig, "speed-limit metrics are defined for j = 1/2 only");
}

// Eigen-decomposition of a Hermitian PSD matrix with tiny negative
// eigenvalues clipped to zero.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> psd_decompose(const Eigen::MatrixXcd& m, const char* name)
{
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (hermiticity_defect(m) > kHermitianTolerance * scale)
        throw Error(ErrorKind::NotHermitian, std::string(name) + " is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::DiagonalizationFailure, std::string(name) + " eigensolver failed");
    if (es.eigenvalues().minCoeff() < -kPsdTolerance)
        throw Error(ErrorKind::NotPositive, std::string(name) + " has a negative eigenvalue");
    return es;
}

QuadValue<3> norm_triplet(double t, const ModelParams& params, NormalizationMode mode, DerivativeMethod method)
{
    const Norms n = norms_at(t, params, mode, method);
    return {n.op, n.tr, n.hs};
}

} // namespace

double fidelity_from_env(double env, double t, const ModelParams& params)
{
    const double dim = params.j.multiplicity();
    return 2.0 * env * (1.0 + std::cos(params.omega * t)) / (dim * dim);
}

double fidelity_model(double t, const ModelParams& params, NormalizationMode mode)
{
    require_spin_half(params);
    return fidelity_from_env(env_factor(params.j, params.j, t, params, mode).value.real(), t, params);
}

double fidelity_uhlmann(const ReducedDensity& rho_initial, const ReducedDensity& rho_t)
{
    if (rho_initial.matrix.rows() != rho_t.matrix.rows())
        throw Error(ErrorKind::InvalidConfig, "fidelity of matrices with different dimensions");

    const auto first = psd_decompose(rho_initial.matrix, "initial density");
    psd_decompose(rho_t.matrix, "evolved density");

    const Eigen::VectorXd root = first.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXcd sqrt_rho = first.eigenvectors() * root.asDiagonal() * first.eigenvectors().adjoint();
    Eigen::MatrixXcd inner = sqrt_rho * rho_t.matrix * sqrt_rho;
    inner = 0.5 * (inner + inner.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(inner, Eigen::EigenvaluesOnly);
    double trace = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
        trace += std::sqrt(std::max(0.0, es.eigenvalues()(k)));
    return trace * trace;
}

double bures_angle(double F)
{
    if (!(F >= -kFidelitySlack && F <= 1.0 + kFidelitySlack))
        throw Error(ErrorKind::OutOfDomain, "fidelity " + std::to_string(F) + " outside [0, 1]");
    return std::acos(std::clamp(F, 0.0, 1.0));
}

Norms norms_at(double t, const ModelParams& params, NormalizationMode mode, DerivativeMethod method)
{
    return norms(drho_dt(t, params, method, mode));
}

double seed_panel_width(const ModelParams& params)
{
    double fastest = std::max(std::abs(params.omega), params.beta);
    fastest = std::max(fastest, gamma(params.j, params.eta));
    if (!(fastest > 0.0))
        return std::numeric_limits<double>::infinity();
    return 0.25 * 2.0 * std::numbers::pi / fastest;
}

Deltas deltas(double t, const ModelParams& params, NormalizationMode mode, DerivativeMethod method)
{
    require_spin_half(params);
    if (t < 0.0)
        throw Error(ErrorKind::OutOfDomain, "time must be non-negative");
    if (t == 0.0) {
        const Norms n = norms_at(0.0, params, mode, method);
        return {n.op, n.tr, n.hs};
    }
    auto f = [&](double x) { return norm_triplet(x, params, mode, method); };
    const auto r = integrate_adaptive<3>(f, 0.0, t, kQuadratureTolerance, kQuadratureBudget, seed_panel_width(params));
    return {r.value[0] / t, r.value[1] / t, r.value[2] / t};
}

double delta_k(double t, const ModelParams& params, NormKind k, NormalizationMode mode, DerivativeMethod method)
{
    const Deltas d = deltas(t, params, mode, method);
    switch (k) {
    case NormKind::Op: return d.op;
    case NormKind::Tr: return d.tr;
    case NormKind::Hs: return d.hs;
    }
    return d.op;
}

std::vector<Deltas> cumulative_deltas(std::span<const double> grid, const ModelParams& params, NormalizationMode mode,
                                      DerivativeMethod method)
{
    require_spin_half(params);
    std::vector<Deltas> out;
    out.reserve(grid.size());
    if (grid.empty())
        return out;
    if (grid.front() < 0.0 || !std::is_sorted(grid.begin(), grid.end()))
        throw Error(ErrorKind::InvalidConfig, "time grid must be ascending and non-negative");

    auto f = [&](double x) { return norm_triplet(x, params, mode, method); };
    const double span = grid.back();
    const double seed = seed_panel_width(params);

    // The first interval starts at t = 0 even when the grid does not.
    QuadValue<3> running{};
    double previous = 0.0;
    int budget = kQuadratureBudget;
    for (double t : grid) {
        if (t > previous) {
            const double tol = kQuadratureTolerance * (t - previous) / span;
            const auto r = integrate_adaptive<3>(f, previous, t, tol, budget, seed);
            budget -= r.evaluations;
            for (int c = 0; c < 3; ++c)
                running[c] += r.value[c];
            previous = t;
        }
        if (t == 0.0) {
            const Norms n = norms_at(0.0, params, mode, method);
            out.push_back({n.op, n.tr, n.hs});
        } else {
            out.push_back({running[0] / t, running[1] / t, running[2] / t});
        }
    }
    return out;
}

LowerBound lower_bound(double F, const Deltas& d)
{
    if (d.op == 0.0 && d.tr == 0.0 && d.hs == 0.0)
        throw Error(ErrorKind::ZeroDenominator, "all averaged energies vanish");
    const double numerator = std::abs(std::cos(bures_angle(F)) - 1.0);

    auto reciprocal = [](double x) { return x > 0.0 ? 1.0 / x : std::numeric_limits<double>::infinity(); };
    LowerBound out{reciprocal(d.op), NormKind::Op};
    if (reciprocal(d.tr) > out.value)
        out = {reciprocal(d.tr), NormKind::Tr};
    if (reciprocal(d.hs) > out.value)
        out = {reciprocal(d.hs), NormKind::Hs};
    out.value = numerator == 0.0 ? 0.0 : out.value * numerator;
    return out;
}

double t_lower_bound(double t, const ModelParams& params, NormalizationMode mode, DerivativeMethod method)
{
    if (t == 0.0)
        return 0.0;
    return lower_bound(fidelity_model(t, params, mode), deltas(t, params, mode, method)).value;
}

QslRecord qsl_record(double t, const ModelParams& params, NormalizationMode mode, DerivativeMethod method)
{
    QslRecord r;
    r.t = t;
    r.F = fidelity_model(t, params, mode);
    r.B = bures_angle(r.F);
    const Deltas d = deltas(t, params, mode, method);
    r.delta_op = d.op;
    r.delta_tr = d.tr;
    r.delta_hs = d.hs;
    r.t_lb = t == 0.0 ? 0.0 : lower_bound(r.F, d).value;
    return r;
}

} // namespace qsl
