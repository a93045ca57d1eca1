#include "qsl/reduced_density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "qsl/errors.hpp"

namespace qsl {

namespace {

void require_spin_half(const ModelParams& params)
{
    if (params.j != spin_half)
        throw Error(ErrorKind::InvalidConfig, "derivative and norms are defined for j = 1/2 only");
}

double max_abs(const Eigen::Matrix2cd& m)
{
    return m.cwiseAbs().maxCoeff();
}

// Ridders' method: a Neville tableau of difference quotients at steps h / 1.4^i.
// Central quotients have an even error series (ratio 1.4^2 per level), forward
// quotients a full one (ratio 1.4).
Eigen::Matrix2cd ridders(double t, double h, bool forward, const ModelParams& params, NormalizationMode mode)
{
    constexpr int kTable = 12;
    constexpr double kShrink = 1.4;
    constexpr double kSafe = 2.0;

    auto f = [&](double x) -> Eigen::Matrix2cd { return rho_S(x, params, mode).matrix; };
    const Eigen::Matrix2cd f0 = forward ? f(t) : Eigen::Matrix2cd::Zero();
    auto quotient = [&](double step) -> Eigen::Matrix2cd {
        if (forward)
            return (f(t + step) - f0) / step;
        return (f(t + step) - f(t - step)) / (2.0 * step);
    };

    const double ratio = forward ? kShrink : kShrink * kShrink;
    std::array<std::array<Eigen::Matrix2cd, kTable>, kTable> a;
    double step = h;
    a[0][0] = quotient(step);
    Eigen::Matrix2cd best = a[0][0];
    double err = std::numeric_limits<double>::max();
    for (int i = 1; i < kTable; ++i) {
        step /= kShrink;
        a[0][i] = quotient(step);
        double fac = ratio;
        for (int k = 1; k <= i; ++k) {
            a[k][i] = (a[k - 1][i] * fac - a[k - 1][i - 1]) / (fac - 1.0);
            fac *= ratio;
            const double e = std::max(max_abs(a[k][i] - a[k - 1][i]), max_abs(a[k][i] - a[k - 1][i - 1]));
            if (e <= err) {
                err = e;
                best = a[k][i];
            }
        }
        if (max_abs(a[i][i] - a[i - 1][i - 1]) >= kSafe * err)
            break;
    }

    const double fscale = (forward ? f0 : f(t)).cwiseAbs().maxCoeff();
    const double scale = std::max({max_abs(best), 1e-6 * fscale, std::numeric_limits<double>::min()});
    if (err > 1e-8 * scale)
    {
        char detail[96];
        std::snprintf(detail, sizeof detail, " (relative error estimate %.3g)", err / scale);
        throw Error(ErrorKind::StepUnderflow, "finite-difference extrapolation stalled at t=" + std::to_string(t) + detail);
    }
    return best;
}

} // namespace

std::vector<double> m_basis(Spin j)
{
    std::vector<double> out;
    out.reserve(j.multiplicity());
    for (int k = 0; k < j.multiplicity(); ++k)
        out.push_back(j.value() - k);
    return out;
}

Eigen::MatrixXcd rho_from_env(double t, const ModelParams& params, cplx env)
{
    const std::vector<double> ms = m_basis(params.j);
    const int dim = params.j.multiplicity();
    Eigen::MatrixXcd rho(dim, dim);
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            rho(a, b) = std::polar(1.0, -params.omega * (ms[a] - ms[b]) * t) * env / static_cast<double>(dim);
    return rho;
}

ReducedDensity rho_S(double t, const ModelParams& params, NormalizationMode mode)
{
    const EnvFactor env = env_factor(params.j, params.j, t, params, mode);
    return {t, m_basis(params.j), rho_from_env(t, params, env.value)};
}

double hermiticity_defect(const Eigen::MatrixXcd& m)
{
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DerivativeMatrix drho_dt(double t, const ModelParams& params, DerivativeMethod method, NormalizationMode mode)
{
    require_spin_half(params);
    DerivativeMatrix d;
    d.t = t;

    if (method == DerivativeMethod::Analytic) {
        const EnvFactorWithRate env = env_factor_with_rate(t, params, mode);
        const std::vector<double> ms = m_basis(params.j);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const double freq = params.omega * (ms[a] - ms[b]);
                const cplx phase = std::polar(1.0, -freq * t);
                d.matrix(a, b) = 0.5 * phase * (env.rate + cplx(0.0, -freq) * env.factor.value);
            }
        }
    } else {
        // gamma^2 / beta is the rate of the Gaussian decay exponent of the coherence.
        const double g = gamma(params.j, params.eta);
        const double fastest = std::max({1.0, std::abs(params.omega), params.beta, g, g * g / params.beta});
        const double h = 0.2 / fastest;
        d.matrix = ridders(t, h, t < h, params, mode);
    }

    const auto [l1, l2] = eigenvalues_2x2(d.matrix);
    d.eigenvalues = {l1, l2};
    return d;
}

std::pair<double, double> eigenvalues_2x2(const Eigen::Matrix2cd& m)
{
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (hermiticity_defect(m) > kHermitianTolerance * scale)
        throw Error(ErrorKind::NotHermitian, "2x2 eigenvalue solver needs a Hermitian matrix");

    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), std::abs(0.5 * (m(0, 1) + std::conj(m(1, 0)))));
    return {mean + radius, mean - radius};
}

Norms norms_from_eigenvalues(double l1, double l2)
{
    const double a1 = std::abs(l1);
    const double a2 = std::abs(l2);
    return {std::max(a1, a2), a1 + a2, std::hypot(a1, a2)};
}

Norms norms(const DerivativeMatrix& d)
{
    return norms_from_eigenvalues(d.eigenvalues[0], d.eigenvalues[1]);
}

} // namespace qsl
