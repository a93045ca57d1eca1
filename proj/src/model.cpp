#include "qsl/model.hpp"

#include <algorithm>
#include <cmath>

#include "qsl/errors.hpp"

namespace qsl {

Spin Spin::from_value(double j)
{
    const double twice = 2.0 * j;
    const double rounded = std::round(twice);
    if (!(j >= 0.0) || std::abs(twice - rounded) > 1e-12 || rounded > 1e6)
        throw Error(ErrorKind::InvalidConfig, "spin must be a non-negative half-integer, got " + std::to_string(j));
    return Spin(static_cast<int>(rounded));
}

std::string to_string(NormalizationMode mode)
{
    return mode == NormalizationMode::InitialUnit ? "initial-unit" : "total-trace";
}

std::string to_string(DerivativeMethod method)
{
    return method == DerivativeMethod::Analytic ? "analytic" : "finite-diff";
}

NormalizationMode parse_normalization_mode(const std::string& text)
{
    if (text == "initial-unit")
        return NormalizationMode::InitialUnit;
    if (text == "total-trace")
        return NormalizationMode::TotalTrace;
    throw Error(ErrorKind::InvalidConfig, "unknown normalization mode '" + text + "'");
}

DerivativeMethod parse_derivative_method(const std::string& text)
{
    if (text == "analytic")
        return DerivativeMethod::Analytic;
    if (text == "finite-diff")
        return DerivativeMethod::FiniteDiff;
    throw Error(ErrorKind::InvalidConfig, "unknown derivative method '" + text + "'");
}

void ModelParams::validate() const
{
    if (!std::isfinite(omega))
        throw Error(ErrorKind::InvalidConfig, "omega must be finite");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw Error(ErrorKind::InvalidConfig, "beta must be positive");
    if (!(eta >= 0.0) || !std::isfinite(eta))
        throw Error(ErrorKind::InvalidConfig, "eta must be non-negative");
    if (j.twice() < 1)
        throw Error(ErrorKind::InvalidConfig, "spin j must be at least 1/2");
    if (n_max < 0)
        throw Error(ErrorKind::InvalidConfig, "n_max must be non-negative");
    if (n_max > 40)
        throw Error(ErrorKind::InvalidConfig, "n_max above 40 is not supported");
    if (fock_dim != 0 && fock_dim <= n_max)
        throw Error(ErrorKind::InvalidConfig, "fock_dim must exceed n_max");
}

int ModelParams::oracle_fock_dim() const
{
    if (fock_dim > 0)
        return fock_dim;
    // Radius (in sqrt(n) units) of the displaced initial state plus one.
    const double reach = 2.0 * qsl::gamma(j, eta) / beta + std::sqrt(static_cast<double>(n_max)) + 1.0;
    const int covering = static_cast<int>(std::ceil(reach * reach + 9.0 * reach + 20.0));
    return std::max({40, 4 * n_max, covering});
}

double gamma(Spin j, double eta)
{
    return eta * j.casimir();
}

AuxFunctions aux_at(double t, const ModelParams& params, AuxForm form)
{
    return aux_at(t, params.j, params, form);
}

AuxFunctions aux_at(double t, Spin j, const ModelParams& params, AuxForm form)
{
    if (!(params.beta > 0.0))
        throw Error(ErrorKind::InvalidConfig, "beta must be positive");
    const double beta = params.beta;
    const double g = gamma(j, params.eta);

    AuxFunctions aux;
    aux.gamma = g;
    aux.alpha = g * std::sin(beta * t) / beta;

    switch (form) {
    case AuxForm::Exact: {
        // 1 - cos x written as 2 sin^2(x/2) to keep small-t accuracy.
        const double s = std::sin(0.5 * beta * t);
        aux.zeta = 2.0 * g * s * s / beta;
        break;
    }
    case AuxForm::Printed:
    case AuxForm::PrintedRaw: {
        if (g == 0.0) {
            if (form == AuxForm::PrintedRaw)
                throw Error(ErrorKind::DegenerateCoupling, "zeta = beta (1 - cos gamma t) / gamma with gamma = 0");
            aux.zeta = 0.0;
        } else {
            const double s = std::sin(0.5 * g * t);
            aux.zeta = 2.0 * beta * s * s / g;
        }
        break;
    }
    }

    aux.psi = -0.5 * (aux.alpha * aux.alpha + aux.zeta * aux.zeta);
    return aux;
}

AuxRates aux_rates(double t, Spin j, const ModelParams& params)
{
    const double beta = params.beta;
    const double g = gamma(j, params.eta);
    const AuxFunctions aux = aux_at(t, j, params, AuxForm::Exact);

    AuxRates rate;
    rate.alpha = g * std::cos(beta * t);
    rate.zeta = g * std::sin(beta * t);
    rate.psi = -(aux.alpha * rate.alpha + aux.zeta * rate.zeta);
    return rate;
}

} // namespace qsl
