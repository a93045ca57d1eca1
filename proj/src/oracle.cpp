#include "qsl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsl/amplitudes.hpp"
#include "qsl/errors.hpp"

namespace qsl {

namespace {

Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b)
{
    return a * b - b * a;
}

} // namespace

FullHamiltonian build_hamiltonian(const ModelParams& params)
{
    return build_hamiltonian(params, params.oracle_fock_dim());
}

FullHamiltonian build_hamiltonian(const ModelParams& params, int fock_dim)
{
    params.validate();
    if (fock_dim <= params.n_max)
        throw Error(ErrorKind::InvalidConfig, "fock_dim must exceed n_max");

    FullHamiltonian h;
    h.spin_dim = params.j.multiplicity();
    h.fock_dim = fock_dim;
    const int dim = h.dim();
    h.system_env = Eigen::MatrixXd::Zero(dim, dim);
    h.coupling = Eigen::MatrixXd::Zero(dim, dim);

    const std::vector<double> ms = m_basis(params.j);
    const double casimir = params.j.casimir();
    for (int s = 0; s < h.spin_dim; ++s) {
        const int base = s * fock_dim;
        for (int n = 0; n < fock_dim; ++n) {
            h.system_env(base + n, base + n) = params.omega * ms[s] + params.beta * n;
            if (n + 1 < fock_dim) {
                const double hop = params.eta * casimir * std::sqrt(static_cast<double>(n + 1));
                h.coupling(base + n + 1, base + n) = hop;
                h.coupling(base + n, base + n + 1) = hop;
            }
        }
    }
    h.matrix = h.system_env + h.coupling;
    return h;
}

OracleState initial_state(const ModelParams& params, int fock_dim)
{
    OracleState state;
    state.spin_dim = params.j.multiplicity();
    state.fock_dim = fock_dim;
    state.vector = Eigen::VectorXcd::Zero(state.spin_dim * fock_dim);
    for (int s = 0; s < state.spin_dim; ++s)
        for (int n = 0; n <= params.n_max; ++n)
            state.vector(s * fock_dim + n) = std::exp(-0.5 * std::lgamma(n + 1.0));
    state.vector.normalize();
    return state;
}

SpectralPropagator::SpectralPropagator(const FullHamiltonian& h)
    : spin_dim_(h.spin_dim)
    , fock_dim_(h.fock_dim)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::DiagonalizationFailure, "Hamiltonian eigensolver failed");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

OracleState SpectralPropagator::propagate(const OracleState& state, double t) const
{
    Eigen::VectorXcd coeffs = vectors_.transpose().cast<cplx>() * state.vector;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
        coeffs(k) *= std::polar(1.0, -energies_(k) * t);
    OracleState out = state;
    out.t = state.t + t;
    out.vector = vectors_.cast<cplx>() * coeffs;
    return out;
}

Eigen::MatrixXcd SpectralPropagator::unitary(double t) const
{
    Eigen::VectorXcd phases(energies_.size());
    for (Eigen::Index k = 0; k < energies_.size(); ++k)
        phases(k) = std::polar(1.0, -energies_(k) * t);
    const Eigen::MatrixXcd v = vectors_.cast<cplx>();
    return v * phases.asDiagonal() * v.adjoint();
}

OracleState propagate(const OracleState& state, double t, const FullHamiltonian& h)
{
    return SpectralPropagator(h).propagate(state, t);
}

Eigen::MatrixXcd partial_trace_env(const OracleState& state)
{
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(state.spin_dim, state.spin_dim);
    for (int a = 0; a < state.spin_dim; ++a)
        for (int b = 0; b < state.spin_dim; ++b)
            for (int n = 0; n < state.fock_dim; ++n)
                rho(a, b) += state.vector(a * state.fock_dim + n) * std::conj(state.vector(b * state.fock_dim + n));
    return rho;
}

Eigen::MatrixXcd retained_partial_trace(const OracleState& state, int n_max)
{
    const int top = std::min(n_max, state.fock_dim - 1);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(state.spin_dim, state.spin_dim);
    for (int n = 0; n <= top; ++n) {
        const double w = std::exp(-std::lgamma(n + 1.0));
        for (int a = 0; a < state.spin_dim; ++a)
            for (int b = 0; b < state.spin_dim; ++b)
                rho(a, b) += w * state.vector(a * state.fock_dim + n) * std::conj(state.vector(b * state.fock_dim + n));
    }
    return rho;
}

ExactOracle::ExactOracle(const ModelParams& params)
    : ExactOracle(params, params.oracle_fock_dim())
{
}

ExactOracle::ExactOracle(const ModelParams& params, int fock_dim)
    : params_(params)
    , hamiltonian_(build_hamiltonian(params, fock_dim))
    , propagator_(hamiltonian_)
    , initial_(initial_state(params, fock_dim))
    , initial_retained_(retained_partial_trace(initial_, params.n_max).trace().real())
{
}

OracleState ExactOracle::state(double t) const
{
    return propagator_.propagate(initial_, t);
}

ReducedDensity ExactOracle::rho_S(double t, NormalizationMode mode) const
{
    const Eigen::MatrixXcd retained = retained_partial_trace(state(t), params_.n_max);
    const double norm = mode == NormalizationMode::InitialUnit ? initial_retained_ : retained.trace().real();
    if (!(norm > 0.0))
        throw Error(ErrorKind::ZeroDenominator, "retained environment trace vanished at t=" + std::to_string(t));
    return {t, m_basis(params_.j), retained / norm};
}

double oracle_deviation(const ModelParams& params, NormalizationMode mode, double t_max, int points)
{
    const ExactOracle oracle(params);
    double worst = 0.0;
    for (int k = 0; k < points; ++k) {
        const double t = points > 1 ? t_max * k / (points - 1) : 0.0;
        const Eigen::MatrixXcd diff = qsl::rho_S(t, params, mode).matrix - oracle.rho_S(t, mode).matrix;
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    return worst;
}

ZassenhausParts zassenhaus_parts(const FullHamiltonian& h, double t)
{
    const cplx factor(0.0, -t);
    return {factor * h.system_env.cast<cplx>(), factor * h.coupling.cast<cplx>()};
}

Eigen::MatrixXcd exp_anti_hermitian(const Eigen::MatrixXcd& a)
{
    const cplx i(0.0, 1.0);
    Eigen::MatrixXcd k = i * a;
    k = 0.5 * (k + k.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k);
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::DiagonalizationFailure, "exponent eigensolver failed");
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index n = 0; n < phases.size(); ++n)
        phases(n) = std::polar(1.0, -es.eigenvalues()(n));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd zassenhaus_propagator(const ZassenhausParts& parts, int order)
{
    if (order < 2 || order > 4)
        throw Error(ErrorKind::InvalidConfig, "Zassenhaus order must be 2, 3 or 4");
    const Eigen::MatrixXcd& x = parts.x;
    const Eigen::MatrixXcd& y = parts.y;

    const Eigen::MatrixXcd c2 = commutator(x, y);
    Eigen::MatrixXcd product = exp_anti_hermitian(x) * exp_anti_hermitian(y) * exp_anti_hermitian(-0.5 * c2);
    if (order >= 3) {
        const Eigen::MatrixXcd c2y = commutator(c2, y);
        const Eigen::MatrixXcd c2x = commutator(c2, x);
        const Eigen::MatrixXcd c3 = 2.0 * c2y + c2x;
        product = product * exp_anti_hermitian(-c3 / 6.0);
        if (order == 4) {
            const Eigen::MatrixXcd c4 = commutator(c2x, x) + 3.0 * commutator(c2x, y) + 3.0 * commutator(c2y, y);
            product = product * exp_anti_hermitian(-c4 / 24.0);
        }
    }
    return product;
}

} // namespace qsl
