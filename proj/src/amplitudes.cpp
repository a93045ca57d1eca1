#include "qsl/amplitudes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qsl/errors.hpp"

namespace qsl {

namespace {

constexpr int kLogFactorialSize = kAmplitudeN3Cap + 64;

// The n3 series cancels terms as large as exp(|alpha zeta|) down to results of
// order exp(-(alpha^2 + zeta^2)/2), so kernels and partial sums are carried in
// extended precision.
using real_x = long double;

const std::array<real_x, kLogFactorialSize>& log_factorials()
{
    static const std::array<real_x, kLogFactorialSize> table = [] {
        std::array<real_x, kLogFactorialSize> out{};
        for (int k = 0; k < kLogFactorialSize; ++k)
            out[k] = std::lgamma(static_cast<real_x>(k) + 1.0L);
        return out;
    }();
    return table;
}

// K(a, b; x) = exp(-x^2/2) sum_k (-1)^k x^(a+b-2k) sqrt(a! b!) / (k! (a-k)! (b-k)!)
// together with dK/dx. The single-displacement sums in E_{n,n'} are this kernel:
// the n2 sum is K(n, n3; alpha) and the n4 sum is (-1)^n' K(n3, n'; zeta).
struct Kernel {
    real_x value = 0.0;
    real_x slope = 0.0;
};

Kernel kernel(int a, int b, real_x x)
{
    const auto& lf = log_factorials();
    const real_x log_root = 0.5L * (lf[a] + lf[b]);
    const int kmax = std::min(a, b);

    real_x sum = 0.0;
    real_x dsum = 0.0;
    if (x == 0.0) {
        // Only p = a + b - 2k = 0 survives in the value and p = 1 in the slope.
        for (int k = 0; k <= kmax; ++k) {
            const int p = a + b - 2 * k;
            if (p > 1)
                continue;
            const real_x term = std::exp(log_root - lf[k] - lf[a - k] - lf[b - k]) * ((k % 2) ? -1.0L : 1.0L);
            if (p == 0)
                sum += term;
            else
                dsum += term;
        }
        return {sum, dsum};
    }

    const real_x log_x = std::log(std::abs(x));
    const real_x gauss = -0.5L * x * x;
    const bool negative = x < 0.0L;
    for (int k = 0; k <= kmax; ++k) {
        const int p = a + b - 2 * k;
        real_x term = std::exp(log_root - lf[k] - lf[a - k] - lf[b - k] + p * log_x + gauss);
        if ((k % 2) != (negative && (p % 2) ? 1 : 0))
            term = -term;
        sum += term;
        dsum += term * p / x;
    }
    return {sum, dsum - x * sum};
}

constexpr real_x kTinyArgument = 1e-20L;

// Same kernel from its k = 0 term lead = x^(a+b) exp(-x^2/2) / sqrt(a! b!), using
// term_{k+1} / term_k = -(a - k)(b - k) / ((k + 1) x^2). Needs |x| > kTinyArgument.
Kernel kernel_from_lead(int a, int b, real_x x, real_x lead)
{
    const int kmax = std::min(a, b);
    const real_x x2 = x * x;
    real_x term = lead;
    real_x sum = 0.0L;
    real_x dsum = 0.0L;
    for (int k = 0; k <= kmax; ++k) {
        sum += term;
        dsum += term * static_cast<real_x>(a + b - 2 * k);
        term *= -static_cast<real_x>(a - k) * static_cast<real_x>(b - k) / (static_cast<real_x>(k + 1) * x2);
    }
    return {sum, dsum / x - x * sum};
}

// Kernels K(n, n3; x) for n = 0..dim-1 (or K(n3, n; x), which is the same).
// The leads obey lead(n + 1) = lead(n) x / sqrt(n + 1), so one exponential serves the row.
void kernel_row(int n3, real_x x, std::vector<Kernel>& out)
{
    const int dim = static_cast<int>(out.size());
    if (std::abs(x) <= kTinyArgument) {
        for (int n = 0; n < dim; ++n)
            out[n] = kernel(n, n3, x);
        return;
    }
    const auto& lf = log_factorials();
    real_x lead = std::exp(n3 * std::log(std::abs(x)) - 0.5L * lf[n3] - 0.5L * x * x);
    if (x < 0.0L && (n3 % 2))
        lead = -lead;
    for (int n = 0; n < dim; ++n) {
        out[n] = kernel_from_lead(n, n3, x, lead);
        lead *= x / std::sqrt(static_cast<real_x>(n + 1));
    }
}

// Core evaluator shared by the table and the single-entry paths. `unit_sign`
// is -1 for E (powers of -i) and +1 for the conjugate form E* (powers of i).
AmplitudeTable evaluate(Spin j, double t, const ModelParams& params, bool with_rate, double unit_sign)
{
    params.validate();
    const int dim = params.n_max + 1;
    const AuxFunctions aux = aux_at(t, j, params, AuxForm::Exact);
    const AuxRates rate = aux_rates(t, j, params);
    const real_x alpha = aux.alpha;
    const real_x zeta = aux.zeta;

    // (-i)^(n+n3) (or i^(n+n3)) only rotates each product into the real or the
    // imaginary part, so the sums are accumulated as real arrays.
    const std::size_t cells = static_cast<std::size_t>(dim) * dim;
    std::vector<real_x> re(cells, 0.0L), im(cells, 0.0L);
    std::vector<real_x> dre, dimag;
    if (with_rate) {
        dre.assign(cells, 0.0L);
        dimag.assign(cells, 0.0L);
    }

    // Past this n3 both displaced supports have been passed and contributions
    // decay monotonically, so the small-term stopping test is meaningful.
    const double reach = std::sqrt(static_cast<double>(params.n_max)) + std::max(std::abs(aux.alpha), std::abs(aux.zeta));
    const int guard = static_cast<int>(std::ceil(reach * reach)) + params.n_max + 1;
    // Entries are of order exp(-(alpha^2 + zeta^2)/2) when the two displacements
    // nearly cancel, so the tail test is taken relative to that envelope.
    const double envelope = std::exp(-0.5 * (aux.alpha * aux.alpha + aux.zeta * aux.zeta));
    const double tolerance = kAmplitudeTermTolerance * std::min(1.0, envelope);

    const real_x ra = rate.alpha;
    const real_x rz = rate.zeta;
    std::vector<Kernel> ka(dim), kz(dim);
    int quiet = 0;
    int n3 = 0;
    for (;; ++n3) {
        if (n3 > kAmplitudeN3Cap)
            throw Error(ErrorKind::NonConvergence,
                        "n3 sum did not settle below " + std::to_string(kAmplitudeN3Cap) + " terms at t=" + std::to_string(t));
        real_x max_a = 0.0L, max_b = 0.0L;
        kernel_row(n3, alpha, ka);
        kernel_row(n3, zeta, kz);
        for (int n = 0; n < dim; ++n)
            max_a = std::max(max_a, std::abs(ka[n].value));
        for (int m = 0; m < dim; ++m) {
            if (m % 2) {
                kz[m].value = -kz[m].value;
                kz[m].slope = -kz[m].slope;
            }
            max_b = std::max(max_b, std::abs(kz[m].value));
        }
        for (int n = 0; n < dim; ++n) {
            const int q = (n + n3) % 4;
            // q = 0: +1, q = 1: unit, q = 2: -1, q = 3: -unit.
            const bool imaginary = q % 2;
            const real_x sign = (q == 0 || (q == 1 && unit_sign > 0) || (q == 3 && unit_sign < 0)) ? 1.0L : -1.0L;
            std::vector<real_x>& target = imaginary ? im : re;
            for (int m = 0; m < dim; ++m)
                target[n * dim + m] += sign * ka[n].value * kz[m].value;
            if (with_rate) {
                std::vector<real_x>& dtarget = imaginary ? dimag : dre;
                for (int m = 0; m < dim; ++m)
                    dtarget[n * dim + m] += sign * (ra * ka[n].slope * kz[m].value + rz * ka[n].value * kz[m].slope);
            }
        }

        const double largest = static_cast<double>(max_a * max_b);
        quiet = largest < tolerance ? quiet + 1 : 0;
        if (n3 >= guard && quiet >= 3)
            break;
    }

    // Phase exp(i[theta - beta n t + alpha zeta]) with theta = (gamma/beta)^2 (beta t - sin beta t).
    const double beta = params.beta;
    const double g = aux.gamma;
    const double ratio = g / beta;
    const double theta = ratio * ratio * (beta * t - std::sin(beta * t));
    const double s = std::sin(0.5 * beta * t);
    const double theta_rate = g * ratio * 2.0 * s * s;
    const double common = theta + alpha * zeta;
    const double common_rate = theta_rate + rate.alpha * zeta + alpha * rate.zeta;
    const double conj_sign = -unit_sign; // +1 for E, -1 for E*

    AmplitudeTable table;
    table.j = j;
    table.t = t;
    table.n3_terms = n3 + 1;
    table.value.resize(dim, dim);
    if (with_rate)
        table.rate.resize(dim, dim);
    for (int n = 0; n < dim; ++n) {
        const double phase = conj_sign * (common - beta * n * t);
        const cplx factor = std::polar(1.0, phase);
        for (int m = 0; m < dim; ++m)
            table.value(n, m) = factor * cplx(static_cast<double>(re[n * dim + m]), static_cast<double>(im[n * dim + m]));
        if (with_rate) {
            const cplx phase_rate(0.0, conj_sign * (common_rate - beta * n));
            for (int m = 0; m < dim; ++m)
                table.rate(n, m) = phase_rate * table.value(n, m) +
                                   factor * cplx(static_cast<double>(dre[n * dim + m]), static_cast<double>(dimag[n * dim + m]));
        }
    }
    return table;
}

void check_index(int index, const ModelParams& params, const char* name)
{
    if (index < 0 || index > params.n_max)
        throw Error(ErrorKind::IndexOutOfRange,
                    std::string(name) + "=" + std::to_string(index) + " outside [0, " + std::to_string(params.n_max) + "]");
}

Eigen::VectorXd initial_weights(int dim)
{
    // Coefficients 1/sqrt(n'!) of the environment state.
    const auto& lf = log_factorials();
    Eigen::VectorXd c(dim);
    for (int n = 0; n < dim; ++n)
        c(n) = std::exp(-0.5 * lf[n]);
    return c;
}

struct Retained {
    cplx value;
    cplx rate;
};

Retained retained_square(const AmplitudeTable& table, bool with_rate)
{
    const auto& lf = log_factorials();
    const int dim = static_cast<int>(table.value.rows());
    const Eigen::VectorXcd c = initial_weights(dim).cast<cplx>();
    const Eigen::VectorXcd v = table.value * c;
    Eigen::VectorXcd dv;
    if (with_rate)
        dv = table.rate * c;
    double value = 0.0;
    double rate = 0.0;
    for (int n = 0; n < dim; ++n) {
        const double w = std::exp(-lf[n]);
        value += w * std::norm(v(n));
        if (with_rate)
            rate += 2.0 * w * std::real(std::conj(v(n)) * dv(n));
    }
    return {value, rate};
}

// sum_n (1/n!) (E(j1) c)_n (E(j2)^dagger c)_n and its time derivative.
// E is symmetric (it is a matrix element of exp(-i t H) with real symmetric H),
// so for j1 = j2 the summand is |(E c)_n|^2; that form is used to keep the
// diagonal factor exactly real.
Retained retained_trace(const AmplitudeTable& first, const AmplitudeTable& second, bool with_rate)
{
    if (&first == &second)
        return retained_square(first, with_rate);
    const auto& lf = log_factorials();
    const int dim = static_cast<int>(first.value.rows());
    const Eigen::VectorXcd c = initial_weights(dim).cast<cplx>();
    const Eigen::VectorXcd v1 = first.value * c;
    const Eigen::VectorXcd v2 = second.value.adjoint() * c;

    Retained out{};
    Eigen::VectorXcd dv1, dv2;
    if (with_rate) {
        dv1 = first.rate * c;
        dv2 = second.rate.adjoint() * c;
    }
    for (int n = 0; n < dim; ++n) {
        const double w = std::exp(-lf[n]);
        out.value += w * v1(n) * v2(n);
        if (with_rate)
            out.rate += w * (dv1(n) * v2(n) + v1(n) * dv2(n));
    }
    return out;
}

} // namespace

BosonAmplitude AmplitudeTable::at(int n, int n_prime) const
{
    if (n < 0 || n_prime < 0 || n >= value.rows() || n_prime >= value.cols())
        throw Error(ErrorKind::IndexOutOfRange, "amplitude index outside the table");
    return {n, n_prime, value(n, n_prime)};
}

AmplitudeTable amplitude_table(Spin j, double t, const ModelParams& params, bool with_rate)
{
    return evaluate(j, t, params, with_rate, -1.0);
}

cplx amplitude_E(int n, int n_prime, Spin j, double t, const ModelParams& params)
{
    check_index(n, params, "n");
    check_index(n_prime, params, "n_prime");
    return evaluate(j, t, params, false, -1.0).value(n, n_prime);
}

cplx amplitude_E_conj(int n_dprime, int n, Spin j, double t, const ModelParams& params)
{
    check_index(n_dprime, params, "n_dprime");
    check_index(n, params, "n");
    return evaluate(j, t, params, false, +1.0).value(n_dprime, n);
}

double normalization_N(double t, const ModelParams& params, NormalizationMode mode)
{
    const double at = mode == NormalizationMode::InitialUnit ? 0.0 : t;
    const AmplitudeTable table = amplitude_table(params.j, at, params, false);
    return retained_trace(table, table, false).value.real();
}

EnvFactor env_factor(Spin j1, Spin j2, double t, const ModelParams& params, NormalizationMode mode)
{
    const AmplitudeTable first = amplitude_table(j1, t, params, false);
    const cplx numerator = j2 == j1 ? retained_trace(first, first, false).value
                                    : retained_trace(first, amplitude_table(j2, t, params, false), false).value;

    double norm = 0.0;
    if (mode == NormalizationMode::TotalTrace && j1 == params.j && j2 == params.j)
        norm = numerator.real();
    else
        norm = normalization_N(t, params, mode);
    if (!(norm > 0.0))
        throw Error(ErrorKind::ZeroDenominator, "environment normalization vanished at t=" + std::to_string(t));

    return {j1, j2, t, numerator / norm, norm};
}

EnvFactorWithRate env_factor_with_rate(double t, const ModelParams& params, NormalizationMode mode)
{
    const AmplitudeTable table = amplitude_table(params.j, t, params, true);
    const Retained num = retained_trace(table, table, true);

    EnvFactorWithRate out;
    out.factor.j1 = params.j;
    out.factor.j2 = params.j;
    out.factor.t = t;
    if (mode == NormalizationMode::InitialUnit) {
        const double norm = normalization_N(0.0, params, mode);
        out.factor.normalization = norm;
        out.factor.value = num.value / norm;
        out.rate = num.rate / norm;
    } else {
        const double norm = num.value.real();
        const double norm_rate = num.rate.real();
        if (!(norm > 0.0))
            throw Error(ErrorKind::ZeroDenominator, "retained trace vanished at t=" + std::to_string(t));
        out.factor.normalization = norm;
        out.factor.value = num.value / norm;
        out.rate = (num.rate * norm - num.value * norm_rate) / (norm * norm);
    }
    return out;
}

} // namespace qsl
