#pragma once

#include <string>

namespace qsl {

/// Half-integer spin quantum number, stored as 2j so that equality is exact.
class Spin {
public:
    constexpr Spin() = default;

    static constexpr Spin from_twice(int two_j) { return Spin(two_j); }
    /// Throws InvalidConfig unless `j` is a non-negative multiple of 1/2.
    static Spin from_value(double j);

    [[nodiscard]] constexpr int twice() const { return two_j_; }
    [[nodiscard]] constexpr double value() const { return 0.5 * two_j_; }
    [[nodiscard]] constexpr int multiplicity() const { return two_j_ + 1; }
    /// Eigenvalue j(j+1) of J^2.
    [[nodiscard]] constexpr double casimir() const { return value() * (value() + 1.0); }

    friend constexpr bool operator==(Spin, Spin) = default;

private:
    constexpr explicit Spin(int two_j) : two_j_(two_j) {}

    int two_j_ = 1;
};

inline constexpr Spin spin_half = Spin::from_twice(1);

/// How the environment factor is normalized.
///  - InitialUnit: N(t) = N(0), so the factor starts at 1 and then decays with the
///    weight leaving the retained occupations n <= n_max.
///  - TotalTrace: N(t) is the retained trace at time t, so the factor stays at 1.
enum class NormalizationMode { InitialUnit, TotalTrace };

enum class DerivativeMethod { Analytic, FiniteDiff };

/// Which closed form of the auxiliary functions to evaluate.
///  - Exact: zeta = gamma (1 - cos beta t) / beta, the displacement that the
///    propagator of beta b^+b + gamma (b^+ + b) actually produces.
///  - Printed: zeta = beta (1 - cos gamma t) / gamma with the beta <-> gamma swap of
///    the published appendix. eta = 0 falls back to the analytic limit.
///  - PrintedRaw: as Printed, but eta = 0 throws DegenerateCoupling.
enum class AuxForm { Exact, Printed, PrintedRaw };

std::string to_string(NormalizationMode mode);
std::string to_string(DerivativeMethod method);
NormalizationMode parse_normalization_mode(const std::string& text);
DerivativeMethod parse_derivative_method(const std::string& text);

struct ModelParams {
    double omega = 1.0;
    double beta = 1.0;
    double eta = 0.1;
    Spin j = spin_half;
    int n_max = 0;
    /// Oracle Fock truncation; 0 selects default_fock_dim().
    int fock_dim = 0;

    /// Throws InvalidConfig when an invariant is broken.
    void validate() const;

    /// fock_dim if set, otherwise a dimension large enough for the coherent
    /// displacement 2 gamma / beta reached by the coupled oscillator.
    [[nodiscard]] int oracle_fock_dim() const;
};

/// gamma(j) = eta j (j + 1).
double gamma(Spin j, double eta);

struct AuxFunctions {
    double alpha = 0.0;
    double zeta = 0.0;
    double gamma = 0.0;
    double psi = 0.0;
};

/// Time derivatives of alpha, zeta and psi.
struct AuxRates {
    double alpha = 0.0;
    double zeta = 0.0;
    double psi = 0.0;
};

AuxFunctions aux_at(double t, const ModelParams& params, AuxForm form = AuxForm::Exact);
AuxFunctions aux_at(double t, Spin j, const ModelParams& params, AuxForm form = AuxForm::Exact);

/// Closed-form derivatives of the Exact auxiliary functions.
AuxRates aux_rates(double t, Spin j, const ModelParams& params);

} // namespace qsl
