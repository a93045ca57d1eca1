#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "qsl/errors.hpp"
#include "qsl/model.hpp"

using namespace qsl;
using doctest::Approx;

namespace {

ErrorKind kind_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an exception");
    return ErrorKind::Io;
}

} // namespace

TEST_CASE("gamma is eta j(j+1)")
{
    CHECK(gamma(spin_half, 1.0) == Approx(0.75));
    CHECK(gamma(spin_half, 0.1) == Approx(0.075));
    CHECK(gamma(spin_half, 0.0) == 0.0);
    CHECK(gamma(Spin::from_twice(3), 1.0) == Approx(3.75));
}

TEST_CASE("spin values")
{
    CHECK(Spin::from_value(0.5) == spin_half);
    CHECK(Spin::from_value(1.5).multiplicity() == 4);
    CHECK(spin_half.casimir() == 0.75);
    CHECK(kind_of([] { (void)Spin::from_value(0.3); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([] { (void)Spin::from_value(-0.5); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("parameter validation")
{
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.beta = 0.0;
    CHECK(kind_of([&] { p.validate(); }) == ErrorKind::InvalidConfig);
    p = {};
    p.eta = -1.0;
    CHECK(kind_of([&] { p.validate(); }) == ErrorKind::InvalidConfig);
    p = {};
    p.n_max = -1;
    CHECK(kind_of([&] { p.validate(); }) == ErrorKind::InvalidConfig);
    p = {};
    p.n_max = 41;
    CHECK(kind_of([&] { p.validate(); }) == ErrorKind::InvalidConfig);
    p = {};
    p.n_max = 5;
    p.fock_dim = 5;
    CHECK(kind_of([&] { p.validate(); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("oracle Fock dimension grows with the displacement")
{
    ModelParams weak;
    CHECK(weak.oracle_fock_dim() >= 40);
    ModelParams strong;
    strong.eta = 5.0;
    strong.n_max = 10;
    CHECK(strong.oracle_fock_dim() > 4 * strong.n_max);
    CHECK(strong.oracle_fock_dim() > std::pow(2 * gamma(spin_half, 5.0) / strong.beta, 2));
    strong.fock_dim = 77;
    CHECK(strong.oracle_fock_dim() == 77);
}

TEST_CASE("mode and method names")
{
    CHECK(parse_normalization_mode("initial-unit") == NormalizationMode::InitialUnit);
    CHECK(parse_normalization_mode("total-trace") == NormalizationMode::TotalTrace);
    CHECK(parse_derivative_method("analytic") == DerivativeMethod::Analytic);
    CHECK(parse_derivative_method("finite-diff") == DerivativeMethod::FiniteDiff);
    CHECK(to_string(NormalizationMode::TotalTrace) == "total-trace");
    CHECK(to_string(DerivativeMethod::FiniteDiff) == "finite-diff");
    CHECK(kind_of([] { (void)parse_normalization_mode("unit"); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([] { (void)parse_derivative_method("numeric"); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("auxiliary functions at t = 0 vanish")
{
    for (AuxForm form : {AuxForm::Exact, AuxForm::Printed}) {
        ModelParams p;
        p.eta = 2.3;
        const AuxFunctions a = aux_at(0.0, p, form);
        CHECK(a.alpha == 0.0);
        CHECK(a.zeta == 0.0);
        CHECK(a.psi == 0.0);
    }
}

TEST_CASE("alpha = gamma sin(beta t)")
{
    ModelParams p;
    p.eta = 1.0;
    CHECK(aux_at(std::numbers::pi / 2, p).alpha == Approx(0.75));
    CHECK(aux_at(std::numbers::pi / 2, p).gamma == Approx(0.75));
}

TEST_CASE("zeta zeros: printed form at 2 pi / gamma, exact form at 2 pi / beta")
{
    ModelParams p;
    p.eta = 1.0;
    const double g = gamma(spin_half, 1.0);
    CHECK(std::abs(aux_at(2 * std::numbers::pi / g, p, AuxForm::Printed).zeta) < 1e-14);
    CHECK(std::abs(aux_at(2 * std::numbers::pi / p.beta, p, AuxForm::Exact).zeta) < 1e-14);
    // The exact form is gamma (1 - cos beta t) / beta.
    CHECK(aux_at(1.3, p).zeta == Approx(g * (1 - std::cos(1.3))).epsilon(1e-14));
}

TEST_CASE("periodicity of alpha and zeta")
{
    ModelParams p;
    p.eta = 0.7;
    p.beta = 1.3;
    const double period = 2 * std::numbers::pi / p.beta;
    for (double t : {0.2, 1.1, 4.0}) {
        CHECK(aux_at(t + period, p).alpha == Approx(aux_at(t, p).alpha).epsilon(1e-12));
        CHECK(aux_at(t + period, p).zeta == Approx(aux_at(t, p).zeta).epsilon(1e-12));
    }
    const double printed_period = 2 * std::numbers::pi / gamma(spin_half, p.eta);
    CHECK(aux_at(0.9 + printed_period, p, AuxForm::Printed).zeta ==
          Approx(aux_at(0.9, p, AuxForm::Printed).zeta).epsilon(1e-12));
}

TEST_CASE("psi never becomes positive")
{
    ModelParams p;
    p.eta = 5.0;
    for (int k = 0; k <= 200; ++k)
        CHECK(aux_at(0.1 * k, p).psi <= 0.0);
}

TEST_CASE("zero coupling: printed form falls back, raw form throws")
{
    ModelParams p;
    p.eta = 0.0;
    CHECK(aux_at(1.0, p, AuxForm::Printed).zeta == 0.0);
    CHECK(kind_of([&] { (void)aux_at(1.0, p, AuxForm::PrintedRaw); }) == ErrorKind::DegenerateCoupling);
}

TEST_CASE("aux rates match central differences")
{
    ModelParams p;
    p.eta = 1.7;
    p.beta = 0.8;
    const double h = 1e-5;
    for (double t : {0.3, 1.0, 2.5, 7.0}) {
        const AuxRates r = aux_rates(t, spin_half, p);
        const AuxFunctions up = aux_at(t + h, p);
        const AuxFunctions dn = aux_at(t - h, p);
        CHECK(r.alpha == Approx((up.alpha - dn.alpha) / (2 * h)).epsilon(1e-7));
        CHECK(r.zeta == Approx((up.zeta - dn.zeta) / (2 * h)).epsilon(1e-7));
        CHECK(r.psi == Approx((up.psi - dn.psi) / (2 * h)).epsilon(1e-7));
    }
}
