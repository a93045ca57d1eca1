#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "qsl/errors.hpp"
#include "qsl/reduced_density.hpp"

using namespace qsl;
using doctest::Approx;

namespace {

ModelParams make(double eta, int n_max)
{
    ModelParams p;
    p.eta = eta;
    p.n_max = n_max;
    return p;
}

const cplx I(0.0, 1.0);

} // namespace

TEST_CASE("basis ordering")
{
    CHECK(m_basis(spin_half) == std::vector<double>{0.5, -0.5});
    CHECK(m_basis(Spin::from_twice(2)) == std::vector<double>{1.0, 0.0, -1.0});
}

TEST_CASE("initial reduced density is the equal-superposition projector")
{
    for (double eta : {0.1, 1.0, 5.0}) {
        const ReducedDensity r = rho_S(0.0, make(eta, 5));
        CHECK((r.matrix - Eigen::MatrixXcd::Constant(2, 2, 0.5)).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("free rotation at zero coupling")
{
    const ModelParams p = make(0.0, 3);
    for (double t : {0.4, 2.0, 7.5}) {
        const ReducedDensity r = rho_S(t, p);
        CHECK(std::abs(r.matrix(0, 0) - 0.5) < 1e-14);
        CHECK(std::abs(r.matrix(1, 1) - 0.5) < 1e-14);
        CHECK(std::abs(r.matrix(0, 1) - std::exp(-I * t) / 2.0) < 1e-14);
        CHECK(std::abs(r.matrix(1, 0) - std::exp(I * t) / 2.0) < 1e-14);

        const DerivativeMatrix d = drho_dt(t, p);
        CHECK(std::abs(d.matrix(0, 0)) < 1e-14);
        CHECK(std::abs(d.matrix(0, 1) - (-I) * std::exp(-I * t) / 2.0) < 1e-14);
        CHECK(d.eigenvalues[0] == Approx(0.5));
        CHECK(d.eigenvalues[1] == Approx(-0.5));
    }
    const DerivativeMatrix d0 = drho_dt(0.0, p);
    CHECK(std::abs(d0.eigenvalues[0]) == Approx(0.5));
    CHECK(std::abs(d0.eigenvalues[1]) == Approx(0.5));
}

TEST_CASE("weak coupling coherence at t = 1")
{
    const ReducedDensity r = rho_S(1.0, make(0.1, 0));
    CHECK(std::abs(r.matrix(0, 1)) < 0.5);
    CHECK(std::abs(r.matrix(0, 1)) > 0.49);
}

TEST_CASE("reduced density stays Hermitian")
{
    for (double eta : {0.1, 1.0, 5.0})
        for (int k = 0; k <= 50; ++k)
            CHECK(hermiticity_defect(rho_S(0.4 * k, make(eta, 5)).matrix) < 1e-14);
}

TEST_CASE("analytic and finite-difference derivatives agree")
{
    for (double eta : {0.1, 1.0, 5.0}) {
        for (int n_max : {0, 5}) {
            for (NormalizationMode mode : {NormalizationMode::InitialUnit, NormalizationMode::TotalTrace}) {
                for (double t : {0.0, 1e-3, 1.3, 6.1}) {
                    const ModelParams p = make(eta, n_max);
                    const auto a = drho_dt(t, p, DerivativeMethod::Analytic, mode).matrix;
                    const auto f = drho_dt(t, p, DerivativeMethod::FiniteDiff, mode).matrix;
                    CAPTURE(eta);
                    CAPTURE(t);
                    CHECK((a - f).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1e-300, a.cwiseAbs().maxCoeff()));
                }
            }
        }
    }
}

TEST_CASE("derivative needs spin 1/2")
{
    ModelParams p = make(1.0, 0);
    p.j = Spin::from_twice(3);
    try {
        (void)drho_dt(1.0, p);
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidConfig);
    }
    CHECK(rho_S(0.0, p).matrix.rows() == 4);
}

TEST_CASE("2x2 eigenvalues")
{
    Eigen::Matrix2cd diag;
    diag << 0.3, 0.0, 0.0, -0.4;
    auto [a, b] = eigenvalues_2x2(diag);
    CHECK(a == Approx(0.3));
    CHECK(b == Approx(-0.4));

    Eigen::Matrix2cd off;
    const cplx c = 0.5 * std::exp(I * 0.7);
    off << 0.0, c, std::conj(c), 0.0;
    std::tie(a, b) = eigenvalues_2x2(off);
    CHECK(a == Approx(0.5));
    CHECK(b == Approx(-0.5));

    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    for (int k = 0; k < 200; ++k) {
        Eigen::Matrix2cd m;
        const cplx z(g(rng), g(rng));
        m << g(rng), z, std::conj(z), g(rng);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
        std::tie(a, b) = eigenvalues_2x2(m);
        CHECK(std::abs(a - es.eigenvalues()(1)) < 1e-12);
        CHECK(std::abs(b - es.eigenvalues()(0)) < 1e-12);
    }

    Eigen::Matrix2cd bad;
    bad << 0.0, 1.0, 0.0, 0.0;
    try {
        (void)eigenvalues_2x2(bad);
        FAIL("no exception");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotHermitian);
    }
}

TEST_CASE("norms from eigenvalues")
{
    Norms n = norms_from_eigenvalues(0.3, -0.4);
    CHECK(n.op == Approx(0.4));
    CHECK(n.tr == Approx(0.7));
    CHECK(n.hs == Approx(0.5));
    n = norms_from_eigenvalues(0.0, 0.0);
    CHECK(n.op == 0.0);
    CHECK(n.tr == 0.0);
    CHECK(n.hs == 0.0);
    n = norms_from_eigenvalues(0.5, -0.5);
    CHECK(n.op == Approx(0.5));
    CHECK(n.tr == Approx(1.0));
    CHECK(n.hs == Approx(std::sqrt(0.5)));
}

TEST_CASE("norm chain op <= hs <= tr along trajectories")
{
    for (double eta : {0.1, 1.0, 5.0}) {
        for (int k = 0; k <= 60; ++k) {
            const Norms n = norms(drho_dt(0.33 * k, make(eta, 5)));
            CHECK(n.op <= n.hs + 1e-15);
            CHECK(n.hs <= n.tr + 1e-15);
        }
    }
}
