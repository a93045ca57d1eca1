#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qsl/model.hpp"
#include "qsl/reduced_density.hpp"

namespace qsl {

/// H = omega Jz (x) 1 + 1 (x) beta b^+b + eta J^2 (x) (b^+ + b) on spin (x) Fock,
/// with b truncated at fock_dim levels. Index of |m, n> is spin_index * fock_dim + n,
/// spin_index 0 being m = +j.
struct FullHamiltonian {
    int spin_dim = 0;
    int fock_dim = 0;
    Eigen::MatrixXd system_env; // H_S + H_E
    Eigen::MatrixXd coupling;   // H_SE
    Eigen::MatrixXd matrix;     // full H

    [[nodiscard]] int dim() const { return spin_dim * fock_dim; }
};

struct OracleState {
    double t = 0.0;
    int spin_dim = 0;
    int fock_dim = 0;
    Eigen::VectorXcd vector;

    [[nodiscard]] double norm() const { return vector.norm(); }
};

FullHamiltonian build_hamiltonian(const ModelParams& params);
FullHamiltonian build_hamiltonian(const ModelParams& params, int fock_dim);

/// Spin in the equal superposition of all m, environment in
/// sum_{n <= n_max} |n> / sqrt(n!), normalized.
OracleState initial_state(const ModelParams& params, int fock_dim);

/// exp(-i H t) from a single diagonalization of the Hamiltonian.
class SpectralPropagator {
public:
    explicit SpectralPropagator(const FullHamiltonian& h);

    [[nodiscard]] OracleState propagate(const OracleState& state, double t) const;
    [[nodiscard]] Eigen::MatrixXcd unitary(double t) const;
    [[nodiscard]] const Eigen::VectorXd& energies() const { return energies_; }

private:
    int spin_dim_;
    int fock_dim_;
    Eigen::VectorXd energies_;
    Eigen::MatrixXd vectors_;
};

OracleState propagate(const OracleState& state, double t, const FullHamiltonian& h);

/// Tr_E |psi><psi| over every retained Fock level.
Eigen::MatrixXcd partial_trace_env(const OracleState& state);

/// Environment trace restricted to n <= n_max with the 1/n! weights of the
/// environment factor: sum_{n<=n_max} (1/n!) <m1 n|psi><psi|m2 n>.
Eigen::MatrixXcd retained_partial_trace(const OracleState& state, int n_max);

/// Brute-force reduced density matrix, normalized the same way as the
/// closed-form one: by the retained trace at t = 0 (InitialUnit) or at t (TotalTrace).
class ExactOracle {
public:
    explicit ExactOracle(const ModelParams& params);
    ExactOracle(const ModelParams& params, int fock_dim);

    [[nodiscard]] ReducedDensity rho_S(double t, NormalizationMode mode = NormalizationMode::InitialUnit) const;
    [[nodiscard]] OracleState state(double t) const;
    [[nodiscard]] const FullHamiltonian& hamiltonian() const { return hamiltonian_; }
    [[nodiscard]] int fock_dim() const { return hamiltonian_.fock_dim; }

private:
    ModelParams params_;
    FullHamiltonian hamiltonian_;
    SpectralPropagator propagator_;
    OracleState initial_;
    double initial_retained_;
};

/// Largest elementwise distance between the closed-form and brute-force rho_S
/// over `points` equally spaced times in [0, t_max].
double oracle_deviation(const ModelParams& params, NormalizationMode mode, double t_max, int points);

/// Exponents X = -i t (H_S + H_E) and Y = -i t H_SE.
struct ZassenhausParts {
    Eigen::MatrixXcd x;
    Eigen::MatrixXcd y;
};

ZassenhausParts zassenhaus_parts(const FullHamiltonian& h, double t);

/// exp(X) exp(Y) exp(-c2/2!) [exp(-c3/3!) [exp(-c4/4!)]] for order 2, 3 or 4, with
/// c2 = [X,Y], c3 = 2[[X,Y],Y] + [[X,Y],X] and
/// c4 = [[[X,Y],X],X] + 3[[[X,Y],X],Y] + 3[[[X,Y],Y],Y].
Eigen::MatrixXcd zassenhaus_propagator(const ZassenhausParts& parts, int order);

/// exp(A) for anti-Hermitian A via the Hermitian eigenproblem of iA.
Eigen::MatrixXcd exp_anti_hermitian(const Eigen::MatrixXcd& a);

} // namespace qsl
