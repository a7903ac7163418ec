#ifndef NQS_ORACLE_HPP
#define NQS_ORACLE_HPP

#include "nqs/network.hpp"
#include "nqs/pauli.hpp"

#include <iosfwd>

namespace nqs {

// Basis-order convention used everywhere: site 0 is the most significant
// bit, spin +1 maps to bit 0. Index 0 is therefore the all-up configuration
// and e.g. (+1,-1) on two sites is index 1.
std::uint64_t spins_to_index(std::span<const std::int8_t> v);
SpinVec index_to_spins(std::uint64_t index, int n);

// Result of applying a Pauli string to a z-basis state |v>:
// O |v> = coeff * |flipped>.
struct PauliAction {
    SpinVec flipped;
    Complex coeff;
};
PauliAction pauli_action(const PauliString& op, std::span<const std::int8_t> v);

// 2^N complex amplitudes in the convention above; normalized, with the
// pre-normalization log-norm kept for reference.
struct StateVector {
    Eigen::VectorXcd amps;
    double log_norm = 0.0;

    int n_sites() const;
};

// Amplitudes of the network-encoded state, normalized by sqrt(Z).
StateVector network_state_vector(const NetworkParams& params);

// Reference target states, built directly from their definitions.
StateVector bell_state_vector();     // (|ud> + |du>) / sqrt 2
StateVector ghz_state_vector(int n); // (|u..u> + |d..d>) / sqrt 2

// -J sum_i sigma^z_i sigma^z_{(i+1) mod n} - h sum_i sigma^x_i with periodic
// boundary; the mod-n sum is taken literally, so n = 2 counts its single
// bond twice.
Eigen::MatrixXd tfim_hamiltonian(int n, double coupling, double field);

struct GroundState {
    double energy = 0.0;
    StateVector state;
};

// Lowest eigenpair of a symmetric matrix. Degenerate ground spaces are
// resolved toward the lowest basis index; the returned vector has its
// largest-magnitude amplitude real and positive.
GroundState ground_state(const Eigen::MatrixXd& hamiltonian);

// <psi|O|psi> for a normalized state; guaranteed real for Hermitian O.
double pauli_expectation(const StateVector& state, const PauliString& op);

// Exact expectation under the network-encoded normalized state, evaluated
// through the local-operator sum over all visible configurations.
double full_sum_expectation(const NetworkParams& params, const PauliString& op);

// CHSH combination sqrt(2) |<xx> - <zz>|, classically bounded by 2.
double chsh(double xx, double zz);

// text export, one "index re im" row per amplitude
void save_state_vector(const StateVector& state, std::ostream& out);

}  // namespace nqs

#endif
