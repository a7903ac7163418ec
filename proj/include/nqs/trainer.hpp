#ifndef NQS_TRAINER_HPP
#define NQS_TRAINER_HPP

#include "nqs/network.hpp"

namespace nqs {

struct TrainConfig {
    int n_spins = 0;
    int n_hidden = -1;  // -1: as many hidden as visible
    double coupling = 1.0;
    double field = 1.0;
    double learning_rate = 0.05;
    double lambda0 = 1e-3;      // diagonal shift on the covariance matrix
    double lambda_min = 1e-5;   // floor of the exponential decay
    double lambda_tau = 200.0;  // decay time constant in iterations
    int max_iters = 2000;
    double energy_tol = 1e-10;  // stop when |dE| falls below this
    std::uint64_t seed = 1;
    bool translation_invariant = true;

    int hidden() const { return n_hidden < 0 ? n_spins : n_hidden; }
    double lambda_at(int iter) const;
    void validate() const;
};

// d ln c_v / d theta for a real-parameter network, analytic closed form.
// Parameter order: visible biases, hidden biases, weights row-major
// (W_00, W_01, ..). With translation invariance the vector is instead
// [d, b, w(0), .., w(N-1)] with each entry averaged over its weight orbit.
Eigen::VectorXd log_derivatives(const NetworkParams& real_params, std::span<const std::int8_t> v);
Eigen::VectorXd log_derivatives_shared(const NetworkParams& real_params,
                                       std::span<const std::int8_t> v);

long n_parameters(const TrainConfig& cfg);

// One stochastic-reconfiguration step with exactly enumerated expectations:
// forces F_k = <E_loc O_k> - <E_loc><O_k>, covariance S = <O O^T> - <O><O^T>,
// update -eta (S + lambda I)^{-1} F. Returns the updated parameters and the
// variational energy of the *input* parameters.
std::pair<NetworkParams, double> sr_step(const NetworkParams& params,
                                         const Eigen::MatrixXd& hamiltonian,
                                         const TrainConfig& cfg, double lambda);

struct TrainResult {
    NetworkParams params;
    double energy = 0.0;
    int iterations = 0;
    bool converged = false;
    // one row per iteration: energy and force norm
    std::vector<std::array<double, 2>> log;
};

// Real-parameter ground-state search for the periodic transverse-field Ising
// chain. Non-convergence returns the best iterate seen with
// converged = false.
TrainResult train_ground_state(const TrainConfig& cfg);

// circulant expansion of shared parameters: W_ij = w((i - j) mod N)
NetworkParams expand_shared(const Eigen::VectorXd& shared, int n);

}  // namespace nqs

#endif
