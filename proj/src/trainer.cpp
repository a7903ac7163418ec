#include "nqs/trainer.hpp"

#include "nqs/oracle.hpp"
#include "nqs/rng.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nqs {

double TrainConfig::lambda_at(int iter) const {
    return std::max(lambda_min, lambda0 * std::exp(-iter / lambda_tau));
}

void TrainConfig::validate() const {
    if (n_spins < 1) throw std::invalid_argument("TrainConfig: n_spins must be >= 1");
    if (learning_rate <= 0.0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (lambda0 < 0.0 || lambda_min < 0.0)
        throw std::invalid_argument("TrainConfig: regularization must be >= 0");
    if (max_iters < 1) throw std::invalid_argument("TrainConfig: max_iters must be >= 1");
    if (translation_invariant && hidden() != n_spins)
        throw std::invalid_argument("TrainConfig: translation invariance requires M = N");
}

long n_parameters(const TrainConfig& cfg) {
    if (cfg.translation_invariant) return cfg.n_spins + 2;
    return cfg.n_spins + cfg.hidden() + static_cast<long>(cfg.n_spins) * cfg.hidden();
}

namespace {

double log_2cosh_real(double x) {
    return std::abs(x) + std::log1p(std::exp(-2.0 * std::abs(x)));
}

Eigen::VectorXd hidden_args(const NetworkParams& p, std::span<const std::int8_t> v) {
    Eigen::VectorXd theta = p.hidden_bias.real();
    for (Eigen::Index j = 0; j < p.n_hidden; ++j)
        for (Eigen::Index i = 0; i < p.n_visible; ++i)
            theta(j) += static_cast<double>(v[i]) * p.weights(i, j).real();
    return theta;
}

}  // namespace

Eigen::VectorXd log_derivatives(const NetworkParams& p, std::span<const std::int8_t> v) {
    if (static_cast<Eigen::Index>(v.size()) != p.n_visible)
        throw std::invalid_argument("log_derivatives: configuration length mismatch");
    const Eigen::VectorXd tanh_theta = hidden_args(p, v).array().tanh();
    Eigen::VectorXd out(p.n_visible + p.n_hidden + p.n_visible * p.n_hidden);
    for (Eigen::Index i = 0; i < p.n_visible; ++i) out(i) = v[i];
    for (Eigen::Index j = 0; j < p.n_hidden; ++j) out(p.n_visible + j) = tanh_theta(j);
    Eigen::Index k = p.n_visible + p.n_hidden;
    for (Eigen::Index i = 0; i < p.n_visible; ++i)
        for (Eigen::Index j = 0; j < p.n_hidden; ++j) out(k++) = v[i] * tanh_theta(j);
    return out;
}

Eigen::VectorXd log_derivatives_shared(const NetworkParams& p, std::span<const std::int8_t> v) {
    if (p.n_hidden != p.n_visible)
        throw std::invalid_argument("log_derivatives_shared: requires M = N");
    const int n = static_cast<int>(p.n_visible);
    const Eigen::VectorXd tanh_theta = hidden_args(p, v).array().tanh();
    Eigen::VectorXd out(n + 2);
    double sv = 0.0, st = 0.0;
    for (int i = 0; i < n; ++i) sv += v[i];
    for (int j = 0; j < n; ++j) st += tanh_theta(j);
    out(0) = sv / n;
    out(1) = st / n;
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += v[(j + k) % n] * tanh_theta(j);
        out(2 + k) = s / n;
    }
    return out;
}

NetworkParams expand_shared(const Eigen::VectorXd& shared, int n) {
    if (shared.size() != n + 2) throw std::invalid_argument("expand_shared: bad length");
    NetworkParams p = NetworkParams::zeros(n, n);
    p.visible_bias.setConstant(Complex(shared(0), 0.0));
    p.hidden_bias.setConstant(Complex(shared(1), 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p.weights(i, j) = Complex(shared(2 + ((i - j) % n + n) % n), 0.0);
    return p;
}

namespace {

struct StepDetail {
    NetworkParams params;
    double energy = 0.0;
    double force_norm = 0.0;
};

// amplitudes of the real network, rescaled by the maximum log
Eigen::VectorXd rescaled_amplitudes(const NetworkParams& params) {
    const int n = static_cast<int>(params.n_visible);
    const Eigen::Index dim = Eigen::Index(1) << n;
    Eigen::VectorXd log_psi(dim);
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
        const SpinVec v = index_to_spins(static_cast<std::uint64_t>(idx), n);
        double lp = 0.0;
        for (int i = 0; i < n; ++i) lp += v[i] * params.visible_bias(i).real();
        const Eigen::VectorXd theta = hidden_args(params, v);
        for (Eigen::Index j = 0; j < theta.size(); ++j) lp += log_2cosh_real(theta(j));
        log_psi(idx) = lp;
    }
    return (log_psi.array() - log_psi.maxCoeff()).exp();
}

double variational_energy(const NetworkParams& params, const Eigen::MatrixXd& hamiltonian) {
    const Eigen::VectorXd psi = rescaled_amplitudes(params);
    return psi.dot(hamiltonian * psi) / psi.squaredNorm();
}

StepDetail sr_step_detail(const NetworkParams& params, const Eigen::MatrixXd& hamiltonian,
                          const TrainConfig& cfg, double lambda) {
    params.validate();
    const int n = static_cast<int>(params.n_visible);
    if (n > 10) throw std::invalid_argument("sr_step: exact enumeration limited to N <= 10");
    const Eigen::Index dim = Eigen::Index(1) << n;
    if (hamiltonian.rows() != dim || hamiltonian.cols() != dim)
        throw std::invalid_argument("sr_step: Hamiltonian dimension mismatch");

    const Eigen::VectorXd psi = rescaled_amplitudes(params);
    const Eigen::VectorXd prob = psi.array().square() / psi.squaredNorm();
    const Eigen::VectorXd hpsi = hamiltonian * psi;
    const Eigen::VectorXd e_loc = hpsi.array() / psi.array();
    const double energy = prob.dot(e_loc);

    const long np = n_parameters(cfg);
    Eigen::VectorXd mean_o = Eigen::VectorXd::Zero(np);
    Eigen::VectorXd mean_oe = Eigen::VectorXd::Zero(np);
    Eigen::MatrixXd mean_oo = Eigen::MatrixXd::Zero(np, np);
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
        const SpinVec v = index_to_spins(static_cast<std::uint64_t>(idx), n);
        const Eigen::VectorXd o = cfg.translation_invariant ? log_derivatives_shared(params, v)
                                                            : log_derivatives(params, v);
        mean_o += prob(idx) * o;
        mean_oe += prob(idx) * e_loc(idx) * o;
        mean_oo.noalias() += prob(idx) * o * o.transpose();
    }
    const Eigen::VectorXd force = mean_oe - energy * mean_o;
    Eigen::MatrixXd s = mean_oo - mean_o * mean_o.transpose();
    s.diagonal().array() += lambda;

    const Eigen::LDLT<Eigen::MatrixXd> solver(s);
    Eigen::VectorXd delta;
    if (solver.info() == Eigen::Success) delta = solver.solve(force);
    if (solver.info() != Eigen::Success || !delta.allFinite())
        throw std::runtime_error("sr_step: singular (S + lambda I); increase regularization lambda");
    delta *= -cfg.learning_rate;

    StepDetail out;
    out.energy = energy;
    out.force_norm = force.norm();
    if (cfg.translation_invariant) {
        Eigen::VectorXd shared(np);
        shared(0) = params.visible_bias(0).real();
        shared(1) = params.hidden_bias(0).real();
        for (int k = 0; k < n; ++k) shared(2 + k) = params.weights(k, 0).real();
        out.params = expand_shared(shared + delta, n);
    } else {
        out.params = params;
        for (int i = 0; i < n; ++i) out.params.visible_bias(i) += delta(i);
        const int m = static_cast<int>(params.n_hidden);
        for (int j = 0; j < m; ++j) out.params.hidden_bias(j) += delta(n + j);
        Eigen::Index k = n + m;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) out.params.weights(i, j) += delta(k++);
    }
    return out;
}

}  // namespace

std::pair<NetworkParams, double> sr_step(const NetworkParams& params,
                                         const Eigen::MatrixXd& hamiltonian,
                                         const TrainConfig& cfg, double lambda) {
    StepDetail d = sr_step_detail(params, hamiltonian, cfg, lambda);
    return {std::move(d.params), d.energy};
}

TrainResult train_ground_state(const TrainConfig& cfg) {
    cfg.validate();
    const Eigen::MatrixXd h = tfim_hamiltonian(cfg.n_spins, cfg.coupling, cfg.field);

    ChainRng rng(cfg.seed, 0);
    auto uniform_small = [&rng]() { return 0.02 * rng.next_double() - 0.01; };

    NetworkParams params;
    if (cfg.translation_invariant) {
        Eigen::VectorXd shared(cfg.n_spins + 2);
        for (Eigen::Index i = 0; i < shared.size(); ++i) shared(i) = uniform_small();
        params = expand_shared(shared, cfg.n_spins);
    } else {
        params = NetworkParams::zeros(cfg.n_spins, cfg.hidden());
        for (Eigen::Index i = 0; i < params.n_visible; ++i) params.visible_bias(i) = uniform_small();
        for (Eigen::Index j = 0; j < params.n_hidden; ++j) params.hidden_bias(j) = uniform_small();
        for (Eigen::Index i = 0; i < params.n_visible; ++i)
            for (Eigen::Index j = 0; j < params.n_hidden; ++j) params.weights(i, j) = uniform_small();
    }

    TrainResult result;
    result.params = params;
    result.energy = std::numeric_limits<double>::infinity();

    // Step-size safeguard: a full natural-gradient step can overshoot the
    // correlated minimum and land on the paramagnetic stationary point
    // (zero parameters, F = 0 exactly), where the iteration would silently
    // stall. A step that raises the energy is rejected and recomputed with
    // a halved scale; accepted steps slowly restore the scale.
    double step_scale = 1.0;
    TrainConfig scaled = cfg;
    double prev_energy = std::numeric_limits<double>::infinity();
    for (int t = 0; t < cfg.max_iters; ++t) {
        scaled.learning_rate = cfg.learning_rate * step_scale;
        StepDetail step = sr_step_detail(params, h, scaled, cfg.lambda_at(t));
        result.log.push_back({step.energy, step.force_norm});
        result.iterations = t + 1;
        if (step.energy < result.energy) {
            result.energy = step.energy;
            result.params = params;
        }
        if (std::abs(step.energy - prev_energy) < cfg.energy_tol) {
            result.converged = true;
            break;
        }
        prev_energy = step.energy;

        const double uphill_tol = 1e-9 * std::max(1.0, std::abs(step.energy));
        while (variational_energy(step.params, h) > step.energy + uphill_tol &&
               step_scale > 1.0 / 1024.0) {
            step_scale *= 0.5;
            scaled.learning_rate = cfg.learning_rate * step_scale;
            step = sr_step_detail(params, h, scaled, cfg.lambda_at(t));
        }
        params = std::move(step.params);
        step_scale = std::min(1.0, step_scale * 1.25);
    }
    return result;
}

}  // namespace nqs
