#include "nqs/oracle.hpp"

#include "nqs/amplitudes.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace nqs {

std::uint64_t spins_to_index(std::span<const std::int8_t> v) {
    std::uint64_t idx = 0;
    for (std::int8_t s : v) idx = (idx << 1) | (s == -1 ? 1u : 0u);
    return idx;
}

SpinVec index_to_spins(std::uint64_t index, int n) {
    SpinVec v(n);
    for (int s = 0; s < n; ++s) v[s] = (index >> (n - 1 - s)) & 1ull ? -1 : 1;
    return v;
}

PauliAction pauli_action(const PauliString& op, std::span<const std::int8_t> v) {
    if (op.n_sites() != static_cast<int>(v.size()))
        throw std::invalid_argument("pauli_action: length mismatch");
    PauliAction out;
    out.flipped.assign(v.begin(), v.end());
    out.coeff = 1.0;
    for (int i = 0; i < op.n_sites(); ++i) {
        switch (op.axes[i]) {
            case Pauli::I:
                break;
            case Pauli::Z:
                out.coeff *= static_cast<double>(v[i]);
                break;
            case Pauli::X:
                out.flipped[i] = -out.flipped[i];
                break;
            case Pauli::Y:
                // sigma^y |v> = i v |-v>
                out.coeff *= Complex(0.0, static_cast<double>(v[i]));
                out.flipped[i] = -out.flipped[i];
                break;
        }
    }
    return out;
}

int StateVector::n_sites() const {
    int n = 0;
    while ((Eigen::Index(1) << n) < amps.size()) ++n;
    return n;
}

StateVector network_state_vector(const NetworkParams& params) {
    params.validate();
    if (params.n_visible > 26)
        throw std::invalid_argument("network_state_vector: system too large to enumerate");
    const int n = static_cast<int>(params.n_visible);
    const std::uint64_t dim = 1ull << n;

    std::vector<ScaledCoefficient> raw(dim);
    double max_ls = -std::numeric_limits<double>::infinity();
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
        const SpinVec v = index_to_spins(idx, n);
        raw[idx] = coefficient_scaled(v, params);
        if (raw[idx].log_scale > max_ls) max_ls = raw[idx].log_scale;
    }
    StateVector out;
    out.amps.resize(static_cast<Eigen::Index>(dim));
    double z = 0.0;
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
        const Complex c = raw[idx].mantissa * std::exp(raw[idx].log_scale - max_ls);
        out.amps(static_cast<Eigen::Index>(idx)) = c;
        z += std::norm(c);
    }
    out.amps /= std::sqrt(z);
    out.log_norm = max_ls + 0.5 * std::log(z);
    return out;
}

StateVector bell_state_vector() {
    StateVector s;
    s.amps = Eigen::VectorXcd::Zero(4);
    s.amps(1) = s.amps(2) = 1.0 / std::sqrt(2.0);
    return s;
}

StateVector ghz_state_vector(int n) {
    if (n < 2) throw std::domain_error("ghz_state_vector: need at least 2 spins");
    StateVector s;
    s.amps = Eigen::VectorXcd::Zero(Eigen::Index(1) << n);
    s.amps(0) = s.amps(s.amps.size() - 1) = 1.0 / std::sqrt(2.0);
    return s;
}

Eigen::MatrixXd tfim_hamiltonian(int n, double coupling, double field) {
    if (n < 1 || n > 14) throw std::invalid_argument("tfim_hamiltonian: n out of range");
    const Eigen::Index dim = Eigen::Index(1) << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
        const SpinVec v = index_to_spins(static_cast<std::uint64_t>(idx), n);
        double diag = 0.0;
        for (int i = 0; i < n; ++i) diag += static_cast<double>(v[i]) * v[(i + 1) % n];
        h(idx, idx) = -coupling * diag;
        for (int i = 0; i < n; ++i) {
            const Eigen::Index flipped = idx ^ (Eigen::Index(1) << (n - 1 - i));
            h(flipped, idx) -= field;
        }
    }
    return h;
}

GroundState ground_state(const Eigen::MatrixXd& hamiltonian) {
    if (hamiltonian.rows() != hamiltonian.cols())
        throw std::invalid_argument("ground_state: matrix not square");
    const double scale = std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
    if ((hamiltonian - hamiltonian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("ground_state: matrix not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
    if (solver.info() != Eigen::Success) throw std::runtime_error("ground_state: eigensolver failed");
    const Eigen::VectorXd& evals = solver.eigenvalues();
    const double e0 = evals(0);

    // ground subspace (Eigen sorts eigenvalues ascending)
    Eigen::Index deg = 1;
    while (deg < evals.size() && evals(deg) - e0 < 1e-10 * std::max(1.0, std::abs(e0))) ++deg;
    const Eigen::MatrixXd sub = solver.eigenvectors().leftCols(deg);

    Eigen::VectorXd vec;
    if (deg == 1) {
        vec = sub.col(0);
    } else {
        // tie rule: project the lowest basis vector with nonzero overlap
        vec = Eigen::VectorXd::Zero(hamiltonian.rows());
        for (Eigen::Index k = 0; k < hamiltonian.rows(); ++k) {
            Eigen::VectorXd cand = sub * (sub.row(k).transpose());
            if (cand.norm() > 1e-8) {
                vec = cand / cand.norm();
                break;
            }
        }
    }

    Eigen::Index imax = 0;
    vec.cwiseAbs().maxCoeff(&imax);
    if (vec(imax) < 0) vec = -vec;

    GroundState out;
    out.energy = e0;
    out.state.amps = vec.cast<Complex>();
    out.state.log_norm = 0.0;
    return out;
}

double pauli_expectation(const StateVector& state, const PauliString& op) {
    const int n = state.n_sites();
    if (op.n_sites() != n) throw std::invalid_argument("pauli_expectation: length mismatch");
    if ((Eigen::Index(1) << n) != state.amps.size())
        throw std::invalid_argument("pauli_expectation: state dimension not a power of two");
    Complex acc = 0.0;
    for (Eigen::Index idx = 0; idx < state.amps.size(); ++idx) {
        const SpinVec v = index_to_spins(static_cast<std::uint64_t>(idx), n);
        const PauliAction act = pauli_action(op, v);
        const Eigen::Index target = static_cast<Eigen::Index>(spins_to_index(act.flipped));
        acc += std::conj(state.amps(target)) * act.coeff * state.amps(idx);
    }
    return acc.real();
}

double full_sum_expectation(const NetworkParams& params, const PauliString& op) {
    params.validate();
    if (op.n_sites() != params.n_visible)
        throw std::invalid_argument("full_sum_expectation: operator length mismatch");
    if (params.n_visible > 26)
        throw std::invalid_argument("full_sum_expectation: system too large to enumerate");
    const int n = static_cast<int>(params.n_visible);
    const std::uint64_t dim = 1ull << n;

    std::vector<ScaledCoefficient> raw(dim);
    double max_ls = -std::numeric_limits<double>::infinity();
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
        raw[idx] = coefficient_scaled(index_to_spins(idx, n), params);
        max_ls = std::max(max_ls, raw[idx].log_scale);
    }
    std::vector<Complex> c(dim);
    for (std::uint64_t idx = 0; idx < dim; ++idx)
        c[idx] = raw[idx].mantissa * std::exp(raw[idx].log_scale - max_ls);

    // local-operator sum: O_loc(v) |c_v|^2 written without the ratio so
    // configurations with c_v = 0 contribute their (zero) weight directly
    Complex num = 0.0;
    double den = 0.0;
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
        const SpinVec v = index_to_spins(idx, n);
        const PauliAction act = pauli_action(op, v);
        num += act.coeff * std::conj(c[spins_to_index(act.flipped)]) * c[idx];
        den += std::norm(c[idx]);
    }
    if (den == 0.0) throw std::runtime_error("full_sum_expectation: vanishing norm");
    return num.real() / den;
}

double chsh(double xx, double zz) {
    return std::sqrt(2.0) * std::abs(xx - zz);
}

void save_state_vector(const StateVector& state, std::ostream& out) {
    char buf[96];
    for (Eigen::Index i = 0; i < state.amps.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%lld %.17g %.17g\n", static_cast<long long>(i),
                      state.amps(i).real(), state.amps(i).imag());
        out << buf;
    }
}

}  // namespace nqs
