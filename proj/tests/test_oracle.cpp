#include "nqs/oracle.hpp"

#include "nqs/amplitudes.hpp"
#include "nqs/rng.hpp"
#include "nqs/states.hpp"

#include <doctest.h>

#include <cmath>

using namespace nqs;

TEST_CASE("index conventions: site 1 is the most significant bit") {
    CHECK(spins_to_index(SpinVec{1, 1}) == 0);
    CHECK(spins_to_index(SpinVec{1, -1}) == 1);
    CHECK(spins_to_index(SpinVec{-1, 1}) == 2);
    CHECK(index_to_spins(5, 3) == SpinVec{-1, 1, -1});
    for (std::uint64_t i = 0; i < 16; ++i) CHECK(spins_to_index(index_to_spins(i, 4)) == i);
}

TEST_CASE("network_state_vector examples") {
    const StateVector bell = network_state_vector(bell_imaginary());
    CHECK(std::abs(bell.amps(0)) < 1e-12);
    CHECK(std::abs(bell.amps(1) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(bell.amps(2) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(bell.amps(3)) < 1e-12);

    const StateVector g = network_state_vector(ghz(3));
    CHECK(std::abs(g.amps(0) - 1.0 / std::sqrt(2.0)) < 1e-10);
    CHECK(std::abs(g.amps(7) - 1.0 / std::sqrt(2.0)) < 1e-10);
    for (int i = 1; i < 7; ++i) CHECK(std::abs(g.amps(i)) < 1e-10);

    // one free spin with zero parameters: cosh is constant, uniform state
    const StateVector u = network_state_vector(NetworkParams::zeros(1, 1));
    CHECK(std::abs(u.amps(0) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(u.amps(1) - 1.0 / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("tfim_hamiltonian values") {
    const Eigen::MatrixXd h0 = tfim_hamiltonian(2, 1.0, 0.0);
    CHECK(h0(0, 0) == doctest::Approx(-2.0));
    CHECK(h0(1, 1) == doctest::Approx(2.0));
    CHECK(h0(2, 2) == doctest::Approx(2.0));
    CHECK(h0(3, 3) == doctest::Approx(-2.0));

    const GroundState g2 = ground_state(tfim_hamiltonian(2, 1.0, 1.0));
    CHECK(g2.energy == doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-12));

    const GroundState g3 = ground_state(tfim_hamiltonian(3, 1.0, 0.0));
    CHECK(g3.energy == doctest::Approx(-3.0));
}

TEST_CASE("tfim_hamiltonian symmetries") {
    const int n = 4;
    const Eigen::MatrixXd h = tfim_hamiltonian(n, 1.0, 0.7);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    // global spin flip commutes with the Hamiltonian
    const Eigen::Index dim = 1 << n;
    Eigen::MatrixXd flip = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) flip(dim - 1 - i, i) = 1.0;
    CHECK((h * flip - flip * h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ground_state tie break and residual") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 4);
    d.diagonal() << -2.0, 2.0, 2.0, -2.0;
    const GroundState g = ground_state(d);
    CHECK(g.energy == doctest::Approx(-2.0));
    CHECK(std::abs(g.state.amps(0) - 1.0) < 1e-12);
    CHECK(std::abs(g.state.amps(3)) < 1e-12);

    const Eigen::MatrixXd h = tfim_hamiltonian(3, 1.0, 1.0);
    const GroundState gs = ground_state(h);
    Eigen::VectorXd v = gs.state.amps.real();
    CHECK((h * v - gs.energy * v).norm() < 1e-10);

    Eigen::MatrixXd bad(2, 2);
    bad << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(ground_state(bad), std::invalid_argument);
}

TEST_CASE("pauli_expectation reference values") {
    CHECK(pauli_expectation(bell_state_vector(), PauliString::parse("ZZ")) ==
          doctest::Approx(-1.0));
    CHECK(pauli_expectation(bell_state_vector(), PauliString::parse("XX")) == doctest::Approx(1.0));
    CHECK(pauli_expectation(ghz_state_vector(5), PauliString::parse("XXXXX")) ==
          doctest::Approx(1.0));
    CHECK(pauli_expectation(ghz_state_vector(3), PauliString::parse("XII")) ==
          doctest::Approx(0.0));
    CHECK(pauli_expectation(ghz_state_vector(3), PauliString::parse("IZZ")) ==
          doctest::Approx(1.0));

    // sigma_y on its own +1 eigenstate
    StateVector yplus;
    yplus.amps.resize(2);
    yplus.amps << Complex(1.0 / std::sqrt(2.0), 0.0), Complex(0.0, 1.0 / std::sqrt(2.0));
    CHECK(pauli_expectation(yplus, PauliString::parse("Y")) == doctest::Approx(1.0));
}

TEST_CASE("full_sum_expectation agrees with the state-vector route") {
    ChainRng rng(31, 0);
    auto rnd = [&]() { return Complex(rng.next_double() - 0.5, rng.next_double() - 0.5); };
    for (int trial = 0; trial < 4; ++trial) {
        NetworkParams p = NetworkParams::zeros(4, 3);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 3; ++j) p.weights(i, j) = rnd();
        for (int i = 0; i < 4; ++i) p.visible_bias(i) = rnd();
        for (int j = 0; j < 3; ++j) p.hidden_bias(j) = rnd();
        const StateVector sv = network_state_vector(p);
        for (const char* text : {"ZIII", "XIII", "ZZII", "XXII", "XXXX", "IYXZ"}) {
            const PauliString op = PauliString::parse(text);
            CHECK(full_sum_expectation(p, op) ==
                  doctest::Approx(pauli_expectation(sv, op)).epsilon(1e-12));
        }
    }
    CHECK(full_sum_expectation(bell_imaginary(), PauliString::parse("XX")) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(full_sum_expectation(bell_imaginary(), PauliString::parse("ZZ")) ==
          doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("chsh combination") {
    CHECK(chsh(1.0, -1.0) == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(chsh(0.0, 0.0) == 0.0);
    CHECK(chsh(1.0, 1.0) == 0.0);
}

TEST_CASE("chsh of product states never exceeds 2") {
    // product state: <xx> = <x><x>, <zz> = <z><z> with <x>^2 + <z>^2 <= 1
    ChainRng rng(77, 0);
    for (int t = 0; t < 200; ++t) {
        double x1, z1, x2, z2;
        auto draw = [&](double& x, double& z) {
            const double theta = 6.283185307179586 * rng.next_double();
            const double r = rng.next_double();
            x = r * std::cos(theta);
            z = r * std::sin(theta);
        };
        draw(x1, z1);
        draw(x2, z2);
        CHECK(chsh(x1 * x2, z1 * z2) <= 2.0 + 1e-12);
    }
}
