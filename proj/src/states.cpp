#include "nqs/states.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nqs {

namespace {
constexpr double kPi = std::numbers::pi;
}

NetworkParams bell_complex() {
    NetworkParams p = NetworkParams::zeros(2, 1);
    const double r = 0.5 * std::asinh(1.0 / std::sqrt(8.0));
    p.visible_bias(0) = Complex(0.0, kPi / 2.0);
    p.hidden_bias(0) = Complex(0.0, kPi / 2.0);
    p.weights(0, 0) = Complex(-r, kPi / 2.0);
    p.weights(1, 0) = Complex(+r, kPi / 2.0);
    return p;
}

NetworkParams bell_imaginary() {
    NetworkParams p = NetworkParams::zeros(2, 1);
    const double a = 0.5 * std::acos(1.0 / std::sqrt(8.0));
    p.weights(0, 0) = Complex(0.0, -a - kPi / 4.0);
    p.weights(1, 0) = Complex(0.0, +a - kPi / 4.0);
    return p;
}

NetworkParams ghz(int n) {
    if (n < 2) throw std::domain_error("ghz: need at least 2 spins");
    const int m = n - 1;
    NetworkParams p = NetworkParams::zeros(n, m);
    const double eps = std::asin(std::pow(2.0, -(n - 0.5)));
    for (int j = 0; j < n; ++j)
        p.weights(j, 0) = Complex(0.0, j == n - 1 ? eps / 2.0 : eps / (2.0 * (n - 1)));
    for (int k = 1; k < m; ++k) {
        // delta_{j,k-1} + delta_{j,k} in 1-based indices
        p.weights(k - 1, k) = Complex(0.0, kPi / 4.0);
        p.weights(k, k) = Complex(0.0, kPi / 4.0);
    }
    for (int k = 0; k < m; ++k) p.hidden_bias(k) = Complex(0.0, kPi / 2.0);
    if (n % 2 == 0) p.visible_bias(0) = Complex(0.0, kPi / 2.0);
    return p;
}

}  // namespace nqs
