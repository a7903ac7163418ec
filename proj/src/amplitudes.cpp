#include "nqs/amplitudes.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nqs {

namespace {

// 2 cosh(z) * exp(-|Re z|) together with the removed log factor |Re z|.
// Expanded as cosh(a+ib) = cosh a cos b + i sinh a sin b with the cosh/sinh
// pre-scaled, so the mantissa is O(1) for any argument and exact cosh zeros
// come out as exact numeric zeros.
struct ScaledCosh {
    Complex mantissa;
    double log_part;
};

ScaledCosh rescaled_2cosh(Complex z) {
    const double a = std::abs(z.real());
    const double t = std::exp(-2.0 * a);
    const double sgn = z.real() < 0 ? -1.0 : 1.0;
    const double re = (1.0 + t) * std::cos(z.imag());
    const double im = sgn * (1.0 - t) * std::sin(z.imag());
    return {Complex(re, im), a};
}

void check_spins(std::span<const std::int8_t> s) {
    for (std::int8_t x : s)
        if (x != 1 && x != -1) throw std::invalid_argument("spins must be +-1");
}

// s += u_a^T C u_b
void add_bilinear(Complex& s, const SpinVec& ua, const Eigen::MatrixXcd& c, const SpinVec& ub) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        if (ua[i] == 1) {
            for (Eigen::Index j = 0; j < c.cols(); ++j) s += c(i, j) * static_cast<double>(ub[j]);
        } else {
            for (Eigen::Index j = 0; j < c.cols(); ++j) s -= c(i, j) * static_cast<double>(ub[j]);
        }
    }
}

}  // namespace

Complex log2cosh(Complex z) {
    if (z.real() < 0) z = -z;
    return z + std::log(1.0 + std::exp(-2.0 * z));
}

ScaledCoefficient coefficient_scaled(std::span<const std::int8_t> v, const NetworkParams& params) {
    if (static_cast<Eigen::Index>(v.size()) != params.n_visible)
        throw std::invalid_argument("coefficient: visible length mismatch");
    check_spins(v);
    Complex dsum = 0.0;
    for (Eigen::Index i = 0; i < params.n_visible; ++i)
        dsum += static_cast<double>(v[i]) * params.visible_bias(i);
    ScaledCoefficient out;
    out.mantissa = std::exp(Complex(0.0, dsum.imag()));
    out.log_scale = dsum.real();
    for (Eigen::Index j = 0; j < params.n_hidden; ++j) {
        Complex theta = params.hidden_bias(j);
        for (Eigen::Index i = 0; i < params.n_visible; ++i)
            theta += static_cast<double>(v[i]) * params.weights(i, j);
        const ScaledCosh c = rescaled_2cosh(theta);
        out.mantissa *= c.mantissa;
        out.log_scale += c.log_part;
    }
    return out;
}

Complex coefficient(std::span<const std::int8_t> v, const NetworkParams& params) {
    return coefficient_scaled(v, params).value();
}

PhaseWeight phase_weight(std::span<const std::int8_t> v, std::span<const std::int8_t> h,
                         const NetworkParams& real_params, const NetworkParams& imag_params) {
    PhaseWeight pw;
    pw.log_weight = -rbm_energy(v, h, real_params).real();
    pw.phase = -rbm_energy(v, h, imag_params).real();
    return pw;
}

double joint_phase(std::span<const std::int8_t> v, std::span<const std::int8_t> h,
                   std::span<const std::int8_t> h_bra, const NetworkParams& imag_params) {
    return -rbm_energy(v, h, imag_params).real() + rbm_energy(v, h_bra, imag_params).real();
}

double joint_log_weight(std::span<const std::int8_t> v, std::span<const std::int8_t> h,
                        std::span<const std::int8_t> h_bra, const NetworkParams& real_params) {
    return -rbm_energy(v, h, real_params).real() - rbm_energy(v, h_bra, real_params).real();
}

double joint_weight(std::span<const std::int8_t> v, std::span<const std::int8_t> h,
                    std::span<const std::int8_t> h_bra, const NetworkParams& real_params) {
    return std::exp(joint_log_weight(v, h, h_bra, real_params));
}

Complex layered_exponent(const SpinConfig& config, const LayeredNetwork& net, int copy) {
    if (config.vals.size() != net.layers.size())
        throw std::invalid_argument("layered_exponent: layer count mismatch");
    Complex s = 0.0;
    for (int l = 0; l < net.n_layers(); ++l) {
        const SpinVec& u = config.vals[l][net.layers[l].duplicated ? copy : 0];
        if (static_cast<Eigen::Index>(u.size()) != net.layers[l].n_units)
            throw std::invalid_argument("layered_exponent: layer size mismatch");
        for (Eigen::Index i = 0; i < net.layers[l].n_units; ++i)
            s += static_cast<double>(u[i]) * net.layers[l].bias(i);
    }
    for (size_t l = 0; l < net.couplings.size(); ++l) {
        const SpinVec& ua = config.vals[l][net.layers[l].duplicated ? copy : 0];
        const SpinVec& ub = config.vals[l + 1][net.layers[l + 1].duplicated ? copy : 0];
        add_bilinear(s, ua, net.couplings[l], ub);
    }
    return s;
}

PhaseWeight layered_phase_weight(const SpinConfig& config, const LayeredNetwork& net) {
    const Complex ket = layered_exponent(config, net, 0);
    const Complex bra = layered_exponent(config, net, 1);
    return {ket.real() + bra.real(), ket.imag() - bra.imag()};
}

ScaledCoefficient layered_amplitude(std::span<const std::int8_t> visible, const LayeredNetwork& net) {
    net.validate();
    if (visible.size() != net.measured.size())
        throw std::invalid_argument("layered_amplitude: visible length mismatch");
    check_spins(visible);

    const int n_layers = net.n_layers();
    std::vector<SpinVec> units(n_layers);
    std::vector<std::vector<char>> assigned(n_layers);
    for (int l = 0; l < n_layers; ++l) {
        units[l].assign(net.layers[l].n_units, 1);
        assigned[l].assign(net.layers[l].n_units, 0);
    }
    for (size_t s = 0; s < net.measured.size(); ++s) {
        auto [l, i] = net.measured[s];
        units[l][i] = visible[s];
        assigned[l][i] = 1;
    }
    for (int l = 0; l < n_layers; ++l) {
        if (net.layers[l].duplicated) continue;
        for (char a : assigned[l])
            if (!a) throw std::invalid_argument("layered_amplitude: unmeasured visible unit");
    }

    // deepest duplicated layer with the most units is traced analytically
    int analytic = -1;
    std::vector<int> enumerated;
    for (int l = 0; l < n_layers; ++l) {
        if (!net.layers[l].duplicated) continue;
        if (analytic < 0 || net.layers[l].n_units >= net.layers[analytic].n_units) {
            if (analytic >= 0) enumerated.push_back(analytic);
            analytic = l;
        } else {
            enumerated.push_back(l);
        }
    }
    long enum_bits = 0;
    for (int l : enumerated) enum_bits += net.layers[l].n_units;
    if (enum_bits > 26) throw std::invalid_argument("layered_amplitude: network too large to trace");

    Complex sum = 0.0;
    double scale = -std::numeric_limits<double>::infinity();
    Eigen::VectorXcd field;
    for (std::uint64_t counter = 0; counter < (1ull << enum_bits); ++counter) {
        std::uint64_t bits = counter;
        for (int l : enumerated)
            for (Eigen::Index i = 0; i < net.layers[l].n_units; ++i, bits >>= 1)
                units[l][i] = (bits & 1ull) ? -1 : 1;

        Complex s = 0.0;
        for (int l = 0; l < n_layers; ++l) {
            if (l == analytic) continue;
            for (Eigen::Index i = 0; i < net.layers[l].n_units; ++i)
                s += static_cast<double>(units[l][i]) * net.layers[l].bias(i);
        }
        if (analytic >= 0)
            field = net.layers[analytic].bias;
        for (int l = 0; l + 1 < n_layers; ++l) {
            const Eigen::MatrixXcd& c = net.couplings[l];
            if (l == analytic) {
                for (Eigen::Index i = 0; i < c.rows(); ++i)
                    for (Eigen::Index j = 0; j < c.cols(); ++j)
                        field(i) += c(i, j) * static_cast<double>(units[l + 1][j]);
            } else if (l + 1 == analytic) {
                for (Eigen::Index i = 0; i < c.rows(); ++i)
                    for (Eigen::Index j = 0; j < c.cols(); ++j)
                        field(j) += static_cast<double>(units[l][i]) * c(i, j);
            } else {
                add_bilinear(s, units[l], c, units[l + 1]);
            }
        }

        Complex mant = std::exp(Complex(0.0, s.imag()));
        double ls = s.real();
        if (analytic >= 0) {
            for (Eigen::Index j = 0; j < field.size(); ++j) {
                const ScaledCosh c = rescaled_2cosh(field(j));
                mant *= c.mantissa;
                ls += c.log_part;
            }
        }
        if (ls > scale) {
            sum *= std::exp(scale - ls);
            scale = ls;
        }
        sum += mant * std::exp(ls - scale);
    }
    return {sum, scale};
}

}  // namespace nqs
