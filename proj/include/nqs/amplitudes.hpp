#ifndef NQS_AMPLITUDES_HPP
#define NQS_AMPLITUDES_HPP

#include "nqs/network.hpp"

namespace nqs {

// Boltzmann factor of one (v, h) configuration, split per Eq. of the
// reweighting scheme: exp(-E) = exp(log_weight) * exp(i * phase).
// The phase is kept as a plain accumulated real; it is only reduced mod 2*pi
// inside trig evaluation.
struct PhaseWeight {
    double log_weight = 0.0;
    double phase = 0.0;
};

// coefficient = mantissa * exp(log_scale); mantissa stays O(1) so large
// trained weights cannot overflow, and exact zeros stay exact.
struct ScaledCoefficient {
    Complex mantissa{0.0, 0.0};
    double log_scale = 0.0;

    Complex value() const { return mantissa * std::exp(log_scale); }
};

// Wave-function coefficient with the hidden layer traced out analytically:
// exp(sum_i d_i v_i) * prod_j 2 cosh(sum_i v_i W_ij + b_j).
Complex coefficient(std::span<const std::int8_t> v, const NetworkParams& params);
ScaledCoefficient coefficient_scaled(std::span<const std::int8_t> v, const NetworkParams& params);

// log weight from the real parts, phase from the imaginary parts. Both
// arguments are real-valued parameter sets as produced by split_params.
PhaseWeight phase_weight(std::span<const std::int8_t> v, std::span<const std::int8_t> h,
                         const NetworkParams& real_params, const NetworkParams& imag_params);

// phase of the (h, h_bra) pair: phi(v,h) - phi(v,h_bra); antisymmetric in
// the two hidden copies, zero when they coincide.
double joint_phase(std::span<const std::int8_t> v, std::span<const std::int8_t> h,
                   std::span<const std::int8_t> h_bra, const NetworkParams& imag_params);

// log of P(v,h,h_bra) = P(v,h) * P(v,h_bra)
double joint_log_weight(std::span<const std::int8_t> v, std::span<const std::int8_t> h,
                        std::span<const std::int8_t> h_bra, const NetworkParams& real_params);
double joint_weight(std::span<const std::int8_t> v, std::span<const std::int8_t> h,
                    std::span<const std::int8_t> h_bra, const NetworkParams& real_params);

// Negative network energy of one copy chain of a layered network: duplicated
// layers contribute their `copy` vector, shared layers the single vector.
Complex layered_exponent(const SpinConfig& config, const LayeredNetwork& net, int copy);

// Weight and phase of a full (ket, bra) configuration: log_weight from both
// copy chains' real parts, phase from the ket-minus-bra imaginary parts.
PhaseWeight layered_phase_weight(const SpinConfig& config, const LayeredNetwork& net);

// Amplitude at a fixed assignment of the non-duplicated (visible) units,
// traced over all duplicated layers. `visible` is in site order. The deepest
// hidden layer is summed analytically; the rest are enumerated, so this is
// meant for small networks (tests, exact references).
ScaledCoefficient layered_amplitude(std::span<const std::int8_t> visible, const LayeredNetwork& net);

// stable log(2 cosh z) with Re-part asymptotics |x| + log(1 + e^{-2|x|})
Complex log2cosh(Complex z);

}  // namespace nqs

#endif
