#ifndef NQS_STATES_HPP
#define NQS_STATES_HPP

#include "nqs/network.hpp"

namespace nqs {

// Closed-form Bell-pair parameters, complex branch:
// d1 = i pi/2, b1 = i pi/2, W_j1 = (-1)^j/2 arsinh(1/sqrt 8) + i pi/2.
NetworkParams bell_complex();

// Purely imaginary branch: all biases zero,
// W_j1 = i [(-1)^j/2 arccos(1/sqrt 8) - pi/4].
NetworkParams bell_imaginary();

// N-spin GHZ parameters with M = N-1 hidden units; b_k = i pi/2,
// first column i/(2(N-1)) arcsin(2^{-(N-1/2)}) (last row i/2 arcsin),
// remaining columns i pi/4 (delta_{j,k-1} + delta_{j,k}).
// For even N the cosh chain forces opposite signs on the two extremal
// amplitudes, so a visible bias d1 = i pi/2 is added; the encoded state is
// then the GHZ state up to a global phase of -i. Odd N is exact with no
// extra phase. Throws std::domain_error for n < 2.
NetworkParams ghz(int n);

}  // namespace nqs

#endif
