#ifndef NQS_ROTATIONS_HPP
#define NQS_ROTATIONS_HPP

#include "nqs/network.hpp"
#include "nqs/pauli.hpp"

#include <string_view>

namespace nqs {

enum class Axis : char { Z = 'Z', X = 'X', Y = 'Y' };

// Per-site measurement axis; length must equal n_visible of the base network.
using MeasurementBasis = std::vector<Axis>;

MeasurementBasis parse_basis(std::string_view text);
std::string basis_str(const MeasurementBasis& basis);

// Basis in which every factor of the operator is diagonal: the operator's
// own axis on its support, Z elsewhere.
MeasurementBasis basis_for(const PauliString& op);

// Uniform basis over n sites (the all-X / all-Y / all-Z choice used when
// rotating every spin at once).
MeasurementBasis uniform_basis(Axis axis, int n);

// Entries of the unnormalized single-site rotation matrices,
// exp[i pi/4 (vx*vz - vx - vz + 1)] and exp[i pi/4 (1 - vy*vz)].
Complex rotation_entry_x(int vx, int vz);
Complex rotation_entry_y(int vy, int vz);

// Attach rotation units so the requested basis becomes diagonal on the
// measured layer. X sites: link i pi/4, bias -i pi/4 on both partners;
// Y sites: link -i pi/4, no extra biases; the constant i pi/4 per rotated
// site is dropped (global phase). Rotated z-units become hidden and
// duplicated. Unrotated sites stay visible: their z-units form a trailing
// single-copy layer adjacent to the hidden layer, and `measured` keeps the
// site order. All-Z input reduces to promote_to_layered.
LayeredNetwork attach_rotations(const NetworkParams& params, const MeasurementBasis& basis);

}  // namespace nqs

#endif
