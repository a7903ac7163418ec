#include "nqs/rotations.hpp"

#include <numbers>
#include <stdexcept>

namespace nqs {

namespace {
constexpr double kQuarterPi = std::numbers::pi / 4.0;

void check_pm1(int a, int b) {
    if ((a != 1 && a != -1) || (b != 1 && b != -1))
        throw std::invalid_argument("rotation entries take +-1 arguments");
}
}  // namespace

MeasurementBasis parse_basis(std::string_view text) {
    MeasurementBasis out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case 'Z': case 'z': out.push_back(Axis::Z); break;
            case 'X': case 'x': out.push_back(Axis::X); break;
            case 'Y': case 'y': out.push_back(Axis::Y); break;
            default:
                throw std::invalid_argument("invalid basis axis '" + std::string(1, c) + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument("empty basis string");
    return out;
}

std::string basis_str(const MeasurementBasis& basis) {
    std::string s;
    for (Axis a : basis) s.push_back(static_cast<char>(a));
    return s;
}

MeasurementBasis basis_for(const PauliString& op) {
    MeasurementBasis b(op.n_sites(), Axis::Z);
    for (int i = 0; i < op.n_sites(); ++i) {
        if (op.axes[i] == Pauli::X) b[i] = Axis::X;
        else if (op.axes[i] == Pauli::Y) b[i] = Axis::Y;
    }
    return b;
}

MeasurementBasis uniform_basis(Axis axis, int n) {
    return MeasurementBasis(n, axis);
}

Complex rotation_entry_x(int vx, int vz) {
    check_pm1(vx, vz);
    return std::exp(Complex(0.0, kQuarterPi * (vx * vz - vx - vz + 1)));
}

Complex rotation_entry_y(int vy, int vz) {
    check_pm1(vy, vz);
    return std::exp(Complex(0.0, kQuarterPi * (1 - vy * vz)));
}

LayeredNetwork attach_rotations(const NetworkParams& params, const MeasurementBasis& basis) {
    params.validate();
    if (static_cast<Eigen::Index>(basis.size()) != params.n_visible)
        throw std::invalid_argument("attach_rotations: basis length mismatch");

    std::vector<int> rotated, unrotated;
    for (int i = 0; i < params.n_visible; ++i)
        (basis[i] == Axis::Z ? unrotated : rotated).push_back(i);
    if (rotated.empty()) return promote_to_layered(params);

    const Eigen::Index n_rot = static_cast<Eigen::Index>(rotated.size());
    const Eigen::Index n_unrot = static_cast<Eigen::Index>(unrotated.size());
    const Eigen::Index m = params.n_hidden;

    LayeredNetwork net;

    Layer rot_layer{n_rot, Eigen::VectorXcd::Zero(n_rot), false};
    Layer z_layer{n_rot, Eigen::VectorXcd::Zero(n_rot), true};
    Eigen::MatrixXcd link = Eigen::MatrixXcd::Zero(n_rot, n_rot);
    for (Eigen::Index k = 0; k < n_rot; ++k) {
        const int site = rotated[k];
        z_layer.bias(k) = params.visible_bias(site);
        if (basis[site] == Axis::X) {
            link(k, k) = Complex(0.0, kQuarterPi);
            rot_layer.bias(k) = Complex(0.0, -kQuarterPi);
            z_layer.bias(k) += Complex(0.0, -kQuarterPi);
        } else {
            link(k, k) = Complex(0.0, -kQuarterPi);
        }
    }

    Eigen::MatrixXcd w_rot(n_rot, m);
    for (Eigen::Index k = 0; k < n_rot; ++k) w_rot.row(k) = params.weights.row(rotated[k]);

    net.layers.push_back(std::move(rot_layer));
    net.layers.push_back(std::move(z_layer));
    net.layers.push_back({m, params.hidden_bias, true});
    net.couplings.push_back(std::move(link));
    net.couplings.push_back(std::move(w_rot));

    if (n_unrot > 0) {
        Layer vis_z{n_unrot, Eigen::VectorXcd::Zero(n_unrot), false};
        Eigen::MatrixXcd w_unrot(m, n_unrot);
        for (Eigen::Index k = 0; k < n_unrot; ++k) {
            vis_z.bias(k) = params.visible_bias(unrotated[k]);
            w_unrot.col(k) = params.weights.row(unrotated[k]).transpose();
        }
        net.layers.push_back(std::move(vis_z));
        net.couplings.push_back(std::move(w_unrot));
    }

    net.measured.resize(params.n_visible);
    for (Eigen::Index k = 0; k < n_rot; ++k) net.measured[rotated[k]] = {0, static_cast<int>(k)};
    for (Eigen::Index k = 0; k < n_unrot; ++k) net.measured[unrotated[k]] = {3, static_cast<int>(k)};
    net.validate();
    return net;
}

}  // namespace nqs
