#ifndef NQS_NETWORK_HPP
#define NQS_NETWORK_HPP

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nqs {

using Complex = std::complex<double>;
using SpinVec = std::vector<std::int8_t>;  // entries are +1 / -1

// Complex weights and biases of a restricted Boltzmann machine:
// couplings W (n_visible x n_hidden), visible biases d, hidden biases b.
struct NetworkParams {
    Eigen::Index n_visible = 0;
    Eigen::Index n_hidden = 0;
    Eigen::MatrixXcd weights;
    Eigen::VectorXcd visible_bias;
    Eigen::VectorXcd hidden_bias;

    static NetworkParams zeros(Eigen::Index n_visible, Eigen::Index n_hidden);

    // dimension agreement and finiteness; throws std::invalid_argument
    void validate() const;
};

// Network energy -sum_ij v_i W_ij h_j - sum_i d_i v_i - sum_j b_j h_j.
Complex rbm_energy(std::span<const std::int8_t> v, std::span<const std::int8_t> h,
                   const NetworkParams& params);

// Element-wise real and imaginary parts; first + i*second reproduces the
// input bit-exactly.
std::pair<NetworkParams, NetworkParams> split_params(const NetworkParams& params);

// Deep topology: ordered layers coupled only between neighbors. Layers
// flagged `duplicated` are sampled twice (bra and ket copies); the remaining
// layers hold the measured units, located through `measured`.
struct Layer {
    Eigen::Index n_units = 0;
    Eigen::VectorXcd bias;
    bool duplicated = false;
};

struct LayeredNetwork {
    std::vector<Layer> layers;
    // couplings[l] has shape layers[l].n_units x layers[l+1].n_units
    std::vector<Eigen::MatrixXcd> couplings;
    // site index -> (layer, unit within layer) of the unit whose value is
    // reported as that site's measurement outcome
    std::vector<std::pair<int, int>> measured;

    int n_layers() const { return static_cast<int>(layers.size()); }
    int n_sites() const { return static_cast<int>(measured.size()); }

    // unit count with duplicated layers counted twice
    long total_units() const;

    void validate() const;
};

// Joint assignment of +-1 values to every unit of a LayeredNetwork.
// Duplicated layers carry two vectors (ket copy 0, bra copy 1).
struct SpinConfig {
    std::vector<std::array<SpinVec, 2>> vals;

    static SpinConfig zeros_like(const LayeredNetwork& net);  // all spins +1

    SpinVec& at(int layer, int copy) { return vals[layer][copy]; }
    const SpinVec& at(int layer, int copy) const { return vals[layer][copy]; }

    // measured units of `net` in site order
    SpinVec visible(const LayeredNetwork& net) const;
};

// Two-layer view of an RBM: layer 0 = visible, layer 1 = hidden (duplicated).
LayeredNetwork promote_to_layered(const NetworkParams& params);

// Line-oriented text format, exact decimal round trip (17 significant digits).
void save_params(const NetworkParams& params, std::ostream& out);
void save_params(const NetworkParams& params, const std::string& path);
NetworkParams load_params(std::istream& in);
NetworkParams load_params(const std::string& path);

// FNV-1a over the serialized text; recorded in experiment output so a row
// can be traced back to the exact parameters that produced it.
std::uint64_t params_hash(const NetworkParams& params);

}  // namespace nqs

#endif
