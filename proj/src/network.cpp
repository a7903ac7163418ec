#include "nqs/network.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nqs {

namespace {

bool all_finite(const Eigen::MatrixXcd& m) {
    return m.real().allFinite() && m.imag().allFinite();
}

void format_double(std::string& out, double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out += buf;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw std::runtime_error("parameter file, line " + std::to_string(line) + ": " + what);
}

}  // namespace

NetworkParams NetworkParams::zeros(Eigen::Index n_visible, Eigen::Index n_hidden) {
    NetworkParams p;
    p.n_visible = n_visible;
    p.n_hidden = n_hidden;
    p.weights = Eigen::MatrixXcd::Zero(n_visible, n_hidden);
    p.visible_bias = Eigen::VectorXcd::Zero(n_visible);
    p.hidden_bias = Eigen::VectorXcd::Zero(n_hidden);
    return p;
}

void NetworkParams::validate() const {
    if (n_visible < 1 || n_hidden < 1)
        throw std::invalid_argument("NetworkParams: need at least one visible and one hidden unit");
    if (weights.rows() != n_visible || weights.cols() != n_hidden)
        throw std::invalid_argument("NetworkParams: weight matrix shape mismatch");
    if (visible_bias.size() != n_visible || hidden_bias.size() != n_hidden)
        throw std::invalid_argument("NetworkParams: bias length mismatch");
    if (!all_finite(weights) || !all_finite(visible_bias) || !all_finite(hidden_bias))
        throw std::invalid_argument("NetworkParams: non-finite entry");
}

Complex rbm_energy(std::span<const std::int8_t> v, std::span<const std::int8_t> h,
                   const NetworkParams& params) {
    if (static_cast<Eigen::Index>(v.size()) != params.n_visible ||
        static_cast<Eigen::Index>(h.size()) != params.n_hidden)
        throw std::invalid_argument("rbm_energy: configuration shape mismatch");
    Complex e = 0.0;
    for (Eigen::Index j = 0; j < params.n_hidden; ++j) {
        if (h[j] == 0) throw std::invalid_argument("rbm_energy: spins must be +-1");
        Complex col = params.hidden_bias(j);
        for (Eigen::Index i = 0; i < params.n_visible; ++i)
            col += static_cast<double>(v[i]) * params.weights(i, j);
        e += static_cast<double>(h[j]) * col;
    }
    for (Eigen::Index i = 0; i < params.n_visible; ++i)
        e += static_cast<double>(v[i]) * params.visible_bias(i);
    return -e;
}

std::pair<NetworkParams, NetworkParams> split_params(const NetworkParams& params) {
    NetworkParams re = NetworkParams::zeros(params.n_visible, params.n_hidden);
    NetworkParams im = re;
    re.weights = params.weights.real().cast<Complex>();
    re.visible_bias = params.visible_bias.real().cast<Complex>();
    re.hidden_bias = params.hidden_bias.real().cast<Complex>();
    im.weights = params.weights.imag().cast<Complex>();
    im.visible_bias = params.visible_bias.imag().cast<Complex>();
    im.hidden_bias = params.hidden_bias.imag().cast<Complex>();
    return {re, im};
}

long LayeredNetwork::total_units() const {
    long n = 0;
    for (const Layer& l : layers) n += l.duplicated ? 2 * l.n_units : l.n_units;
    return n;
}

void LayeredNetwork::validate() const {
    if (layers.empty()) throw std::invalid_argument("LayeredNetwork: no layers");
    if (couplings.size() + 1 != layers.size())
        throw std::invalid_argument("LayeredNetwork: need exactly one coupling block per adjacent pair");
    if (layers[0].duplicated)
        throw std::invalid_argument("LayeredNetwork: layer 0 must not be duplicated");
    for (size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].bias.size() != layers[l].n_units)
            throw std::invalid_argument("LayeredNetwork: bias length mismatch");
        if (!all_finite(layers[l].bias))
            throw std::invalid_argument("LayeredNetwork: non-finite bias");
    }
    for (size_t l = 0; l < couplings.size(); ++l) {
        if (couplings[l].rows() != layers[l].n_units || couplings[l].cols() != layers[l + 1].n_units)
            throw std::invalid_argument("LayeredNetwork: coupling block shape mismatch");
        if (!all_finite(couplings[l]))
            throw std::invalid_argument("LayeredNetwork: non-finite coupling");
    }
    std::vector<long> seen(layers.size(), 0);
    for (auto [layer, unit] : measured) {
        if (layer < 0 || layer >= n_layers() || unit < 0 || unit >= layers[layer].n_units)
            throw std::invalid_argument("LayeredNetwork: measured unit out of range");
        if (layers[layer].duplicated)
            throw std::invalid_argument("LayeredNetwork: measured unit in a duplicated layer");
        ++seen[layer];
    }
    // hidden (unmeasured) layers are exactly the duplicated ones
    for (size_t l = 0; l < layers.size(); ++l)
        if (!layers[l].duplicated && seen[l] != layers[l].n_units)
            throw std::invalid_argument("LayeredNetwork: non-duplicated layer not fully measured");
}

SpinConfig SpinConfig::zeros_like(const LayeredNetwork& net) {
    SpinConfig cfg;
    cfg.vals.resize(net.layers.size());
    for (size_t l = 0; l < net.layers.size(); ++l) {
        cfg.vals[l][0].assign(net.layers[l].n_units, 1);
        if (net.layers[l].duplicated) cfg.vals[l][1].assign(net.layers[l].n_units, 1);
    }
    return cfg;
}

SpinVec SpinConfig::visible(const LayeredNetwork& net) const {
    SpinVec v(net.measured.size());
    for (size_t s = 0; s < net.measured.size(); ++s)
        v[s] = vals[net.measured[s].first][0][net.measured[s].second];
    return v;
}

LayeredNetwork promote_to_layered(const NetworkParams& params) {
    params.validate();
    LayeredNetwork net;
    net.layers.push_back({params.n_visible, params.visible_bias, false});
    net.layers.push_back({params.n_hidden, params.hidden_bias, true});
    net.couplings.push_back(params.weights);
    net.measured.resize(params.n_visible);
    for (Eigen::Index i = 0; i < params.n_visible; ++i) net.measured[i] = {0, static_cast<int>(i)};
    return net;
}

void save_params(const NetworkParams& params, std::ostream& out) {
    params.validate();
    std::string text = "nqs-rbm 1\n";
    text += "visible " + std::to_string(params.n_visible) + "\n";
    text += "hidden " + std::to_string(params.n_hidden) + "\n";
    for (Eigen::Index i = 0; i < params.n_visible; ++i)
        for (Eigen::Index j = 0; j < params.n_hidden; ++j) {
            text += "W " + std::to_string(i) + " " + std::to_string(j) + " ";
            format_double(text, params.weights(i, j).real());
            text += " ";
            format_double(text, params.weights(i, j).imag());
            text += "\n";
        }
    for (Eigen::Index i = 0; i < params.n_visible; ++i) {
        text += "d " + std::to_string(i) + " ";
        format_double(text, params.visible_bias(i).real());
        text += " ";
        format_double(text, params.visible_bias(i).imag());
        text += "\n";
    }
    for (Eigen::Index j = 0; j < params.n_hidden; ++j) {
        text += "b " + std::to_string(j) + " ";
        format_double(text, params.hidden_bias(j).real());
        text += " ";
        format_double(text, params.hidden_bias(j).imag());
        text += "\n";
    }
    out << text;
}

void save_params(const NetworkParams& params, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    save_params(params, f);
}

NetworkParams load_params(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line[0] != '#') return true;
        }
        return false;
    };
    if (!next_line()) parse_fail(lineno, "empty file");
    {
        std::istringstream ss(line);
        std::string magic;
        int version = 0;
        if (!(ss >> magic >> version) || magic != "nqs-rbm" || version != 1)
            parse_fail(lineno, "expected header 'nqs-rbm 1'");
    }
    auto read_count = [&](const std::string& key) -> Eigen::Index {
        if (!next_line()) parse_fail(lineno, "missing '" + key + "' line");
        std::istringstream ss(line);
        std::string k;
        long n = 0;
        if (!(ss >> k >> n) || k != key || n < 1) parse_fail(lineno, "expected '" + key + " <count>'");
        return n;
    };
    const Eigen::Index nv = read_count("visible");
    const Eigen::Index nh = read_count("hidden");
    NetworkParams p = NetworkParams::zeros(nv, nh);
    const long rows = nv * nh + nv + nh;
    for (long r = 0; r < rows; ++r) {
        if (!next_line()) parse_fail(lineno, "truncated file");
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "W") {
            long i, j;
            double re, im;
            if (!(ss >> i >> j >> re >> im) || i < 0 || i >= nv || j < 0 || j >= nh)
                parse_fail(lineno, "bad weight row");
            p.weights(i, j) = Complex(re, im);
        } else if (tag == "d" || tag == "b") {
            long i;
            double re, im;
            const Eigen::Index lim = tag == "d" ? nv : nh;
            if (!(ss >> i >> re >> im) || i < 0 || i >= lim) parse_fail(lineno, "bad bias row");
            (tag == "d" ? p.visible_bias(i) : p.hidden_bias(i)) = Complex(re, im);
        } else {
            parse_fail(lineno, "unknown row tag '" + tag + "'");
        }
    }
    p.validate();
    return p;
}

NetworkParams load_params(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return load_params(f);
}

std::uint64_t params_hash(const NetworkParams& params) {
    std::ostringstream ss;
    save_params(params, ss);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : ss.str()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace nqs
