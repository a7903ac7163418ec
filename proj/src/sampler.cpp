#include "nqs/sampler.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace nqs {

void SamplerConfig::validate() const {
    if (n_samples < 1) throw std::invalid_argument("SamplerConfig: n_samples must be >= 1");
    if (thin < 1) throw std::invalid_argument("SamplerConfig: thin must be >= 1");
    if (n_chains < 1) throw std::invalid_argument("SamplerConfig: n_chains must be >= 1");
    if (burn_in < 0) throw std::invalid_argument("SamplerConfig: burn_in must be >= 0");
}

double conditional_flip_prob(double local_field) {
    if (!std::isfinite(local_field))
        throw std::invalid_argument("conditional_flip_prob: non-finite field");
    return 1.0 / (1.0 + std::exp(-2.0 * local_field));
}

GibbsSampler::GibbsSampler(const LayeredNetwork& net) : net_(&net) {
    net.validate();
    const int nl = net.n_layers();
    real_couplings_.resize(net.couplings.size());
    imag_couplings_.resize(net.couplings.size());
    rc_zero_.resize(net.couplings.size());
    ic_zero_.resize(net.couplings.size());
    for (size_t l = 0; l < net.couplings.size(); ++l) {
        real_couplings_[l] = net.couplings[l].real();
        imag_couplings_[l] = net.couplings[l].imag();
        rc_zero_[l] = real_couplings_[l].isZero(0.0);
        ic_zero_[l] = imag_couplings_[l].isZero(0.0);
    }
    real_biases_.resize(nl);
    imag_biases_.resize(nl);
    rb_zero_.resize(nl);
    ib_zero_.resize(nl);
    for (int l = 0; l < nl; ++l) {
        real_biases_[l] = net.layers[l].bias.real();
        imag_biases_[l] = net.layers[l].bias.imag();
        rb_zero_[l] = real_biases_[l].isZero(0.0);
        ib_zero_[l] = imag_biases_[l].isZero(0.0);
    }
}

void GibbsSampler::init_config(SpinConfig& config, ChainRng& rng) const {
    config = SpinConfig::zeros_like(*net_);
    for (size_t l = 0; l < config.vals.size(); ++l) {
        const int copies = net_->layers[l].duplicated ? 2 : 1;
        for (int c = 0; c < copies; ++c)
            for (auto& s : config.vals[l][c]) s = static_cast<std::int8_t>(rng.next_spin());
    }
}

void GibbsSampler::update_layer(int layer, SpinConfig& config, ChainRng& rng) const {
    const LayeredNetwork& net = *net_;
    const bool dup = net.layers[layer].duplicated;
    const int copies = dup ? 2 : 1;
    const double bias_mult = dup ? 1.0 : 2.0;
    const Eigen::Index n = net.layers[layer].n_units;

    for (int c = 0; c < copies; ++c) {
        SpinVec& u = config.vals[layer][c];
        for (Eigen::Index i = 0; i < n; ++i) {
            double f = rb_zero_[layer] ? 0.0 : bias_mult * real_biases_[layer](i);
            if (layer > 0 && !rc_zero_[layer - 1]) {
                const Eigen::MatrixXd& w = real_couplings_[layer - 1];
                const bool nb_dup = net.layers[layer - 1].duplicated;
                if (dup) {
                    const SpinVec& lo = config.vals[layer - 1][nb_dup ? c : 0];
                    for (Eigen::Index k = 0; k < w.rows(); ++k) f += lo[k] * w(k, i);
                } else if (nb_dup) {
                    const SpinVec& a = config.vals[layer - 1][0];
                    const SpinVec& b = config.vals[layer - 1][1];
                    for (Eigen::Index k = 0; k < w.rows(); ++k) f += (a[k] + b[k]) * w(k, i);
                } else {
                    const SpinVec& lo = config.vals[layer - 1][0];
                    for (Eigen::Index k = 0; k < w.rows(); ++k) f += 2.0 * lo[k] * w(k, i);
                }
            }
            if (layer + 1 < net.n_layers() && !rc_zero_[layer]) {
                const Eigen::MatrixXd& w = real_couplings_[layer];
                const bool nb_dup = net.layers[layer + 1].duplicated;
                if (dup) {
                    const SpinVec& up = config.vals[layer + 1][nb_dup ? c : 0];
                    for (Eigen::Index k = 0; k < w.cols(); ++k) f += w(i, k) * up[k];
                } else if (nb_dup) {
                    const SpinVec& a = config.vals[layer + 1][0];
                    const SpinVec& b = config.vals[layer + 1][1];
                    for (Eigen::Index k = 0; k < w.cols(); ++k) f += w(i, k) * (a[k] + b[k]);
                } else {
                    const SpinVec& up = config.vals[layer + 1][0];
                    for (Eigen::Index k = 0; k < w.cols(); ++k) f += 2.0 * w(i, k) * up[k];
                }
            }
            const double p = 1.0 / (1.0 + std::exp(-2.0 * f));
            u[i] = rng.next_double() < p ? 1 : -1;
        }
    }
}

void GibbsSampler::sweep(SpinConfig& config, ChainRng& rng) const {
    const int nl = net_->n_layers();
    for (int l = 0; l < nl; l += 2) update_layer(l, config, rng);
    for (int l = 1; l < nl; l += 2) update_layer(l, config, rng);
}

double GibbsSampler::phase(const SpinConfig& config) const {
    const LayeredNetwork& net = *net_;
    double phi = 0.0;
    for (int l = 0; l < net.n_layers(); ++l) {
        if (ib_zero_[l] || !net.layers[l].duplicated) continue;
        const SpinVec& a = config.vals[l][0];
        const SpinVec& b = config.vals[l][1];
        for (Eigen::Index i = 0; i < net.layers[l].n_units; ++i)
            phi += imag_biases_[l](i) * (a[i] - b[i]);
    }
    for (size_t l = 0; l < net.couplings.size(); ++l) {
        if (ic_zero_[l]) continue;
        const bool lo_dup = net.layers[l].duplicated;
        const bool hi_dup = net.layers[l + 1].duplicated;
        if (!lo_dup && !hi_dup) continue;  // identical in both chains
        const Eigen::MatrixXd& w = imag_couplings_[l];
        const SpinVec& a0 = config.vals[l][0];
        const SpinVec& a1 = config.vals[l][lo_dup ? 1 : 0];
        const SpinVec& b0 = config.vals[l + 1][0];
        const SpinVec& b1 = config.vals[l + 1][hi_dup ? 1 : 0];
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                phi += w(i, j) * (a0[i] * b0[j] - a1[i] * b1[j]);
    }
    return phi;
}

void GibbsSampler::read_visible(const SpinConfig& config, SpinVec& out) const {
    const auto& measured = net_->measured;
    out.resize(measured.size());
    for (size_t s = 0; s < measured.size(); ++s)
        out[s] = config.vals[measured[s].first][0][measured[s].second];
}

void gibbs_sweep(SpinConfig& config, const LayeredNetwork& net, ChainRng& rng) {
    GibbsSampler(net).sweep(config, rng);
}

long chain_share(const SamplerConfig& cfg, int chain) {
    const long base = cfg.n_samples / cfg.n_chains;
    const long rem = cfg.n_samples % cfg.n_chains;
    return base + (chain < rem ? 1 : 0);
}

namespace {

void run_one_chain(const GibbsSampler& sampler, const SamplerConfig& cfg, int chain,
                   const RecordVisitor& visit) {
    ChainRng rng(cfg.seed, static_cast<std::uint64_t>(chain));
    SpinConfig config;
    sampler.init_config(config, rng);
    for (long t = 0; t < cfg.burn_in; ++t) sampler.sweep(config, rng);

    const long want = chain_share(cfg, chain);
    SampleRecord rec;
    rec.chain = chain;
    for (long r = 0; r < want; ++r) {
        for (long k = 0; k < cfg.thin; ++k) sampler.sweep(config, rng);
        rec.sweep = cfg.burn_in + (r + 1) * cfg.thin;
        sampler.read_visible(config, rec.visible);
        rec.phase = sampler.phase(config);
        visit(rec);
    }
}

}  // namespace

void run_chains_visit(const LayeredNetwork& net, const SamplerConfig& cfg,
                      const VisitorFactory& factory, int n_threads) {
    cfg.validate();
    GibbsSampler sampler(net);

    std::vector<RecordVisitor> visitors(cfg.n_chains);
    for (int c = 0; c < cfg.n_chains; ++c) visitors[c] = factory(c);

    if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, cfg.n_chains));

    if (n_threads == 1) {
        for (int c = 0; c < cfg.n_chains; ++c) run_one_chain(sampler, cfg, c, visitors[c]);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back([&]() {
            for (int c = next.fetch_add(1); c < cfg.n_chains; c = next.fetch_add(1))
                run_one_chain(sampler, cfg, c, visitors[c]);
        });
    for (auto& th : pool) th.join();
}

std::vector<SampleRecord> run_chains(const LayeredNetwork& net, const SamplerConfig& cfg,
                                     int n_threads) {
    cfg.validate();
    std::vector<std::vector<SampleRecord>> per_chain(cfg.n_chains);
    run_chains_visit(
        net, cfg,
        [&per_chain](int chain) -> RecordVisitor {
            auto* sink = &per_chain[chain];
            return [sink](const SampleRecord& r) { sink->push_back(r); };
        },
        n_threads);
    std::vector<SampleRecord> merged;
    merged.reserve(static_cast<size_t>(cfg.n_samples));
    for (auto& v : per_chain)
        for (auto& r : v) merged.push_back(std::move(r));
    return merged;
}

}  // namespace nqs
