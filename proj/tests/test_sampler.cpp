#include "nqs/sampler.hpp"

#include "nqs/amplitudes.hpp"
#include "nqs/oracle.hpp"
#include "nqs/rotations.hpp"
#include "nqs/states.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

using namespace nqs;

namespace {

NetworkParams random_real_params(int n, int m, std::uint64_t seed, double scale = 0.5) {
    ChainRng rng(seed, 0);
    NetworkParams p = NetworkParams::zeros(n, m);
    auto r = [&]() { return scale * (2.0 * rng.next_double() - 1.0); };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) p.weights(i, j) = r();
    for (int i = 0; i < n; ++i) p.visible_bias(i) = r();
    for (int j = 0; j < m; ++j) p.hidden_bias(j) = r();
    return p;
}

bool records_equal(const std::vector<SampleRecord>& a, const std::vector<SampleRecord>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].visible != b[i].visible || a[i].phase != b[i].phase ||
            a[i].chain != b[i].chain || a[i].sweep != b[i].sweep)
            return false;
    return true;
}

// total-variation distance between an empirical histogram and a probability
// vector
double tv_distance(const std::vector<double>& counts, const std::vector<double>& probs, double n) {
    double tv = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) tv += std::abs(counts[i] / n - probs[i]);
    return tv / 2.0;
}

}  // namespace

TEST_CASE("conditional flip probability") {
    CHECK(conditional_flip_prob(0.0) == 0.5);
    CHECK(conditional_flip_prob(1e6) == doctest::Approx(1.0));
    CHECK(conditional_flip_prob(-1e6) == doctest::Approx(0.0));
    CHECK(conditional_flip_prob(0.5) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
    CHECK_THROWS_AS(conditional_flip_prob(std::nan("")), std::invalid_argument);
}

TEST_CASE("sampler config validation") {
    SamplerConfig bad;
    bad.n_samples = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.n_samples = 10;
    bad.thin = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("identical configs give bit-identical streams across thread counts") {
    const LayeredNetwork net = attach_rotations(bell_complex(), parse_basis("XX"));
    SamplerConfig cfg;
    cfg.n_samples = 5000;
    cfg.burn_in = 50;
    cfg.n_chains = 4;
    cfg.seed = 99;
    const auto a = run_chains(net, cfg, 1);
    const auto b = run_chains(net, cfg, 1);
    const auto c = run_chains(net, cfg, 4);
    const auto d = run_chains(net, cfg, 8);
    CHECK(records_equal(a, b));
    CHECK(records_equal(a, c));
    CHECK(records_equal(a, d));
}

TEST_CASE("chain shares partition the requested sample count") {
    SamplerConfig cfg;
    cfg.n_samples = 1000000;
    cfg.n_chains = 4;
    for (int c = 0; c < 4; ++c) CHECK(chain_share(cfg, c) == 250000);
    cfg.n_samples = 10;
    cfg.n_chains = 4;
    CHECK(chain_share(cfg, 0) == 3);
    CHECK(chain_share(cfg, 3) == 2);
}

TEST_CASE("all-zero network samples uniform units") {
    const LayeredNetwork net = promote_to_layered(NetworkParams::zeros(3, 2));
    SamplerConfig cfg;
    cfg.n_samples = 100000;
    cfg.burn_in = 10;
    cfg.seed = 5;
    const auto records = run_chains(net, cfg);
    std::vector<double> mean(3, 0.0);
    for (const auto& r : records)
        for (int i = 0; i < 3; ++i) mean[i] += r.visible[i];
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(mean[i] / cfg.n_samples) < 4.0 / std::sqrt(double(cfg.n_samples)));
}

TEST_CASE("purely imaginary networks sample uniformly (Bell z-basis)") {
    const LayeredNetwork net = promote_to_layered(bell_imaginary());
    SamplerConfig cfg;
    cfg.n_samples = 1000000;
    cfg.burn_in = 100;
    cfg.seed = 17;
    std::vector<double> counts(4, 0.0);
    run_chains_visit(net, cfg, [&counts](int) -> RecordVisitor {
        return [&counts](const SampleRecord& r) { counts[spins_to_index(r.visible)] += 1.0; };
    });
    CHECK(tv_distance(counts, {0.25, 0.25, 0.25, 0.25}, double(cfg.n_samples)) < 0.01);
}

TEST_CASE("visible marginal matches enumeration for a real network") {
    const NetworkParams p = random_real_params(2, 2, 21);
    const auto [re, im] = split_params(p);
    const LayeredNetwork net = promote_to_layered(p);

    // P(v) ~ sum_{h, h_bra} P(v, h, h_bar) by brute force
    std::vector<double> probs(4, 0.0);
    double z = 0.0;
    for (std::uint64_t vb = 0; vb < 4; ++vb) {
        const SpinVec v = index_to_spins(vb, 2);
        for (std::uint64_t hb = 0; hb < 4; ++hb)
            for (std::uint64_t gb = 0; gb < 4; ++gb) {
                const double w =
                    joint_weight(v, index_to_spins(hb, 2), index_to_spins(gb, 2), re);
                probs[vb] += w;
                z += w;
            }
    }
    for (double& q : probs) q /= z;

    SamplerConfig cfg;
    cfg.n_samples = 1000000;
    cfg.burn_in = 200;
    cfg.seed = 23;
    std::vector<double> counts(4, 0.0);
    run_chains_visit(net, cfg, [&counts](int) -> RecordVisitor {
        return [&counts](const SampleRecord& r) { counts[spins_to_index(r.visible)] += 1.0; };
    });
    CHECK(tv_distance(counts, probs, double(cfg.n_samples)) < 0.01);
}

TEST_CASE("stationary distribution over all units matches the joint weight") {
    const NetworkParams p = random_real_params(3, 2, 31, 0.4);
    const auto [re, im] = split_params(p);
    const LayeredNetwork net = promote_to_layered(p);

    std::vector<double> probs(1 << 7, 0.0);
    double z = 0.0;
    for (std::uint64_t b = 0; b < (1u << 7); ++b) {
        const SpinVec v = index_to_spins(b & 7, 3);
        const SpinVec h = index_to_spins((b >> 3) & 3, 2);
        const SpinVec g = index_to_spins((b >> 5) & 3, 2);
        const double w = joint_weight(v, h, g, re);
        probs[b] = w;
        z += w;
    }
    for (double& q : probs) q /= z;

    GibbsSampler sampler(net);
    ChainRng rng(7, 0);
    SpinConfig cfg;
    sampler.init_config(cfg, rng);
    for (int t = 0; t < 500; ++t) sampler.sweep(cfg, rng);
    std::vector<double> counts(1 << 7, 0.0);
    const long q = 1000000;
    for (long t = 0; t < q; ++t) {
        sampler.sweep(cfg, rng);
        std::uint64_t b = spins_to_index(cfg.at(0, 0));
        b |= spins_to_index(cfg.at(1, 0)) << 3;
        b |= spins_to_index(cfg.at(1, 1)) << 5;
        counts[b] += 1.0;
    }
    CHECK(tv_distance(counts, probs, double(q)) < 0.01);
}

TEST_CASE("sampler phase and weight agree with the amplitude module") {
    for (const char* basis : {"ZZZ", "XXX", "XZX"}) {
        NetworkParams p = random_real_params(3, 2, 41, 0.6);
        p.weights(0, 0) += Complex(0.0, 0.9);
        p.visible_bias(1) += Complex(0.0, -0.4);
        const LayeredNetwork net = attach_rotations(p, parse_basis(basis));
        GibbsSampler sampler(net);
        ChainRng rng(3, 2);
        SpinConfig cfg;
        sampler.init_config(cfg, rng);
        for (int t = 0; t < 50; ++t) {
            sampler.sweep(cfg, rng);
            const PhaseWeight pw = layered_phase_weight(cfg, net);
            CHECK(sampler.phase(cfg) == doctest::Approx(pw.phase).epsilon(1e-12));
        }
    }
}

TEST_CASE("rotated-network visible marginal matches enumeration") {
    const LayeredNetwork net = attach_rotations(bell_complex(), parse_basis("XX"));
    // enumerate P(w) ~ sum_hidden exp(log_weight) over the 2^8 configurations
    std::vector<double> probs(4, 0.0);
    double z = 0.0;
    SpinConfig cfg = SpinConfig::zeros_like(net);
    for (std::uint64_t b = 0; b < 256; ++b) {
        std::uint64_t bits = b;
        for (size_t l = 0; l < cfg.vals.size(); ++l)
            for (int c = 0; c < (net.layers[l].duplicated ? 2 : 1); ++c)
                for (auto& s : cfg.vals[l][c]) {
                    s = (bits & 1) ? -1 : 1;
                    bits >>= 1;
                }
        const PhaseWeight pw = layered_phase_weight(cfg, net);
        const double w = std::exp(pw.log_weight);
        probs[spins_to_index(cfg.visible(net))] += w;
        z += w;
    }
    for (double& q : probs) q /= z;

    SamplerConfig scfg;
    scfg.n_samples = 400000;
    scfg.burn_in = 100;
    scfg.seed = 29;
    std::vector<double> counts(4, 0.0);
    run_chains_visit(net, scfg, [&counts](int) -> RecordVisitor {
        return [&counts](const SampleRecord& r) { counts[spins_to_index(r.visible)] += 1.0; };
    });
    CHECK(tv_distance(counts, probs, double(scfg.n_samples)) < 0.01);
}

TEST_CASE("record sweep counters and chain labels") {
    const LayeredNetwork net = promote_to_layered(bell_imaginary());
    SamplerConfig cfg;
    cfg.n_samples = 10;
    cfg.n_chains = 2;
    cfg.burn_in = 3;
    cfg.thin = 2;
    cfg.seed = 1;
    const auto records = run_chains(net, cfg, 1);
    REQUIRE(records.size() == 10);
    CHECK(records[0].chain == 0);
    CHECK(records[0].sweep == 5);
    CHECK(records[1].sweep == 7);
    CHECK(records[5].chain == 1);
    CHECK(records[5].sweep == 5);
}
