#ifndef NQS_SAMPLER_HPP
#define NQS_SAMPLER_HPP

#include "nqs/network.hpp"
#include "nqs/rng.hpp"

#include <functional>

namespace nqs {

struct SamplerConfig {
    long n_samples = 0;
    long burn_in = 1000;
    long thin = 1;
    int n_chains = 4;
    std::uint64_t seed = 0;

    void validate() const;
};

// One emitted sample: measured units in site order plus the joint bra/ket
// phase of the full configuration, evaluated at record time.
struct SampleRecord {
    SpinVec visible;
    double phase = 0.0;
    int chain = 0;
    long sweep = 0;
};

// p(unit = +1 | neighbors) for +-1 units with the given real local field
double conditional_flip_prob(double local_field);

// Block Gibbs engine over the real-part Boltzmann distribution
// P(v, h, h_bra) of a layered network. Even-indexed layers are updated given
// odd ones, then odd given even; both copies of a duplicated layer are
// updated in the same half-sweep (their conditionals factorize). Purely
// imaginary couplings contribute no field, so the affected units are
// updated as fair coins rather than frozen.
class GibbsSampler {
  public:
    explicit GibbsSampler(const LayeredNetwork& net);

    void init_config(SpinConfig& config, ChainRng& rng) const;
    void sweep(SpinConfig& config, ChainRng& rng) const;
    double phase(const SpinConfig& config) const;
    void read_visible(const SpinConfig& config, SpinVec& out) const;

    const LayeredNetwork& net() const { return *net_; }

  private:
    void update_layer(int layer, SpinConfig& config, ChainRng& rng) const;

    const LayeredNetwork* net_;
    std::vector<Eigen::MatrixXd> real_couplings_, imag_couplings_;
    std::vector<Eigen::VectorXd> real_biases_, imag_biases_;
    std::vector<bool> rc_zero_, ic_zero_, rb_zero_, ib_zero_;
};

// One sweep with a throwaway engine; convenience for tests and small runs.
void gibbs_sweep(SpinConfig& config, const LayeredNetwork& net, ChainRng& rng);

// Chains are seeded from (seed, chain index) through a counter-based
// generator, so the merged chain-major stream is identical for any thread
// count. Visitors are created once per chain up front and each is touched by
// exactly one worker.
using RecordVisitor = std::function<void(const SampleRecord&)>;
using VisitorFactory = std::function<RecordVisitor(int chain)>;

void run_chains_visit(const LayeredNetwork& net, const SamplerConfig& cfg,
                      const VisitorFactory& factory, int n_threads = 0);

// materialized records in chain-major order
std::vector<SampleRecord> run_chains(const LayeredNetwork& net, const SamplerConfig& cfg,
                                     int n_threads = 0);

// number of records chain `chain` contributes to a run of cfg.n_samples
long chain_share(const SamplerConfig& cfg, int chain);

}  // namespace nqs

#endif
