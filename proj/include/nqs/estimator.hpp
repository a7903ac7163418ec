#ifndef NQS_ESTIMATOR_HPP
#define NQS_ESTIMATOR_HPP

#include "nqs/network.hpp"
#include "nqs/oracle.hpp"
#include "nqs/pauli.hpp"
#include "nqs/sampler.hpp"

namespace nqs {

// Diagonal observable on the measured layer: scale * product of the visible
// values on `sites`.
struct SiteProduct {
    std::vector<int> sites;
    double scale = 1.0;

    static SiteProduct from_support(const PauliString& op);

    double operator()(std::span<const std::int8_t> visible) const {
        double r = scale;
        for (int s : sites) r *= visible[s];
        return r;
    }
};

struct EstimateOptions {
    // |sum e^{i phi}| / Q below this is a phase-sum collapse
    double undersample_threshold = 1e-6;
    // also flag when the phase sum is statistically indistinguishable from
    // zero at this many standard errors
    double undersample_z = 2.0;
    // combine the two error-propagation terms in quadrature instead of the
    // printed absolute-value sum
    bool quadrature_error = false;
};

struct EstimateReport {
    double value = 0.0;
    Complex raw_numerator{0.0, 0.0};
    Complex raw_denominator{0.0, 0.0};
    double std_error = 0.0;
    long n_samples = 0;
    std::uint64_t seed = 0;
    bool undersampled = false;
    // |Re(num/den) - Re(num)/Re(den)|, the cost of taking real parts
    // separately rather than the real part of the complex ratio
    double imag_residual = 0.0;
};

// Commutative fold over records for one observable; partial sums from
// different chains merge associatively, so aggregation order is fixed by
// convention (chain-major) rather than by scheduling.
struct Accumulator {
    Complex num{0.0, 0.0};
    Complex den{0.0, 0.0};
    double sum_x = 0.0, sum_x2 = 0.0;  // x = Re(O e^{i phi})
    double sum_y = 0.0, sum_y2 = 0.0;  // y = Re(e^{i phi})
    double sum_yi2 = 0.0;              // Im(e^{i phi}) squared, for the flag
    long n = 0;

    void add(double observable, double phase);
    void merge(const Accumulator& other);
};

// propagated error per the two-term split of numerator and denominator
// fluctuations, divided by sqrt(Q)
double sampling_error(const Accumulator& acc, bool quadrature = false);

EstimateReport finalize(const Accumulator& acc, std::uint64_t seed,
                        const EstimateOptions& opts = {});

EstimateReport reweighted_expectation(std::span<const SampleRecord> records,
                                      const SiteProduct& diag, std::uint64_t seed,
                                      const EstimateOptions& opts = {});

// Streaming sampled estimates: one pass of the sampler, every observable
// accumulated per chain, chain-major combination.
std::vector<EstimateReport> estimate_sampled(const LayeredNetwork& net, const SamplerConfig& cfg,
                                             const std::vector<SiteProduct>& observables,
                                             int n_threads = 0, const EstimateOptions& opts = {});

// O_loc(v) = sum_vt <vt|O|v> c*_vt / c*_v; throws std::domain_error when
// c(v) = 0 (such configurations have zero sampling weight, so one appearing
// in a sample stream signals a bug upstream).
Complex local_operator(std::span<const std::int8_t> v, const PauliString& op,
                       const NetworkParams& params);

// Full enumeration over every network configuration (both hidden copies):
// the Q -> infinity limit of the sampled estimator, plus the exactly
// evaluated error-propagation sigma.
struct EnumeratedEstimate {
    double value = 0.0;
    double mean_num = 0.0;  // E[Re(O e^{i phi})] under P / sum P
    double mean_den = 0.0;  // E[Re(e^{i phi})]
    double sd_num = 0.0;    // population standard deviations of the terms
    double sd_den = 0.0;
    double cov = 0.0;       // covariance of the numerator and denominator terms
    double sigma = 0.0;     // sigma[<O>]; expected deviation at Q is sigma/sqrt(Q)

    double predicted_deviation(double q) const { return sigma / std::sqrt(q); }

    // Exact standard deviation of the ratio estimator to leading order in
    // 1/Q (delta method, correlations included); the printed two-term sum
    // `sigma` is an upper envelope of this.
    double ratio_sd(double q) const {
        const double v = value;
        const double var = sd_num * sd_num - 2.0 * v * cov + v * v * sd_den * sd_den;
        return std::sqrt(std::max(0.0, var)) / std::abs(mean_den) / std::sqrt(q);
    }

    // signal-to-noise of the phase sum at Q samples; the deviation tracks
    // the prediction only once this is well above 1
    double denominator_resolution(double q) const {
        return std::abs(mean_den) * std::sqrt(q) / sd_den;
    }
};

std::vector<EnumeratedEstimate> enumerate_reweighted(const LayeredNetwork& net,
                                                     const std::vector<SiteProduct>& observables);
EnumeratedEstimate enumerate_reweighted(const LayeredNetwork& net, const SiteProduct& diag);

// sigma[<O>] alone (the explicit-variance curve of the convergence plots)
double explicit_variance(const LayeredNetwork& net, const SiteProduct& diag);

}  // namespace nqs

#endif
