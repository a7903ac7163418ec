#include "nqs/estimator.hpp"

#include "nqs/amplitudes.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nqs {

SiteProduct SiteProduct::from_support(const PauliString& op) {
    SiteProduct sp;
    sp.sites = op.support();
    return sp;
}

void Accumulator::add(double observable, double phase) {
    const double y = std::cos(phase);
    const double yi = std::sin(phase);
    const double x = observable * y;
    num += Complex(x, observable * yi);
    den += Complex(y, yi);
    sum_x += x;
    sum_x2 += x * x;
    sum_y += y;
    sum_y2 += y * y;
    sum_yi2 += yi * yi;
    ++n;
}

void Accumulator::merge(const Accumulator& other) {
    num += other.num;
    den += other.den;
    sum_x += other.sum_x;
    sum_x2 += other.sum_x2;
    sum_y += other.sum_y;
    sum_y2 += other.sum_y2;
    sum_yi2 += other.sum_yi2;
    n += other.n;
}

namespace {

double sample_sd(double sum, double sum2, long n) {
    if (n < 2) return 0.0;
    const double mean = sum / n;
    const double var = (sum2 - n * mean * mean) / (n - 1);
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

double propagate(double mean_num, double mean_den, double sd_num, double sd_den,
                 bool quadrature) {
    const double t1 = sd_num / mean_den;
    const double t2 = mean_num * sd_den / (mean_den * mean_den);
    return quadrature ? std::hypot(t1, t2) : std::abs(t1) + std::abs(t2);
}

}  // namespace

double sampling_error(const Accumulator& acc, bool quadrature) {
    if (acc.n < 2) return 0.0;
    const double sd_x = sample_sd(acc.sum_x, acc.sum_x2, acc.n);
    const double sd_y = sample_sd(acc.sum_y, acc.sum_y2, acc.n);
    const double xbar = acc.sum_x / acc.n;
    const double ybar = acc.sum_y / acc.n;
    return propagate(xbar, ybar, sd_x, sd_y, quadrature) / std::sqrt(static_cast<double>(acc.n));
}

EstimateReport finalize(const Accumulator& acc, std::uint64_t seed, const EstimateOptions& opts) {
    if (acc.n < 1) throw std::invalid_argument("finalize: no samples");
    EstimateReport rep;
    rep.n_samples = acc.n;
    rep.seed = seed;
    rep.raw_numerator = acc.num;
    rep.raw_denominator = acc.den;
    rep.value = acc.sum_x / acc.sum_y;
    rep.std_error = sampling_error(acc, opts.quadrature_error);

    const double mean_mag = std::abs(acc.den) / acc.n;
    rep.undersampled = mean_mag < opts.undersample_threshold;
    if (acc.n >= 2) {
        const double sd_re = sample_sd(acc.sum_y, acc.sum_y2, acc.n);
        const double mean_im = acc.den.imag() / acc.n;
        const double var_im = (acc.sum_yi2 - acc.n * mean_im * mean_im) / (acc.n - 1);
        const double sd_mag = std::sqrt(sd_re * sd_re + std::max(0.0, var_im));
        if (mean_mag < opts.undersample_z * sd_mag / std::sqrt(static_cast<double>(acc.n)))
            rep.undersampled = true;
    }
    const Complex ratio = acc.num / acc.den;
    rep.imag_residual = std::abs(ratio.real() - rep.value);
    return rep;
}

EstimateReport reweighted_expectation(std::span<const SampleRecord> records,
                                      const SiteProduct& diag, std::uint64_t seed,
                                      const EstimateOptions& opts) {
    if (records.empty()) throw std::invalid_argument("reweighted_expectation: no records");
    Accumulator acc;
    for (const SampleRecord& r : records) acc.add(diag(r.visible), r.phase);
    return finalize(acc, seed, opts);
}

std::vector<EstimateReport> estimate_sampled(const LayeredNetwork& net, const SamplerConfig& cfg,
                                             const std::vector<SiteProduct>& observables,
                                             int n_threads, const EstimateOptions& opts) {
    const size_t k = observables.size();
    std::vector<std::vector<Accumulator>> per_chain(cfg.n_chains, std::vector<Accumulator>(k));
    run_chains_visit(
        net, cfg,
        [&per_chain, &observables, k](int chain) -> RecordVisitor {
            auto* accs = &per_chain[chain];
            const auto* obs = &observables;
            return [accs, obs, k](const SampleRecord& r) {
                for (size_t i = 0; i < k; ++i) (*accs)[i].add((*obs)[i](r.visible), r.phase);
            };
        },
        n_threads);
    std::vector<EstimateReport> out;
    out.reserve(k);
    for (size_t i = 0; i < k; ++i) {
        Accumulator total;
        for (int c = 0; c < cfg.n_chains; ++c) total.merge(per_chain[c][i]);
        out.push_back(finalize(total, cfg.seed, opts));
    }
    return out;
}

Complex local_operator(std::span<const std::int8_t> v, const PauliString& op,
                       const NetworkParams& params) {
    const ScaledCoefficient cv = coefficient_scaled(v, params);
    // the mantissa is a product of O(1) factors, so a vanishing amplitude
    // shows up as a mantissa at rounding level regardless of overall scale
    if (std::abs(cv.mantissa) < 1e-12)
        throw std::domain_error("local_operator: configuration has zero amplitude");
    const PauliAction act = pauli_action(op, v);
    const ScaledCoefficient ct = coefficient_scaled(act.flipped, params);
    return act.coeff * std::conj(ct.mantissa) / std::conj(cv.mantissa) *
           std::exp(ct.log_scale - cv.log_scale);
}

namespace {

// real/imag split of a layered network with zero-block flags; evaluates the
// joint (ket, bra) weight and phase of a full configuration
struct SplitNet {
    const LayeredNetwork* net;
    std::vector<Eigen::MatrixXd> re_c, im_c;
    std::vector<Eigen::VectorXd> re_b, im_b;
    std::vector<bool> re_c_zero, im_c_zero, re_b_zero, im_b_zero;

    explicit SplitNet(const LayeredNetwork& n) : net(&n) {
        const size_t nc = n.couplings.size();
        re_c.resize(nc);
        im_c.resize(nc);
        re_c_zero.resize(nc);
        im_c_zero.resize(nc);
        for (size_t l = 0; l < nc; ++l) {
            re_c[l] = n.couplings[l].real();
            im_c[l] = n.couplings[l].imag();
            re_c_zero[l] = re_c[l].isZero(0.0);
            im_c_zero[l] = im_c[l].isZero(0.0);
        }
        const size_t nl = n.layers.size();
        re_b.resize(nl);
        im_b.resize(nl);
        re_b_zero.resize(nl);
        im_b_zero.resize(nl);
        for (size_t l = 0; l < nl; ++l) {
            re_b[l] = n.layers[l].bias.real();
            im_b[l] = n.layers[l].bias.imag();
            re_b_zero[l] = re_b[l].isZero(0.0);
            im_b_zero[l] = im_b[l].isZero(0.0);
        }
    }

    PhaseWeight eval(const SpinConfig& cfg) const {
        double lw = 0.0, phi = 0.0;
        const auto& layers = net->layers;
        for (size_t l = 0; l < layers.size(); ++l) {
            const SpinVec& a = cfg.vals[l][0];
            const SpinVec& b = cfg.vals[l][layers[l].duplicated ? 1 : 0];
            if (!re_b_zero[l])
                for (Eigen::Index i = 0; i < layers[l].n_units; ++i)
                    lw += re_b[l](i) * (a[i] + b[i]);
            if (!im_b_zero[l] && layers[l].duplicated)
                for (Eigen::Index i = 0; i < layers[l].n_units; ++i)
                    phi += im_b[l](i) * (a[i] - b[i]);
        }
        for (size_t l = 0; l < net->couplings.size(); ++l) {
            const SpinVec& a0 = cfg.vals[l][0];
            const SpinVec& a1 = cfg.vals[l][layers[l].duplicated ? 1 : 0];
            const SpinVec& b0 = cfg.vals[l + 1][0];
            const SpinVec& b1 = cfg.vals[l + 1][layers[l + 1].duplicated ? 1 : 0];
            if (!re_c_zero[l]) {
                const Eigen::MatrixXd& w = re_c[l];
                for (Eigen::Index i = 0; i < w.rows(); ++i)
                    for (Eigen::Index j = 0; j < w.cols(); ++j)
                        lw += w(i, j) * (a0[i] * b0[j] + a1[i] * b1[j]);
            }
            if (!im_c_zero[l] && (layers[l].duplicated || layers[l + 1].duplicated)) {
                const Eigen::MatrixXd& w = im_c[l];
                for (Eigen::Index i = 0; i < w.rows(); ++i)
                    for (Eigen::Index j = 0; j < w.cols(); ++j)
                        phi += w(i, j) * (a0[i] * b0[j] - a1[i] * b1[j]);
            }
        }
        return {lw, phi};
    }
};

void assign_from_counter(SpinConfig& cfg, const LayeredNetwork& net, std::uint64_t counter) {
    for (size_t l = 0; l < net.layers.size(); ++l) {
        const int copies = net.layers[l].duplicated ? 2 : 1;
        for (int c = 0; c < copies; ++c) {
            SpinVec& u = cfg.vals[l][c];
            for (auto& s : u) {
                s = (counter & 1ull) ? -1 : 1;
                counter >>= 1;
            }
        }
    }
}

}  // namespace

std::vector<EnumeratedEstimate> enumerate_reweighted(const LayeredNetwork& net,
                                                     const std::vector<SiteProduct>& observables) {
    net.validate();
    const long bits = net.total_units();
    if (bits > 26) throw std::invalid_argument("enumerate_reweighted: network too large to enumerate");
    const size_t k = observables.size();

    const SplitNet split(net);
    SpinConfig cfg = SpinConfig::zeros_like(net);
    SpinVec visible;

    double shift = -std::numeric_limits<double>::infinity();
    double total = 0.0, sy = 0.0, sy2 = 0.0;
    std::vector<double> sx(k, 0.0), sx2(k, 0.0), sxy(k, 0.0);

    for (std::uint64_t counter = 0; counter < (1ull << bits); ++counter) {
        assign_from_counter(cfg, net, counter);
        const PhaseWeight pw = split.eval(cfg);
        if (pw.log_weight > shift) {
            const double f = std::exp(shift - pw.log_weight);
            total *= f;
            sy *= f;
            sy2 *= f;
            for (size_t i = 0; i < k; ++i) {
                sx[i] *= f;
                sx2[i] *= f;
                sxy[i] *= f;
            }
            shift = pw.log_weight;
        }
        const double p = std::exp(pw.log_weight - shift);
        const double y = std::cos(pw.phase);
        total += p;
        sy += p * y;
        sy2 += p * y * y;
        visible.resize(net.measured.size());
        for (size_t s = 0; s < net.measured.size(); ++s)
            visible[s] = cfg.vals[net.measured[s].first][0][net.measured[s].second];
        for (size_t i = 0; i < k; ++i) {
            const double x = observables[i](visible) * y;
            sx[i] += p * x;
            sx2[i] += p * x * x;
            sxy[i] += p * x * y;
        }
    }

    std::vector<EnumeratedEstimate> out(k);
    const double mean_den = sy / total;
    const double var_den = std::max(0.0, sy2 / total - mean_den * mean_den);
    for (size_t i = 0; i < k; ++i) {
        const double mean_num = sx[i] / total;
        const double var_num = std::max(0.0, sx2[i] / total - mean_num * mean_num);
        out[i].value = mean_num / mean_den;
        out[i].mean_num = mean_num;
        out[i].mean_den = mean_den;
        out[i].sd_num = std::sqrt(var_num);
        out[i].sd_den = std::sqrt(var_den);
        out[i].cov = sxy[i] / total - mean_num * mean_den;
        out[i].sigma = propagate(mean_num, mean_den, out[i].sd_num, out[i].sd_den, false);
    }
    return out;
}

EnumeratedEstimate enumerate_reweighted(const LayeredNetwork& net, const SiteProduct& diag) {
    return enumerate_reweighted(net, std::vector<SiteProduct>{diag}).front();
}

double explicit_variance(const LayeredNetwork& net, const SiteProduct& diag) {
    return enumerate_reweighted(net, diag).sigma;
}

}  // namespace nqs
