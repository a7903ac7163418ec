#include "nqs/estimator.hpp"

#include "nqs/amplitudes.hpp"
#include "nqs/rng.hpp"
#include "nqs/rotations.hpp"
#include "nqs/states.hpp"
#include "nqs/trainer.hpp"

#include <doctest.h>

#include <cmath>

using namespace nqs;

namespace {

std::vector<SampleRecord> fake_records(const std::vector<std::pair<SpinVec, double>>& rows) {
    std::vector<SampleRecord> out;
    for (const auto& [v, phi] : rows) {
        SampleRecord r;
        r.visible = v;
        r.phase = phi;
        out.push_back(r);
    }
    return out;
}

}  // namespace

TEST_CASE("plain averages when all phases vanish") {
    const auto recs = fake_records({{{1, 1}, 0.0}, {{1, -1}, 0.0}, {{-1, -1}, 0.0}});
    SiteProduct constant;  // empty product = 1
    constant.scale = 3.5;
    const EstimateReport rep = reweighted_expectation(recs, constant, 1);
    CHECK(rep.value == doctest::Approx(3.5));
    CHECK(rep.std_error == 0.0);
    CHECK_FALSE(rep.undersampled);

    SiteProduct zz;
    zz.sites = {0, 1};
    const EstimateReport rep2 = reweighted_expectation(recs, zz, 1);
    CHECK(rep2.value == doctest::Approx((1.0 - 1.0 + 1.0) / 3.0));
}

TEST_CASE("sampling error formula on a hand-built stream") {
    // two records: x = {2, 0}, y = {1, 1}
    const auto recs = fake_records({{{1, 1}, 0.0}, {{1, -1}, 0.0}});
    SiteProduct zz;
    zz.sites = {0, 1};
    zz.scale = 2.0;  // O = 2 v1 v2 -> values 2, -2... adjust: use O = 1 + v1 v2 instead
    const EstimateReport rep = reweighted_expectation(recs, zz, 1);
    // x values are (2, -2): mean 0, sd = sqrt( (4 + 4 - 0) / 1 ) = 2 sqrt(2)... n-1 = 1
    // sigma = |sd_x / 1| + |0 * sd_y| = 2.8284..; std_error = sigma / sqrt(2)
    CHECK(rep.value == doctest::Approx(0.0));
    CHECK(rep.std_error == doctest::Approx(2.0 * std::sqrt(2.0) / std::sqrt(2.0)));
}

TEST_CASE("error is scale covariant") {
    ChainRng rng(5, 0);
    std::vector<std::pair<SpinVec, double>> rows;
    for (int i = 0; i < 200; ++i)
        rows.push_back({{static_cast<std::int8_t>(rng.next_spin()),
                         static_cast<std::int8_t>(rng.next_spin())},
                        0.3 * rng.next_double()});
    const auto recs = fake_records(rows);
    SiteProduct a, b;
    a.sites = b.sites = {0, 1};
    b.scale = -7.0;
    const EstimateReport ra = reweighted_expectation(recs, a, 1);
    const EstimateReport rb = reweighted_expectation(recs, b, 1);
    CHECK(rb.value == doctest::Approx(-7.0 * ra.value));
    CHECK(rb.std_error == doctest::Approx(7.0 * ra.std_error));
    CHECK(rb.raw_denominator == ra.raw_denominator);
}

TEST_CASE("merging streams equals combining raw sums") {
    ChainRng rng(6, 0);
    Accumulator left, right, whole;
    SiteProduct zz;
    zz.sites = {0, 1};
    for (int i = 0; i < 500; ++i) {
        const SpinVec v{static_cast<std::int8_t>(rng.next_spin()),
                        static_cast<std::int8_t>(rng.next_spin())};
        const double phi = 2.0 * rng.next_double() - 1.0;
        (i < 200 ? left : right).add(zz(v), phi);
        whole.add(zz(v), phi);
    }
    Accumulator merged = left;
    merged.merge(right);
    // identical up to summation regrouping
    CHECK(merged.num.real() == doctest::Approx(whole.num.real()).epsilon(1e-13));
    CHECK(merged.den.real() == doctest::Approx(whole.den.real()).epsilon(1e-13));
    const EstimateReport a = finalize(merged, 9);
    const EstimateReport b = finalize(whole, 9);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-13));
    CHECK(a.std_error == doctest::Approx(b.std_error).epsilon(1e-13));

    // merging in the same grouping is bit exact
    Accumulator again = left;
    again.merge(right);
    CHECK(again.num == merged.num);
    CHECK(finalize(again, 9).value == a.value);
}

TEST_CASE("quadrature variant never exceeds the absolute-value sum") {
    ChainRng rng(8, 0);
    Accumulator acc;
    for (int i = 0; i < 400; ++i)
        acc.add(rng.next_spin(), 0.8 * rng.next_double());
    EstimateOptions plain, quad;
    quad.quadrature_error = true;
    CHECK(finalize(acc, 1, quad).std_error <= finalize(acc, 1, plain).std_error);
}

TEST_CASE("undersampled flag") {
    // phases spread uniformly on the circle: the phase sum is noise
    ChainRng rng(10, 0);
    Accumulator noisy, clean;
    for (int i = 0; i < 20000; ++i) {
        noisy.add(1.0, 6.283185307179586 * rng.next_double());
        clean.add(1.0, 0.0);
    }
    CHECK(finalize(noisy, 1).undersampled);
    CHECK_FALSE(finalize(clean, 1).undersampled);
}

TEST_CASE("local operator: diagonal, flip ratio, and singular configuration") {
    const NetworkParams p = bell_complex();
    SpinVec v{1, -1};
    CHECK(local_operator(v, PauliString::parse("ZI"), p).real() == doctest::Approx(1.0));
    CHECK(local_operator(v, PauliString::parse("IZ"), p).real() == doctest::Approx(-1.0));

    // sigma_1^x maps to the conjugated coefficient ratio
    const Complex want = std::conj(coefficient(SpinVec{-1, -1}, p)) /
                         std::conj(coefficient(SpinVec{1, -1}, p));
    const Complex got = local_operator(v, PauliString::parse("XI"), p);
    CHECK(std::abs(got - want) < 1e-12);

    // c(+1,+1) = 0 for the Bell state
    CHECK_THROWS_AS(local_operator(SpinVec{1, 1}, PauliString::parse("XI"), p),
                    std::domain_error);
}

TEST_CASE("full enumeration matches an independent brute force (Bell z-basis)") {
    const LayeredNetwork net = promote_to_layered(bell_imaginary());
    SiteProduct zz;
    zz.sites = {0, 1};
    const EnumeratedEstimate e = enumerate_reweighted(net, zz);

    // brute force over the 16 configurations via the joint-phase module
    const auto [re, im] = split_params(bell_imaginary());
    double sx = 0.0, sx2 = 0.0, sy = 0.0, sy2 = 0.0;
    for (std::uint64_t b = 0; b < 16; ++b) {
        const SpinVec v = index_to_spins(b & 3, 2);
        const SpinVec h{static_cast<std::int8_t>((b >> 2) & 1 ? -1 : 1)};
        const SpinVec g{static_cast<std::int8_t>((b >> 3) & 1 ? -1 : 1)};
        const double y = std::cos(joint_phase(v, h, g, im));
        const double x = v[0] * v[1] * y;
        sx += x;
        sx2 += x * x;
        sy += y;
        sy2 += y * y;
    }
    const double mx = sx / 16, my = sy / 16;
    const double sdx = std::sqrt(sx2 / 16 - mx * mx), sdy = std::sqrt(sy2 / 16 - my * my);
    const double sigma = std::abs(sdx / my) + std::abs(mx * sdy / (my * my));

    CHECK(e.value == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(e.mean_den == doctest::Approx(1.0 / 16).epsilon(1e-12));
    CHECK(e.sigma == doctest::Approx(sigma).epsilon(1e-12));
    // frozen oracle value for the explicit-variance curve
    CHECK(e.sigma == doctest::Approx(30.133038346638756).epsilon(1e-12));
}

TEST_CASE("explicit variance vanishes for a real network and constant observable") {
    NetworkParams p = NetworkParams::zeros(2, 1);
    p.weights(0, 0) = 0.4;
    p.weights(1, 0) = -0.2;
    const LayeredNetwork net = promote_to_layered(p);
    SiteProduct constant;
    CHECK(explicit_variance(net, constant) == doctest::Approx(0.0));
}

TEST_CASE("enumeration limit is enforced") {
    const LayeredNetwork net = promote_to_layered(NetworkParams::zeros(14, 14));
    SiteProduct one;
    CHECK_THROWS_AS(enumerate_reweighted(net, one), std::invalid_argument);
}

TEST_CASE("estimator consistency: enumeration equals the local-operator sum") {
    // route equivalence at the Q -> infinity limit for networks <= 14 units
    struct Case {
        NetworkParams params;
        const char* obs;
        const char* basis;
    };
    const std::vector<Case> cases = {
        {bell_imaginary(), "ZZ", "ZZ"},  {bell_imaginary(), "XX", "XX"},
        {bell_complex(), "ZZ", "ZZ"},    {bell_complex(), "XX", "XX"},
        {bell_complex(), "XI", "XZ"},    {ghz(3), "IZZ", "ZZZ"},
        {ghz(3), "XXX", "XXX"},          {ghz(3), "XII", "XZZ"},
    };
    for (const auto& c : cases) {
        const PauliString op = PauliString::parse(c.obs);
        const LayeredNetwork net = attach_rotations(c.params, parse_basis(c.basis));
        const EnumeratedEstimate e = enumerate_reweighted(net, SiteProduct::from_support(op));
        const double want = full_sum_expectation(c.params, op);
        CHECK(e.value == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("local-operator route equals the rotated-network route for x and y strings") {
    // real-parameter state: both routes agree for any string; x strings are
    // also checked on complex analytic states elsewhere
    TrainConfig cfg;
    cfg.n_spins = 3;
    cfg.max_iters = 150;
    const NetworkParams p = train_ground_state(cfg).params;
    for (const char* text : {"XII", "XXI", "YYI", "IYX"}) {
        const PauliString op = PauliString::parse(text);
        const LayeredNetwork net = attach_rotations(p, basis_for(op));
        const EnumeratedEstimate e = enumerate_reweighted(net, SiteProduct::from_support(op));
        CHECK(e.value == doctest::Approx(full_sum_expectation(p, op)).epsilon(1e-10));
    }
}

TEST_CASE("reported error tracks the explicit prediction (Bell x-basis)") {
    const LayeredNetwork net = attach_rotations(bell_imaginary(), parse_basis("XX"));
    const SiteProduct xx = SiteProduct::from_support(PauliString::parse("XX"));
    const EnumeratedEstimate e = enumerate_reweighted(net, xx);
    SamplerConfig cfg;
    cfg.n_samples = 100000;
    cfg.burn_in = 100;
    cfg.seed = 2718;
    const EstimateReport rep = estimate_sampled(net, cfg, {xx}).front();
    const double pred = e.predicted_deviation(double(cfg.n_samples));
    CHECK(rep.std_error > pred / 2.0);
    CHECK(rep.std_error < pred * 2.0);
}

TEST_CASE("reported error halves when the sample count quadruples") {
    TrainConfig tcfg;
    tcfg.n_spins = 3;
    tcfg.max_iters = 150;
    const NetworkParams params = train_ground_state(tcfg).params;
    const LayeredNetwork net = promote_to_layered(params);
    const SiteProduct zz = SiteProduct::from_support(PauliString::parse("ZZI"));
    double err[2];
    for (int k = 0; k < 2; ++k) {
        SamplerConfig cfg;
        cfg.n_samples = k == 0 ? 50000 : 200000;
        cfg.burn_in = 100;
        cfg.seed = 3141;
        err[k] = estimate_sampled(net, cfg, {zz}).front().std_error;
    }
    const double ratio = err[1] / err[0];
    CHECK(ratio > 0.4);
    CHECK(ratio < 0.6);
}

TEST_CASE("sampled estimate converges on the Bell state") {
    const LayeredNetwork net = promote_to_layered(bell_imaginary());
    SamplerConfig cfg;
    cfg.n_samples = 200000;
    cfg.burn_in = 100;
    cfg.seed = 404;
    SiteProduct zz;
    zz.sites = {0, 1};
    const auto reports = estimate_sampled(net, cfg, {zz});
    REQUIRE(reports.size() == 1);
    CHECK(std::abs(reports[0].value - (-1.0)) < 3.0 * reports[0].std_error);
    CHECK_FALSE(reports[0].undersampled);
    CHECK(reports[0].n_samples == cfg.n_samples);
}
