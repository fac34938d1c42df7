#include "dsrclink/channel.hpp"

#include "dsrclink/dsp.hpp"
#include "dsrclink/random.hpp"

#include <cmath>
#include <stdexcept>

namespace dsrclink {

ChannelConfig ChannelConfig::lab_preset() {
    ChannelConfig cfg;
    cfg.taps = {cplx{1.0, 0.0}};
    cfg.cfo = 0.0;
    cfg.phase0 = 0.0;
    cfg.timing_frac = 0.0;
    cfg.clock_ppm = 0.0;
    cfg.snr_eb_n0_db = 25.0;
    return cfg;
}

void ChannelConfig::validate() const {
    if (taps.empty())
        throw std::invalid_argument("ChannelConfig.taps: must be nonempty");
    bool any_nonzero = false;
    for (const cplx& t : taps)
        any_nonzero = any_nonzero || std::abs(t) > 0.0;
    if (!any_nonzero)
        throw std::invalid_argument("ChannelConfig.taps: at least one tap must be nonzero");
    if (std::abs(clock_ppm) > 1000.0)
        throw std::invalid_argument("ChannelConfig.clock_ppm: |ppm| must be <= 1000");
    if (timing_frac < 0.0 || timing_frac >= 1.0)
        throw std::invalid_argument("ChannelConfig.timing_frac: must be in [0, 1)");
}

SampleStream apply_multipath(const SampleStream& x, const std::vector<cplx>& taps) {
    FirFilter filter{std::vector<cplx>(taps)};
    return filter.process(x);
}

SampleStream apply_cfo(const SampleStream& x, double cfo, double phase0) {
    auto [end_phase, rot] = nco_advance(phase0, two_pi * cfo, x.size());
    (void)end_phase;
    SampleStream out;
    out.reserve(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        out.push_back(x[k] * rot[k]);
    return out;
}

namespace {

cplx sample_at(const SampleStream& x, long i) {
    if (i < 0 || i >= static_cast<long>(x.size()))
        return cplx{0.0, 0.0};
    return x[static_cast<std::size_t>(i)];
}

// Catmull-Rom interpolation at integer base i, fraction f in [0,1).
cplx cubic_interp(const SampleStream& x, long i, double f) {
    const cplx p0 = sample_at(x, i - 1);
    const cplx p1 = sample_at(x, i);
    const cplx p2 = sample_at(x, i + 1);
    const cplx p3 = sample_at(x, i + 2);
    const double f2 = f * f;
    const double f3 = f2 * f;
    const double w0 = 0.5 * (-f3 + 2.0 * f2 - f);
    const double w1 = 0.5 * (3.0 * f3 - 5.0 * f2 + 2.0);
    const double w2 = 0.5 * (-3.0 * f3 + 4.0 * f2 + f);
    const double w3 = 0.5 * (f3 - f2);
    return w0 * p0 + w1 * p1 + w2 * p2 + w3 * p3;
}

} // namespace

SampleStream apply_timing(const SampleStream& x, double timing_frac, double clock_ppm) {
    if (std::abs(clock_ppm) > 1000.0)
        throw std::invalid_argument("apply_timing: |clock_ppm| must be <= 1000");
    if (timing_frac == 0.0 && clock_ppm == 0.0)
        return x;
    if (x.empty())
        return {};

    const double step = 1.0 / (1.0 + clock_ppm * 1e-6);
    const double last = static_cast<double>(x.size() - 1);
    SampleStream out;
    out.reserve(static_cast<std::size_t>(static_cast<double>(x.size()) / step) + 2);
    for (std::size_t k = 0;; ++k) {
        const double pos = step * static_cast<double>(k) - timing_frac;
        if (pos > last)
            break;
        const double base = std::floor(pos);
        out.push_back(cubic_interp(x, static_cast<long>(base), pos - base));
    }
    return out;
}

SampleStream apply_awgn(const SampleStream& x, double eb_n0_db, int bits_per_symbol, int sps,
                        std::uint64_t seed) {
    if (bits_per_symbol < 1 || sps < 1)
        throw std::invalid_argument("apply_awgn: bits_per_symbol and sps must be >= 1");
    double power = 0.0;
    for (const cplx& s : x)
        power += std::norm(s);
    if (!(power > 0.0))
        throw std::invalid_argument("apply_awgn: input has zero power, SNR undefined");
    power /= static_cast<double>(x.size());

    const double es = power * sps;
    const double eb = es / bits_per_symbol;
    const double n0 = eb / std::pow(10.0, eb_n0_db / 10.0);
    const double sigma = std::sqrt(n0 / 2.0); // per real component

    Rng rng(seed);
    SampleStream out;
    out.reserve(x.size());
    for (const cplx& s : x) {
        const double nr = sigma * rng.gaussian();
        const double ni = sigma * rng.gaussian();
        out.push_back(s + cplx{nr, ni});
    }
    return out;
}

SampleStream run_channel(const SampleStream& x, const ChannelConfig& cfg, int sps) {
    cfg.validate();
    SampleStream y = apply_multipath(x, cfg.taps);
    y = apply_timing(y, cfg.timing_frac, cfg.clock_ppm);
    y = apply_cfo(y, cfg.cfo, cfg.phase0);
    if (cfg.snr_eb_n0_db)
        y = apply_awgn(y, *cfg.snr_eb_n0_db, 2, sps, cfg.seed);
    return y;
}

} // namespace dsrclink
