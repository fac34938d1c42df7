#pragma once

#include "dsrclink/types.hpp"

#include <cstdint>
#include <optional>

namespace dsrclink {

/// Impairment set applied between transmitter and receiver, replacing the
/// over-the-air hop. Impairments compose in a fixed, physical order:
/// multipath -> timing -> cfo -> awgn.
struct ChannelConfig {
    /// Complex path gains at sample spacing; first tap is the direct path.
    std::vector<cplx> taps{cplx{1.0, 0.0}};
    /// Carrier frequency offset in cycles per sample.
    double cfo = 0.0;
    /// Carrier phase offset in radians.
    double phase0 = 0.0;
    /// Fractional-sample delay in [0, 1).
    double timing_frac = 0.0;
    /// Receiver sample-clock offset in parts per million, |ppm| <= 1000.
    /// Positive means the receiver clock runs fast: it collects more samples
    /// per symbol, so the resampled stream is longer and each symbol spans
    /// sps*(1 + ppm*1e-6) samples.
    double clock_ppm = 0.0;
    /// Eb/N0 in dB; nullopt disables noise entirely.
    std::optional<double> snr_eb_n0_db = 25.0;
    std::uint64_t seed = 0;

    /// Short-range bench link: direct path only, no offsets, 25 dB Eb/N0.
    /// A modeling stand-in for two radios a couple of feet apart.
    static ChannelConfig lab_preset();

    void validate() const;
};

/// Linear convolution with the complex tap vector (zero history, output
/// length equals input length).
SampleStream apply_multipath(const SampleStream& x, const std::vector<cplx>& taps);

/// Multiplies sample k by the unit rotator at phase 2*pi*cfo*k + phase0.
SampleStream apply_cfo(const SampleStream& x, double cfo, double phase0);

/// Fractional delay plus slow clock skew via piecewise-cubic (Catmull-Rom)
/// interpolation. Output sample k is read at input position
/// k/(1 + clock_ppm*1e-6) - timing_frac, i.e. the stream is delayed by
/// timing_frac samples.
SampleStream apply_timing(const SampleStream& x, double timing_frac, double clock_ppm);

/// Adds circular complex Gaussian noise sized from the measured signal
/// power, Eb/N0, bits per symbol, and samples per symbol. Deterministic
/// given the seed. Throws on all-zero input (SNR undefined).
SampleStream apply_awgn(const SampleStream& x, double eb_n0_db, int bits_per_symbol, int sps,
                        std::uint64_t seed);

/// Full impairment chain in the fixed order. sps is the oversampling of x,
/// needed for the Eb/N0 bookkeeping.
SampleStream run_channel(const SampleStream& x, const ChannelConfig& cfg, int sps);

} // namespace dsrclink
