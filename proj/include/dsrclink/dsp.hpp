#pragma once

#include "dsrclink/types.hpp"

#include <cstddef>
#include <utility>

namespace dsrclink {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// Wraps an angle into [-pi, pi).
double wrap_phase(double phase);

/// Designs unit-energy root-raised-cosine taps (sum of squares == 1).
///
/// ntaps must be odd so a center tap exists; the removable singularities of
/// the closed form (t = 0 and t = +/- 1/(4*rolloff) symbol periods) are
/// evaluated by their analytic limits. Throws std::invalid_argument for
/// sps < 2, rolloff outside (0, 1], or even/non-positive ntaps.
FirTaps design_rrc(int sps, double rolloff, int ntaps);

/// Streaming FIR: linear convolution with zero-initialized history, so the
/// output length equals the input length. The output is delayed by the
/// group delay (ntaps-1)/2; alignment is resolved downstream where it is
/// measured anyway.
class FirFilter {
  public:
    explicit FirFilter(std::vector<cplx> taps);
    explicit FirFilter(const FirTaps& taps);

    cplx process_one(cplx x);
    SampleStream process(const SampleStream& input);
    void reset();

    const std::vector<cplx>& taps() const { return taps_; }

  private:
    std::vector<cplx> taps_;
    std::vector<cplx> history_; // ring buffer, newest at pos_
    std::size_t pos_ = 0;
};

/// One-shot convenience wrapper around FirFilter.
SampleStream fir_filter(const FirTaps& taps, const SampleStream& input);

/// Splits a prototype filter into nfilts stride-decimated sub-filters.
/// The prototype is expected to be designed at nfilts-fold oversampling
/// relative to the rate the bank will run at (caller responsibility).
/// Derivative banks come from the central difference of the prototype.
PolyphaseBank polyphase_decompose(const FirTaps& prototype, int nfilts);

/// Advances a numerically controlled oscillator by n steps. The k-th
/// rotator is exp(j*(phase + k*freq)); the returned phase is
/// phase + n*freq wrapped into [-pi, pi).
std::pair<double, SampleStream> nco_advance(double phase, double freq, std::size_t n);

/// In-place radix-2 decimation-in-time FFT. Size must be a power of two.
void fft_radix2(std::vector<cplx>& buf);

} // namespace dsrclink
