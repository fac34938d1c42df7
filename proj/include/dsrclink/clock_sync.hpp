#pragma once

#include "dsrclink/dsp.hpp"
#include "dsrclink/types.hpp"

#include <optional>
#include <vector>

namespace dsrclink {

struct ClockSyncConfig {
    int sps = 4;
    int nfilts = 32;
    double rolloff = 0.35;
    /// The matched-filter prototype spans this many symbols at nfilts-fold
    /// oversampling: ntaps = span*sps*nfilts + 1.
    int proto_symbol_span = 11;
    double loop_bw = two_pi / 100.0;
    double damping = 1.0;
    /// Rate estimate stays within sps*(1 +/- max_rate_dev).
    double max_rate_dev = 0.01;
    /// Loss-of-lock: trailing mean of e^2 over lock_window symbols must
    /// fall below lock_threshold. The detector carries a pattern-noise
    /// floor (about 0.05 on random QPSK, up to ~0.11 on short periodic
    /// patterns), so the default sits above that; a diverged loop clips
    /// its error at +/-1 and lands near 1.0.
    double lock_threshold = 0.2;
    int lock_window = 500;
};

/// Polyphase matched-filter symbol synchronizer. Per output symbol it picks
/// the sub-filter nearest the current fractional position, computes the
/// matched output y and the derivative-filter output dy, forms the timing
/// error e = re(y)re(dy) + im(y)im(dy), and runs a second-order loop:
/// rate += beta*e, position += rate + alpha*e. One symbol is emitted per
/// `rate` consumed samples on average.
class ClockSync {
  public:
    explicit ClockSync(ClockSyncConfig cfg);

    /// Consumes the whole stream (one shot) and emits symbol-rate samples.
    SymbolStream process(const SampleStream& x);

    double rate() const { return rate_; }
    /// Current fractional bank position in [0, nfilts).
    double filt_index() const { return filt_index_; }
    /// Circular mean of the bank position over the trailing fraction of the
    /// run; the instantaneous position jitters by a few banks.
    double mean_filt_index(double tail_frac = 0.25) const;
    bool locked() const { return locked_; }
    /// Symbol index at which the error variance first dropped below the
    /// lock threshold, if it ever did.
    std::optional<std::size_t> first_lock_index() const { return first_lock_index_; }

    const std::vector<double>& rate_history() const { return rate_history_; }
    const std::vector<double>& error_history() const { return error_history_; }
    const std::vector<double>& filt_index_history() const { return filt_index_history_; }
    const PolyphaseBank& bank() const { return bank_; }

  private:
    ClockSyncConfig cfg_;
    PolyphaseBank bank_; // matched banks scaled to unit sample-rate energy
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double position_ = 0.0; // input-sample position of the current symbol tap
    double rate_ = 0.0;     // samples-per-symbol estimate
    double filt_index_ = 0.0;
    bool locked_ = false;
    std::optional<std::size_t> first_lock_index_;
    std::vector<double> rate_history_;
    std::vector<double> error_history_;
    std::vector<double> filt_index_history_;
};

/// Critically-damped (by default) second-order loop gain mapping from a
/// single normalized bandwidth. Returns {alpha, beta}.
std::pair<double, double> loop_gains(double loop_bw, double damping = 1.0);

} // namespace dsrclink
