#pragma once

#include "dsrclink/dsp.hpp"
#include "dsrclink/types.hpp"

#include <vector>

namespace dsrclink {

struct CostasConfig {
    double loop_bw = two_pi / 100.0;
    double damping = 1.0;
    /// Capture range: |freq| stays within this bound (radians/symbol).
    /// Kept well below pi/8, the first false-lock spin frequency of the
    /// hard-decision detector, while covering any plausible residual CFO.
    double freq_limit = 0.2;
    double lock_threshold = 0.2;
    int lock_window = 500;
};

/// Fourth-order Costas carrier-phase tracker for QPSK. Per symbol:
/// v = z*exp(-j*phase), e = sign(re v)*im v - sign(im v)*re v,
/// freq += beta*e, phase += alpha*e + freq (wrapped). The error detector
/// is zero at all four 90-degree rotations of the constellation, which is
/// why a blind QPSK link needs differential coding on top.
class CostasLoop {
  public:
    explicit CostasLoop(CostasConfig cfg);

    cplx process_one(cplx z);
    SymbolStream process(const SymbolStream& z);

    double phase() const { return phase_; }
    double freq() const { return freq_; }
    bool locked() const { return locked_; }

    const std::vector<double>& freq_history() const { return freq_history_; }
    const std::vector<double>& error_history() const { return error_history_; }

    /// The 4th-order phase detector on one already-derotated sample.
    static double phase_error(cplx v);

  private:
    CostasConfig cfg_;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double phase_ = 0.0;
    double freq_ = 0.0;
    bool locked_ = false;
    std::vector<double> err_window_;
    double err_sum_ = 0.0;
    std::size_t err_pos_ = 0;
    std::size_t count_ = 0;
    std::vector<double> freq_history_;
    std::vector<double> error_history_;
};

} // namespace dsrclink
