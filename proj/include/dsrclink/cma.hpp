#pragma once

#include "dsrclink/types.hpp"

#include <vector>

namespace dsrclink {

struct CmaConfig {
    bool enabled = true;
    int length = 11;        // equalizer span in symbols
    double step_mu = 1e-3;
    double modulus_r = 1.0; // target squared magnitude
    // Divergence guard: weight energy must stay inside this band, otherwise
    // the state resets to a center spike and the reset is counted.
    double energy_min = 0.01;
    double energy_max = 100.0;
    // Adaptation gate: weights update only while the smoothed dispersion
    // mean((|z|^2-R)^2) exceeds this. Short periodic symbol patterns leave
    // the constant-modulus cost with spurious flat minima that an
    // always-on update slowly drifts into; a clean signal freezes the
    // equalizer instead. 0 disables the gate.
    double adapt_gate = 0.02;
};

/// Constant modulus algorithm blind equalizer at one sample per symbol.
/// Per symbol: z = weights . window, e = z*(|z|^2 - R),
/// weights -= step_mu * e * conj(window).
class CmaEqualizer {
  public:
    explicit CmaEqualizer(CmaConfig cfg);

    /// Filters one symbol; updates the weights only when `adapt` is set and
    /// the dispersion gate is open.
    cplx process_one(cplx x, bool adapt = true);
    SymbolStream process(const SymbolStream& y);

    int resets() const { return resets_; }
    const std::vector<cplx>& weights() const { return weights_; }
    double weight_energy() const;
    double dispersion() const { return dispersion_; }

  private:
    void reset_weights();

    CmaConfig cfg_;
    std::vector<cplx> weights_;
    std::vector<cplx> window_; // ring buffer, newest at pos_
    std::size_t pos_ = 0;
    int resets_ = 0;
    double dispersion_ = 0.0; // smoothed (|z|^2-R)^2
};

} // namespace dsrclink
