#include "dsrclink/costas.hpp"

#include "dsrclink/clock_sync.hpp" // loop_gains

#include <algorithm>
#include <cmath>

namespace dsrclink {

CostasLoop::CostasLoop(CostasConfig cfg) : cfg_(cfg) {
    std::tie(alpha_, beta_) = loop_gains(cfg_.loop_bw, cfg_.damping);
    err_window_.assign(static_cast<std::size_t>(cfg_.lock_window), 1.0);
    err_sum_ = static_cast<double>(cfg_.lock_window);
}

double CostasLoop::phase_error(cplx v) {
    const double sr = v.real() >= 0.0 ? 1.0 : -1.0;
    const double si = v.imag() >= 0.0 ? 1.0 : -1.0;
    return sr * v.imag() - si * v.real();
}

cplx CostasLoop::process_one(cplx z) {
    const cplx rot(std::cos(-phase_), std::sin(-phase_));
    const cplx v = z * rot;

    const double e = std::clamp(phase_error(v), -1.0, 1.0);
    freq_ += beta_ * e;
    freq_ = std::clamp(freq_, -cfg_.freq_limit, cfg_.freq_limit);
    phase_ = wrap_phase(phase_ + alpha_ * e + freq_);

    freq_history_.push_back(freq_);
    error_history_.push_back(e);
    err_sum_ -= err_window_[err_pos_];
    err_window_[err_pos_] = e * e;
    err_sum_ += e * e;
    err_pos_ = (err_pos_ + 1) % err_window_.size();
    ++count_;
    if (count_ >= err_window_.size())
        locked_ = (err_sum_ / static_cast<double>(err_window_.size())) < cfg_.lock_threshold;

    return v;
}

SymbolStream CostasLoop::process(const SymbolStream& z) {
    SymbolStream out;
    out.reserve(z.size());
    for (const cplx& s : z)
        out.push_back(process_one(s));
    return out;
}

} // namespace dsrclink
