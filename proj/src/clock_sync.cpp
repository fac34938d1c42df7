#include "dsrclink/clock_sync.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsrclink {

std::pair<double, double> loop_gains(double loop_bw, double damping) {
    if (!(loop_bw > 0.0))
        throw std::invalid_argument("loop_gains: loop_bw must be positive");
    const double denom = 1.0 + 2.0 * damping * loop_bw + loop_bw * loop_bw;
    return {4.0 * damping * loop_bw / denom, 4.0 * loop_bw * loop_bw / denom};
}

ClockSync::ClockSync(ClockSyncConfig cfg) : cfg_(cfg) {
    if (cfg_.nfilts < 1)
        throw std::invalid_argument("ClockSync: nfilts must be >= 1");
    if (cfg_.sps < 2)
        throw std::invalid_argument("ClockSync: sps must be >= 2");

    const int proto_ntaps = cfg_.proto_symbol_span * cfg_.sps * cfg_.nfilts + 1;
    const FirTaps proto = design_rrc(cfg_.sps * cfg_.nfilts, cfg_.rolloff, proto_ntaps);
    bank_ = polyphase_decompose(proto, cfg_.nfilts);

    // Each bank approximates the unit-energy sample-rate matched filter at
    // one sub-sample offset; the prototype spread its unit energy over
    // nfilts banks, so scale by sqrt(nfilts). The derivative banks get an
    // extra nfilts so dy is per input sample rather than per prototype tap.
    const double g = std::sqrt(static_cast<double>(cfg_.nfilts));
    for (auto& b : bank_.banks)
        for (double& t : b)
            t *= g;
    for (auto& b : bank_.derivative_banks)
        for (double& t : b)
            t *= g * cfg_.nfilts;

    // The loop state advances in input samples but the gains follow the
    // usual polyphase-sync convention of acting on the bank index, so they
    // scale by 1/nfilts here. This keeps the per-symbol correction small
    // enough that detector pattern noise does not rectify into a bank bias.
    std::tie(alpha_, beta_) = loop_gains(cfg_.loop_bw, cfg_.damping);
    alpha_ /= cfg_.nfilts;
    beta_ /= cfg_.nfilts;
    rate_ = static_cast<double>(cfg_.sps);
    position_ = 0.0;
}

double ClockSync::mean_filt_index(double tail_frac) const {
    if (filt_index_history_.empty())
        return filt_index_;
    const std::size_t start =
        filt_index_history_.size() -
        std::max<std::size_t>(1, static_cast<std::size_t>(filt_index_history_.size() * tail_frac));
    // Circular mean: average unit vectors at angle 2*pi*index/nfilts.
    double cs = 0.0, sn = 0.0;
    for (std::size_t i = start; i < filt_index_history_.size(); ++i) {
        const double a = two_pi * filt_index_history_[i] / cfg_.nfilts;
        cs += std::cos(a);
        sn += std::sin(a);
    }
    double idx = std::atan2(sn, cs) / two_pi * cfg_.nfilts;
    if (idx < 0.0)
        idx += cfg_.nfilts;
    return idx;
}

SymbolStream ClockSync::process(const SampleStream& x) {
    const long n = static_cast<long>(x.size());
    const std::size_t bank_len = bank_.banks.empty() ? 0 : bank_.banks[0].size();
    const double rate_min = cfg_.sps * (1.0 - cfg_.max_rate_dev);
    const double rate_max = cfg_.sps * (1.0 + cfg_.max_rate_dev);

    // Coarse alignment: pick the integer sample offset with the most
    // matched-filter energy. A start half a symbol off the peak would sit
    // on the unstable equilibrium of the timing detector, which a short
    // energy probe avoids for any channel delay.
    if (position_ == 0.0 && rate_history_.empty()) {
        const long probe_symbols = 128;
        const long probe_start = static_cast<long>(bank_len);
        if (n > probe_start + (probe_symbols + 1) * cfg_.sps) {
            const auto& taps = bank_.banks[0];
            int best_offset = 0;
            double best_energy = -1.0;
            for (int o = 0; o < cfg_.sps; ++o) {
                double energy = 0.0;
                for (long k = 0; k < probe_symbols; ++k) {
                    const long i = probe_start + o + k * cfg_.sps;
                    cplx y{0.0, 0.0};
                    for (std::size_t m = 0; m < bank_len; ++m)
                        y += taps[m] * x[static_cast<std::size_t>(i - static_cast<long>(m))];
                    energy += std::norm(y);
                }
                if (energy > best_energy) {
                    best_energy = energy;
                    best_offset = o;
                }
            }
            position_ = static_cast<double>(probe_start + best_offset);
        }
    }

    SymbolStream out;
    out.reserve(static_cast<std::size_t>(n / cfg_.sps) + 1);

    std::vector<double> err_window(static_cast<std::size_t>(cfg_.lock_window), 1.0);
    double err_sum = static_cast<double>(cfg_.lock_window);
    std::size_t err_pos = 0;
    std::size_t emitted = 0;

    while (true) {
        long i = static_cast<long>(std::floor(position_));
        double mu = position_ - static_cast<double>(i);
        int b = static_cast<int>(std::lround(mu * cfg_.nfilts));
        if (b >= cfg_.nfilts) {
            b -= cfg_.nfilts;
            i += 1;
        }
        if (i >= n)
            break;

        cplx y{0.0, 0.0};
        cplx dy{0.0, 0.0};
        const auto& taps = bank_.banks[static_cast<std::size_t>(b)];
        const auto& dtaps = bank_.derivative_banks[static_cast<std::size_t>(b)];
        for (std::size_t m = 0; m < bank_len; ++m) {
            const long idx = i - static_cast<long>(m);
            if (idx < 0)
                break;
            const cplx& s = x[static_cast<std::size_t>(idx)];
            y += taps[m] * s;
            dy += dtaps[m] * s;
        }

        double e = y.real() * dy.real() + y.imag() * dy.imag();
        e = std::clamp(e, -1.0, 1.0);

        rate_ += beta_ * e;
        rate_ = std::clamp(rate_, rate_min, rate_max);
        position_ += rate_ + alpha_ * e;

        filt_index_ = mu * cfg_.nfilts;
        out.push_back(y);
        rate_history_.push_back(rate_);
        error_history_.push_back(e);
        filt_index_history_.push_back(filt_index_);

        err_sum -= err_window[err_pos];
        err_window[err_pos] = e * e;
        err_sum += e * e;
        err_pos = (err_pos + 1) % err_window.size();
        ++emitted;
        if (emitted >= err_window.size()) {
            locked_ = (err_sum / static_cast<double>(err_window.size())) < cfg_.lock_threshold;
            if (locked_ && !first_lock_index_)
                first_lock_index_ = emitted - 1;
        }
    }
    return out;
}

} // namespace dsrclink
