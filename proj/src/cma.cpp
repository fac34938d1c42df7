#include "dsrclink/cma.hpp"

#include <cmath>
#include <stdexcept>

namespace dsrclink {

CmaEqualizer::CmaEqualizer(CmaConfig cfg) : cfg_(cfg) {
    if (cfg_.length < 1)
        throw std::invalid_argument("CmaEqualizer: length must be >= 1");
    if (!(cfg_.step_mu > 0.0))
        throw std::invalid_argument("CmaEqualizer: step_mu must be positive");
    if (!(cfg_.modulus_r > 0.0))
        throw std::invalid_argument("CmaEqualizer: modulus_r must be positive");
    weights_.assign(static_cast<std::size_t>(cfg_.length), cplx{0.0, 0.0});
    window_.assign(static_cast<std::size_t>(cfg_.length), cplx{0.0, 0.0});
    reset_weights();
}

void CmaEqualizer::reset_weights() {
    std::fill(weights_.begin(), weights_.end(), cplx{0.0, 0.0});
    weights_[static_cast<std::size_t>(cfg_.length / 2)] = cplx{1.0, 0.0};
}

double CmaEqualizer::weight_energy() const {
    double e = 0.0;
    for (const cplx& w : weights_)
        e += std::norm(w);
    return e;
}

cplx CmaEqualizer::process_one(cplx x, bool adapt) {
    window_[pos_] = x;

    cplx z{0.0, 0.0};
    std::size_t idx = pos_;
    for (const cplx& w : weights_) {
        z += w * window_[idx];
        idx = (idx == 0) ? window_.size() - 1 : idx - 1;
    }

    const double modulus_err = std::norm(z) - cfg_.modulus_r;
    dispersion_ += 0.02 * (modulus_err * modulus_err - dispersion_);

    if (adapt && (cfg_.adapt_gate <= 0.0 || dispersion_ > cfg_.adapt_gate)) {
        const cplx err = z * modulus_err;
        idx = pos_;
        for (cplx& w : weights_) {
            w -= cfg_.step_mu * err * std::conj(window_[idx]);
            idx = (idx == 0) ? window_.size() - 1 : idx - 1;
        }
        const double energy = weight_energy();
        if (energy < cfg_.energy_min || energy > cfg_.energy_max) {
            reset_weights();
            ++resets_;
        }
    }

    pos_ = (pos_ + 1) % window_.size();
    return z;
}

SymbolStream CmaEqualizer::process(const SymbolStream& y) {
    SymbolStream out;
    out.reserve(y.size());
    for (const cplx& s : y)
        out.push_back(process_one(s));
    return out;
}

} // namespace dsrclink
