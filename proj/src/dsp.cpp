#include "dsrclink/dsp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dsrclink {

double wrap_phase(double phase) {
    double p = std::fmod(phase + pi, two_pi);
    if (p < 0.0)
        p += two_pi;
    return p - pi;
}

FirTaps design_rrc(int sps, double rolloff, int ntaps) {
    if (sps < 2)
        throw std::invalid_argument("design_rrc: sps must be >= 2, got " + std::to_string(sps));
    if (!(rolloff > 0.0) || rolloff > 1.0)
        throw std::invalid_argument("design_rrc: rolloff must be in (0, 1]");
    if (ntaps < 1 || ntaps % 2 == 0)
        throw std::invalid_argument("design_rrc: ntaps must be odd and positive, got " +
                                    std::to_string(ntaps));

    const int half = (ntaps - 1) / 2;
    std::vector<double> taps(static_cast<std::size_t>(ntaps), 0.0);

    // Compute one side and mirror it so even symmetry is exact.
    for (int n = 0; n <= half; ++n) {
        const double t = static_cast<double>(n) / sps; // symbol periods
        const double four_bt = 4.0 * rolloff * t;
        double h;
        if (n == 0) {
            h = 1.0 - rolloff + 4.0 * rolloff / pi;
        } else if (std::abs(1.0 - four_bt * four_bt) < 1e-12) {
            // t == 1/(4*rolloff)
            const double a = pi / (4.0 * rolloff);
            h = (rolloff / std::sqrt(2.0)) *
                ((1.0 + 2.0 / pi) * std::sin(a) + (1.0 - 2.0 / pi) * std::cos(a));
        } else {
            h = (std::sin(pi * t * (1.0 - rolloff)) +
                 four_bt * std::cos(pi * t * (1.0 + rolloff))) /
                (pi * t * (1.0 - four_bt * four_bt));
        }
        taps[static_cast<std::size_t>(half + n)] = h;
        taps[static_cast<std::size_t>(half - n)] = h;
    }

    double energy = 0.0;
    for (double h : taps)
        energy += h * h;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& h : taps)
        h *= scale;

    return FirTaps{std::move(taps), sps};
}

FirFilter::FirFilter(std::vector<cplx> taps) : taps_(std::move(taps)) {
    if (taps_.empty())
        throw std::invalid_argument("FirFilter: taps must be nonempty");
    history_.assign(taps_.size(), cplx{0.0, 0.0});
}

FirFilter::FirFilter(const FirTaps& taps)
    : FirFilter(std::vector<cplx>(taps.coefficients.begin(), taps.coefficients.end())) {}

cplx FirFilter::process_one(cplx x) {
    history_[pos_] = x;
    cplx acc{0.0, 0.0};
    std::size_t idx = pos_;
    for (const cplx& h : taps_) {
        acc += h * history_[idx];
        idx = (idx == 0) ? history_.size() - 1 : idx - 1;
    }
    pos_ = (pos_ + 1) % history_.size();
    return acc;
}

SampleStream FirFilter::process(const SampleStream& input) {
    SampleStream out;
    out.reserve(input.size());
    for (cplx x : input)
        out.push_back(process_one(x));
    return out;
}

void FirFilter::reset() {
    std::fill(history_.begin(), history_.end(), cplx{0.0, 0.0});
    pos_ = 0;
}

SampleStream fir_filter(const FirTaps& taps, const SampleStream& input) {
    FirFilter f(taps);
    return f.process(input);
}

PolyphaseBank polyphase_decompose(const FirTaps& prototype, int nfilts) {
    if (nfilts < 1)
        throw std::invalid_argument("polyphase_decompose: nfilts must be >= 1");
    const auto& proto = prototype.coefficients;
    if (proto.empty())
        throw std::invalid_argument("polyphase_decompose: empty prototype");

    const std::size_t n = proto.size();
    const std::size_t bank_len = (n + static_cast<std::size_t>(nfilts) - 1) / nfilts;

    // Central difference of the prototype, one-sided at the edges.
    std::vector<double> diff(n, 0.0);
    if (n > 1) {
        diff[0] = proto[1] - proto[0];
        diff[n - 1] = proto[n - 1] - proto[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            diff[i] = 0.5 * (proto[i + 1] - proto[i - 1]);
    }

    PolyphaseBank bank;
    bank.nfilts = nfilts;
    bank.banks.assign(static_cast<std::size_t>(nfilts), std::vector<double>(bank_len, 0.0));
    bank.derivative_banks = bank.banks;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t b = i % nfilts;
        const std::size_t m = i / nfilts;
        bank.banks[b][m] = proto[i];
        bank.derivative_banks[b][m] = diff[i];
    }
    return bank;
}

std::pair<double, SampleStream> nco_advance(double phase, double freq, std::size_t n) {
    SampleStream rot;
    rot.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double p = phase + freq * static_cast<double>(k);
        rot.emplace_back(std::cos(p), std::sin(p));
    }
    return {wrap_phase(phase + freq * static_cast<double>(n)), std::move(rot)};
}

void fft_radix2(std::vector<cplx>& buf) {
    const std::size_t n = buf.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_radix2: size must be a power of two");

    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(buf[i], buf[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -two_pi / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = buf[i + k];
                const cplx v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

} // namespace dsrclink
