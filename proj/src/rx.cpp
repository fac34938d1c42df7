#include "dsrclink/rx.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dsrclink {

DibitStream decide(const SymbolStream& v, const std::array<cplx, 4>& mapping) {
    DibitStream out;
    out.reserve(v.size());
    for (const cplx& s : v) {
        int best = 0;
        double best_d2 = std::norm(s - mapping[0]);
        for (int d = 1; d < 4; ++d) {
            const double d2 = std::norm(s - mapping[static_cast<std::size_t>(d)]);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = d;
            }
        }
        out.push_back(static_cast<std::uint8_t>(best));
    }
    return out;
}

DibitStream diff_decode(const DibitStream& dibits, std::uint8_t initial) {
    DibitStream out;
    out.reserve(dibits.size());
    std::uint8_t prev = static_cast<std::uint8_t>(initial & 0x3);
    for (std::uint8_t d : dibits) {
        out.push_back(static_cast<std::uint8_t>((d - prev) & 0x3));
        prev = static_cast<std::uint8_t>(d & 0x3);
    }
    return out;
}

ByteStream pack_bytes(const DibitStream& dibits, UnpackMode mode) {
    ByteStream out;
    switch (mode) {
    case UnpackMode::low2:
        out.assign(dibits.begin(), dibits.end());
        break;
    case UnpackMode::full_byte_msb_first:
        out.reserve(dibits.size() / 4);
        for (std::size_t i = 0; i + 3 < dibits.size(); i += 4)
            out.push_back(static_cast<std::uint8_t>(
                (dibits[i] << 6) | (dibits[i + 1] << 4) | (dibits[i + 2] << 2) | dibits[i + 3]));
        break;
    case UnpackMode::full_byte_lsb_first:
        out.reserve(dibits.size() / 4);
        for (std::size_t i = 0; i + 3 < dibits.size(); i += 4)
            out.push_back(static_cast<std::uint8_t>(
                dibits[i] | (dibits[i + 1] << 2) | (dibits[i + 2] << 4) | (dibits[i + 3] << 6)));
        break;
    }
    return out;
}

void RxConfig::validate() const {
    if (sps < 2)
        throw std::invalid_argument("RxConfig.sps: must be >= 2");
    if (nfilts < 1)
        throw std::invalid_argument("RxConfig.nfilts: must be >= 1");
    if (!(clock_bw > 0.0) || !(costas_bw > 0.0))
        throw std::invalid_argument("RxConfig.loop_bw: bandwidths must be positive");
    if (cma.length < 1)
        throw std::invalid_argument("RxConfig.cma.length: must be >= 1");
}

ClockSyncConfig RxConfig::clock_sync_config() const {
    ClockSyncConfig c;
    c.sps = sps;
    c.nfilts = nfilts;
    c.rolloff = rolloff;
    c.proto_symbol_span = proto_symbol_span;
    c.loop_bw = clock_bw;
    c.max_rate_dev = max_rate_dev;
    c.lock_threshold = clock_lock_threshold;
    c.lock_window = lock_window;
    return c;
}

CostasConfig RxConfig::costas_config() const {
    CostasConfig c;
    c.loop_bw = costas_bw;
    c.lock_threshold = costas_lock_threshold;
    c.lock_window = lock_window;
    return c;
}

namespace {

double tail_mean(const std::vector<double>& v, double frac = 0.25) {
    if (v.empty())
        return 0.0;
    const std::size_t start = v.size() - std::max<std::size_t>(
        1, static_cast<std::size_t>(static_cast<double>(v.size()) * frac));
    return std::accumulate(v.begin() + static_cast<long>(start), v.end(), 0.0) /
           static_cast<double>(v.size() - start);
}

} // namespace

RxResult run_rx(const SampleStream& x, const RxConfig& cfg) {
    cfg.validate();

    ClockSync clock(cfg.clock_sync_config());
    SymbolStream timed = clock.process(x);

    int cma_resets = 0;
    SymbolStream equalized;
    if (cfg.cma.enabled) {
        // Bring-up order: the equalizer starts adapting once the timing
        // loop reports lock, so it never trains on the acquisition sweep.
        const std::size_t adapt_from =
            clock.first_lock_index().value_or(timed.size());
        CmaEqualizer cma(cfg.cma);
        equalized.reserve(timed.size());
        for (std::size_t i = 0; i < timed.size(); ++i)
            equalized.push_back(cma.process_one(timed[i], i >= adapt_from));
        cma_resets = cma.resets();
    } else {
        equalized = std::move(timed);
    }

    CostasLoop costas(cfg.costas_config());
    SymbolStream corrected = costas.process(equalized);

    RxResult res;
    if (cfg.differential) {
        // Decisions land on the quadrant-ordered table; the first difference
        // of quadrant indices cancels any constant lock rotation, then the
        // premap inverse restores the Gray dibit labels.
        const auto premap = quadrant_premap(cfg.mapping);
        std::array<std::uint8_t, 4> inv{};
        for (int d = 0; d < 4; ++d)
            inv[premap[static_cast<std::size_t>(d)]] = static_cast<std::uint8_t>(d);

        const DibitStream quads = decide(corrected, quadrant_table(cfg.mapping));
        const DibitStream diffs = diff_decode(quads);
        res.dibits.reserve(diffs.size());
        for (std::uint8_t q : diffs)
            res.dibits.push_back(inv[q]);
    } else {
        res.dibits = decide(corrected, cfg.mapping);
    }

    res.bytes = pack_bytes(res.dibits, cfg.pack_mode);
    res.clock_locked = clock.locked();
    res.costas_locked = costas.locked();
    res.cma_resets = cma_resets;
    res.clock_rate = tail_mean(clock.rate_history());
    res.costas_freq = tail_mean(costas.freq_history());
    res.rate_history = clock.rate_history();
    res.clock_error_history = clock.error_history();
    res.costas_freq_history = costas.freq_history();
    res.symbols = std::move(corrected);
    return res;
}

} // namespace dsrclink
