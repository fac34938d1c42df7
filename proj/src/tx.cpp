#include "dsrclink/tx.hpp"

#include "dsrclink/dsp.hpp"
#include "dsrclink/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dsrclink {

std::array<cplx, 4> default_gray_mapping() {
    const double a = 1.0 / std::sqrt(2.0);
    return {cplx{a, a}, cplx{-a, a}, cplx{a, -a}, cplx{-a, -a}};
}

void TxConfig::validate() const {
    if (sps < 2)
        throw std::invalid_argument("TxConfig.sps: must be >= 2");
    if (!(rolloff > 0.0) || rolloff > 1.0)
        throw std::invalid_argument("TxConfig.rolloff: must be in (0, 1]");
    if (ntaps < 1 || ntaps % 2 == 0)
        throw std::invalid_argument("TxConfig.ntaps: must be odd and positive");
    if (!(amplitude > 0.0))
        throw std::invalid_argument("TxConfig.amplitude: must be positive");

    const double mag0 = std::abs(mapping[0]);
    if (!(mag0 > 0.0))
        throw std::invalid_argument("TxConfig.mapping: points must be nonzero");
    for (int d = 1; d < 4; ++d) {
        if (std::abs(std::abs(mapping[d]) - mag0) > 1e-9 * mag0)
            throw std::invalid_argument("TxConfig.mapping: points must have equal magnitude");
    }
    // 4-fold rotation set: every point must be mapping[0] times j^k, each k once.
    bool used[4] = {false, false, false, false};
    for (int d = 0; d < 4; ++d) {
        const double rel = std::arg(mapping[d] / mapping[0]);
        const double steps = rel / (pi / 2.0);
        const int k = ((static_cast<int>(std::lround(steps)) % 4) + 4) % 4;
        if (std::abs(steps - std::lround(steps)) > 1e-9 || used[k])
            throw std::invalid_argument(
                "TxConfig.mapping: points must be the four 90-degree rotations of one point");
        used[k] = true;
    }
}

ByteSource ByteSource::random_uniform(int lo, int hi, std::uint64_t seed) {
    ByteSource s;
    s.kind = Kind::random_uniform;
    s.lo = lo;
    s.hi = hi;
    s.seed = seed;
    return s;
}

ByteSource ByteSource::vector(ByteStream data) {
    ByteSource s;
    s.kind = Kind::vector;
    s.data = std::move(data);
    return s;
}

ByteStream source_bytes(const ByteSource& src, std::size_t n) {
    ByteStream out;
    out.reserve(n);
    switch (src.kind) {
    case ByteSource::Kind::random_uniform: {
        if (src.lo < 0 || src.lo >= src.hi || src.hi > 256)
            throw std::invalid_argument("ByteSource: random_uniform needs 0 <= lo < hi <= 256");
        Rng rng(src.seed);
        const auto span = static_cast<std::uint32_t>(src.hi - src.lo);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(static_cast<std::uint8_t>(src.lo + rng.uniform_int(span)));
        break;
    }
    case ByteSource::Kind::vector: {
        if (src.data.empty())
            throw std::invalid_argument("ByteSource: vector list must be nonempty");
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(src.data[i % src.data.size()]);
        break;
    }
    }
    return out;
}

DibitStream unpack_dibits(const ByteStream& bytes, UnpackMode mode) {
    DibitStream out;
    switch (mode) {
    case UnpackMode::low2:
        out.reserve(bytes.size());
        for (std::uint8_t b : bytes) {
            if (b >= 4)
                throw std::invalid_argument("unpack_dibits: low2 mode requires bytes < 4, got " +
                                            std::to_string(int(b)));
            out.push_back(b);
        }
        break;
    case UnpackMode::full_byte_msb_first:
        out.reserve(bytes.size() * 4);
        for (std::uint8_t b : bytes)
            for (int shift = 6; shift >= 0; shift -= 2)
                out.push_back(static_cast<std::uint8_t>((b >> shift) & 0x3));
        break;
    case UnpackMode::full_byte_lsb_first:
        out.reserve(bytes.size() * 4);
        for (std::uint8_t b : bytes)
            for (int shift = 0; shift <= 6; shift += 2)
                out.push_back(static_cast<std::uint8_t>((b >> shift) & 0x3));
        break;
    }
    return out;
}

DibitStream diff_encode(const DibitStream& dibits, std::uint8_t initial) {
    DibitStream out;
    out.reserve(dibits.size());
    std::uint8_t prev = static_cast<std::uint8_t>(initial & 0x3);
    for (std::uint8_t d : dibits) {
        prev = static_cast<std::uint8_t>((d + prev) & 0x3);
        out.push_back(prev);
    }
    return out;
}

namespace {

SymbolStream map_points(const DibitStream& dibits, const std::array<cplx, 4>& table,
                        double amplitude) {
    SymbolStream out;
    out.reserve(dibits.size());
    for (std::uint8_t d : dibits)
        out.push_back(table[d & 0x3] * amplitude);
    return out;
}

} // namespace

SymbolStream map_symbols(const DibitStream& dibits, const TxConfig& cfg) {
    return map_points(dibits, cfg.mapping, cfg.amplitude);
}

SampleStream shape_pulses(const SymbolStream& symbols, const TxConfig& cfg) {
    const FirTaps taps = design_rrc(cfg.sps, cfg.rolloff, cfg.ntaps);
    FirFilter filter(taps);
    SampleStream out;
    out.reserve(symbols.size() * static_cast<std::size_t>(cfg.sps));
    for (const cplx& s : symbols) {
        out.push_back(filter.process_one(s));
        for (int k = 1; k < cfg.sps; ++k)
            out.push_back(filter.process_one(cplx{0.0, 0.0}));
    }
    return out;
}

std::array<std::uint8_t, 4> quadrant_premap(const std::array<cplx, 4>& mapping) {
    std::array<std::uint8_t, 4> premap{};
    for (int d = 0; d < 4; ++d) {
        const double rel = std::arg(mapping[d] / mapping[0]);
        const int k = ((static_cast<int>(std::lround(rel / (pi / 2.0))) % 4) + 4) % 4;
        premap[d] = static_cast<std::uint8_t>(k);
    }
    return premap;
}

std::array<cplx, 4> quadrant_table(const std::array<cplx, 4>& mapping) {
    std::array<cplx, 4> table{};
    const cplx j{0.0, 1.0};
    cplx p = mapping[0];
    for (int q = 0; q < 4; ++q) {
        table[q] = p;
        p *= j;
    }
    return table;
}

TxOutput run_tx(const ByteSource& src, const TxConfig& cfg, UnpackMode mode,
                std::size_t n_symbols) {
    cfg.validate();
    const std::size_t n_bytes =
        (mode == UnpackMode::low2) ? n_symbols : (n_symbols + 3) / 4;

    TxOutput out;
    out.dibits = unpack_dibits(source_bytes(src, n_bytes), mode);
    out.dibits.resize(n_symbols);

    if (cfg.differential) {
        const auto premap = quadrant_premap(cfg.mapping);
        DibitStream quads;
        quads.reserve(out.dibits.size());
        for (std::uint8_t d : out.dibits)
            quads.push_back(premap[d]);
        out.symbols = map_points(diff_encode(quads), quadrant_table(cfg.mapping), cfg.amplitude);
    } else {
        out.symbols = map_symbols(out.dibits, cfg);
    }
    out.samples = shape_pulses(out.symbols, cfg);
    return out;
}

} // namespace dsrclink
