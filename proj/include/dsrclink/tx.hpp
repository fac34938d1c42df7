#pragma once

#include "dsrclink/types.hpp"

#include <array>
#include <cstdint>

namespace dsrclink {

/// How bytes are split into dibits (and packed back on the receive side).
enum class UnpackMode {
    low2,                // one dibit per byte; every byte must be < 4
    full_byte_msb_first, // four dibits per byte, most significant pair first
    full_byte_lsb_first, // four dibits per byte, least significant pair first
};

/// Gray constellation: points of dibits differing in one bit are nearest
/// neighbors. Bit 0 selects the sign of I, bit 1 the sign of Q.
///   0 -> (+1+j)/sqrt2   1 -> (-1+j)/sqrt2
///   2 -> (+1-j)/sqrt2   3 -> (-1-j)/sqrt2
std::array<cplx, 4> default_gray_mapping();

struct TxConfig {
    int sps = 4;
    double rolloff = 0.35;
    /// 22-symbol pulse span: long enough that the tx+rx cascade meets a
    /// 1e-3 zero-ISI bound (truncation limits an 11-symbol pulse to ~3e-3).
    int ntaps = 89;
    bool differential = true;
    std::array<cplx, 4> mapping = default_gray_mapping();
    double amplitude = 1.0;

    /// Throws std::invalid_argument naming the offending field. The mapping
    /// must be four equal-magnitude points that are 90-degree rotations of
    /// one another.
    void validate() const;
};

struct ByteSource {
    enum class Kind { random_uniform, vector };
    Kind kind = Kind::vector;

    // random_uniform: values drawn uniformly from [lo, hi)
    int lo = 0;
    int hi = 4;
    std::uint64_t seed = 0;

    // vector: repeats the list verbatim, in order
    ByteStream data;

    static ByteSource random_uniform(int lo, int hi, std::uint64_t seed);
    static ByteSource vector(ByteStream data);
};

/// Emits n bytes from the source. Deterministic given the seed; the vector
/// kind cycles its list. Throws for an empty vector list or a bad range.
ByteStream source_bytes(const ByteSource& src, std::size_t n);

/// low2 rejects bytes >= 4; the full-byte modes emit 4 dibits per byte.
DibitStream unpack_dibits(const ByteStream& bytes, UnpackMode mode);

/// out[k] = (in[k] + out[k-1]) mod 4, with out[-1] = initial.
DibitStream diff_encode(const DibitStream& dibits, std::uint8_t initial = 0);

/// Table lookup into cfg.mapping scaled by cfg.amplitude.
SymbolStream map_symbols(const DibitStream& dibits, const TxConfig& cfg);

/// Zero-stuffs each symbol to sps samples and shapes with the RRC designed
/// from cfg. Output rate is sps times the symbol rate.
SampleStream shape_pulses(const SymbolStream& symbols, const TxConfig& cfg);

/// Quadrant order of each mapping point: premap[d] is how many counter-
/// clockwise 90-degree steps take mapping[0] to mapping[d]. Differential
/// encoding runs on these quadrant offsets so that a constant constellation
/// rotation cancels in the first difference.
std::array<std::uint8_t, 4> quadrant_premap(const std::array<cplx, 4>& mapping);

/// Table indexed by accumulated quadrant: entry q is mapping[0] rotated by
/// q*90 degrees counter-clockwise. quadrant_table[premap[d]] == mapping[d].
std::array<cplx, 4> quadrant_table(const std::array<cplx, 4>& mapping);

struct TxOutput {
    DibitStream dibits;   // data dibits before any differential encoding
    SymbolStream symbols; // transmitted constellation points
    SampleStream samples; // pulse-shaped baseband stream
};

/// Full transmit chain: source -> unpack -> (differential) map -> shape.
/// Produces exactly n_symbols symbols.
TxOutput run_tx(const ByteSource& src, const TxConfig& cfg, UnpackMode mode,
                std::size_t n_symbols);

} // namespace dsrclink
