#pragma once

#include "dsrclink/cma.hpp"
#include "dsrclink/clock_sync.hpp"
#include "dsrclink/costas.hpp"
#include "dsrclink/tx.hpp"
#include "dsrclink/types.hpp"

#include <array>
#include <cstdint>

namespace dsrclink {

/// Nearest-constellation-point decision; ties break toward the lowest
/// dibit index.
DibitStream decide(const SymbolStream& v, const std::array<cplx, 4>& mapping);

/// out[k] = (in[k] - in[k-1]) mod 4 with in[-1] = initial.
DibitStream diff_decode(const DibitStream& dibits, std::uint8_t initial = 0);

/// Inverse of unpack_dibits per mode. The full-byte modes consume four
/// dibits per byte; a trailing partial group is dropped.
ByteStream pack_bytes(const DibitStream& dibits, UnpackMode mode);

struct RxConfig {
    int sps = 4;
    double rolloff = 0.35;
    int nfilts = 32;
    int proto_symbol_span = 11;
    double clock_bw = two_pi / 100.0;
    double costas_bw = two_pi / 100.0;
    double max_rate_dev = 0.01;
    CmaConfig cma;
    bool differential = true;
    std::array<cplx, 4> mapping = default_gray_mapping();
    UnpackMode pack_mode = UnpackMode::low2;
    double clock_lock_threshold = 0.2;
    double costas_lock_threshold = 0.2;
    int lock_window = 500;

    void validate() const;

    ClockSyncConfig clock_sync_config() const;
    CostasConfig costas_config() const;
};

struct RxResult {
    SymbolStream symbols; // carrier-corrected symbols (post Costas)
    DibitStream dibits;   // decoded data dibits
    ByteStream bytes;     // dibits repacked per pack_mode

    bool clock_locked = false;
    bool costas_locked = false;
    int cma_resets = 0;
    double clock_rate = 0.0;  // trailing-mean samples/symbol estimate
    double costas_freq = 0.0; // trailing-mean rad/symbol estimate

    std::vector<double> rate_history;
    std::vector<double> clock_error_history;
    std::vector<double> costas_freq_history;
};

/// Full recovery loop: clock sync -> CMA (optional) -> Costas -> decision
/// -> differential decode -> repack. Loss of lock is reported in the
/// result, never thrown; pre-lock decisions are emitted as-is.
RxResult run_rx(const SampleStream& x, const RxConfig& cfg);

} // namespace dsrclink
