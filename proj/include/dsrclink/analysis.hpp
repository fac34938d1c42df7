#pragma once

#include "dsrclink/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dsrclink {

/// Byte pair marking the start of a frame, followed by payload_len bytes.
struct FrameMarker {
    std::array<std::uint8_t, 2> prefix{0, 255};
    std::size_t payload_len = 10;
};

struct SyncResult {
    std::size_t index = 0;    // first dibit of the verified periodic region
    std::size_t rotation = 0; // cyclic rotation of the expected sequence
};

/// Finds the smallest index at which k_periods consecutive copies of some
/// cyclic rotation of `expected` match exactly. Absolute alignment is
/// unknowable, so every rotation is scanned and the matching one reported.
std::optional<SyncResult> find_sync(const DibitStream& dibits, const DibitStream& expected,
                                    int k_periods = 3);

struct Frame {
    std::size_t offset = 0; // index of the first prefix byte
    ByteStream payload;
};

/// Every occurrence of the exact prefix pair followed by payload_len bytes,
/// matched greedily left to right (no overlaps). A prefix whose payload is
/// truncated by the stream end is excluded.
std::vector<Frame> detect_frames(const ByteStream& bytes, const FrameMarker& marker);

/// Scans all four dibit-to-byte alignments and returns the one yielding the
/// most frames. Returns {alignment shift, frames}.
std::pair<std::size_t, std::vector<Frame>> detect_frames_any_alignment(
    const DibitStream& dibits, const FrameMarker& marker, bool msb_first = true);

/// Symbol and bit error rates over rx[sync_index..] against the cyclically
/// rotated tx stream. Bit errors are Gray-label bit differences (the dibit
/// values are the Gray labels). Throws if the post-sync region is empty.
std::pair<double, double> compute_error_rates(const DibitStream& rx, const DibitStream& tx,
                                              std::size_t sync_index, std::size_t rotation);

/// RMS distance to the nearest constellation point divided by the RMS
/// constellation magnitude, in percent. Throws on an empty window.
double compute_evm(const SymbolStream& v, const std::array<cplx, 4>& mapping);

struct PsdPoint {
    double freq = 0.0;     // cycles/sample, DC-centered
    double power_db = 0.0;
};

/// Averaged windowed periodogram (Hann window). nfft must be a power of
/// two; overlap is the fractional window overlap in [0, 1).
std::vector<PsdPoint> export_psd(const SampleStream& x, int nfft, double overlap = 0.5);

/// Last n post-loop symbols as (re, im) rows.
std::vector<std::array<double, 2>> export_constellation(const SymbolStream& v, std::size_t n);

/// Matched-filter output cut into traces of span*sps samples starting at
/// `offset`, one trace per symbol period, capped at max_traces.
std::vector<SampleStream> export_eye(const SampleStream& x_matched, int sps, int span = 2,
                                     std::size_t offset = 0, std::size_t max_traces = 200);

/// Per-run link metrics, serialized as flat key=value text.
struct LinkReport {
    std::optional<std::size_t> sync_index;
    std::size_t sync_rotation = 0;
    bool have_error_rates = false;
    double ser_post_sync = 0.0;
    double ber_post_sync = 0.0;
    double evm_rms_pct = 0.0;
    bool clock_locked = false;
    bool costas_locked = false;
    int cma_resets = 0;
    double clock_rate = 0.0;
    double costas_freq = 0.0;
    std::size_t frames_found = 0;
    std::string payload_text;
    std::size_t n_symbols = 0;
    std::size_t n_dibits = 0;

    std::string to_text() const;
};

// Artifact writers. All output is deterministic byte-for-byte given
// identical inputs (fixed formatting, no timestamps).
void write_psd_tsv(const std::string& path, const std::vector<PsdPoint>& psd);
void write_constellation_tsv(const std::string& path,
                             const std::vector<std::array<double, 2>>& rows);
void write_eye_tsv(const std::string& path, const std::vector<SampleStream>& traces);
void write_dibits_bin(const std::string& path, const DibitStream& dibits);
void write_report(const std::string& path, const LinkReport& report);

} // namespace dsrclink
