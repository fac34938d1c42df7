#pragma once

#include "dsrclink/analysis.hpp"
#include "dsrclink/channel.hpp"
#include "dsrclink/rx.hpp"
#include "dsrclink/tx.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dsrclink {

enum class ScenarioKind { random_uniform, sequence1, sequence2, ber_sweep, ablation };

const char* to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);

/// One reproducible experiment: data source, transmit settings, channel
/// impairments, receiver settings, and analysis parameters. Loaded from a
/// JSON file; the kind picks sensible defaults which individual fields
/// then override.
struct Scenario {
    ScenarioKind kind = ScenarioKind::sequence1;
    std::size_t duration_symbols = 100000;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    TxConfig tx;
    ByteSource source = ByteSource::vector({0, 1, 2, 3});
    UnpackMode unpack = UnpackMode::low2;
    ChannelConfig channel = ChannelConfig::lab_preset();
    RxConfig rx;

    /// Periodic sequence the receiver output is verified against (empty
    /// means no sync verification; then error rates are not reported).
    DibitStream expected{0, 1, 2, 3};
    int k_periods = 3;

    /// Marker-framed payload scan (sequence2-style experiments).
    bool scan_frames = false;
    FrameMarker marker;

    int psd_nfft = 1024;
    double psd_overlap = 0.5;
    double evm_window_frac = 0.25;

    // ber_sweep parameters
    std::vector<double> sweep_ebn0_db{4.0, 6.0, 8.0};
    std::size_t sweep_bits_per_point = 4000000;

    // Set when the file pinned these seeds explicitly; otherwise they are
    // derived from the master seed at run time.
    bool channel_seed_explicit = false;
    bool source_seed_explicit = false;

    static Scenario from_json_file(const std::string& path);
    static Scenario from_json_text(const std::string& text);

    /// Fills channel/source seeds from the master seed unless pinned.
    void finalize_seeds();

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

} // namespace dsrclink
