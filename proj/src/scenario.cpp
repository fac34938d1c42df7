#include "dsrclink/scenario.hpp"

#include "dsrclink/random.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace dsrclink {

using nlohmann::json;

const char* to_string(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::random_uniform: return "random_uniform";
    case ScenarioKind::sequence1: return "sequence1";
    case ScenarioKind::sequence2: return "sequence2";
    case ScenarioKind::ber_sweep: return "ber_sweep";
    case ScenarioKind::ablation: return "ablation";
    }
    return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
    if (name == "random_uniform") return ScenarioKind::random_uniform;
    if (name == "sequence1") return ScenarioKind::sequence1;
    if (name == "sequence2") return ScenarioKind::sequence2;
    if (name == "ber_sweep") return ScenarioKind::ber_sweep;
    if (name == "ablation") return ScenarioKind::ablation;
    throw std::invalid_argument(
        "scenario.name: must be one of random_uniform, sequence1, sequence2, "
        "ber_sweep, ablation; got \"" + name + "\"");
}

namespace {

const ByteStream kSequence2Bytes = {0, 255, 72, 101, 108, 108, 111, 87, 111, 114, 108, 100};

UnpackMode unpack_mode_from_string(const std::string& s, const char* field) {
    if (s == "low2") return UnpackMode::low2;
    if (s == "msb_first") return UnpackMode::full_byte_msb_first;
    if (s == "lsb_first") return UnpackMode::full_byte_lsb_first;
    throw std::invalid_argument(std::string(field) +
                                ": must be one of low2, msb_first, lsb_first");
}

void apply_kind_defaults(Scenario& s) {
    switch (s.kind) {
    case ScenarioKind::random_uniform:
        s.source = ByteSource::random_uniform(0, 4, 0);
        s.unpack = UnpackMode::low2;
        s.expected.clear();
        break;
    case ScenarioKind::sequence1:
        s.source = ByteSource::vector({0, 1, 2, 3});
        s.unpack = UnpackMode::low2;
        s.expected = {0, 1, 2, 3};
        break;
    case ScenarioKind::sequence2:
    case ScenarioKind::ablation:
        s.source = ByteSource::vector(kSequence2Bytes);
        s.unpack = UnpackMode::full_byte_msb_first;
        s.expected.clear();
        s.scan_frames = true;
        s.marker = FrameMarker{{0, 255}, 10};
        break;
    case ScenarioKind::ber_sweep:
        s.expected.clear();
        break;
    }
}

cplx parse_cplx(const json& j, const char* field) {
    if (j.is_number())
        return cplx{j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx{j[0].get<double>(), j[1].get<double>()};
    throw std::invalid_argument(std::string(field) +
                                ": expected a number or [re, im] pair");
}

void parse_tx(Scenario& s, const json& j) {
    if (j.contains("sps")) s.tx.sps = j.at("sps").get<int>();
    if (j.contains("rolloff")) s.tx.rolloff = j.at("rolloff").get<double>();
    if (j.contains("ntaps")) s.tx.ntaps = j.at("ntaps").get<int>();
    if (j.contains("differential")) s.tx.differential = j.at("differential").get<bool>();
    if (j.contains("amplitude")) s.tx.amplitude = j.at("amplitude").get<double>();
    if (j.contains("mapping")) {
        const auto& m = j.at("mapping");
        if (!m.is_array() || m.size() != 4)
            throw std::invalid_argument("tx.mapping: expected 4 constellation points");
        for (int d = 0; d < 4; ++d)
            s.tx.mapping[static_cast<std::size_t>(d)] = parse_cplx(m[static_cast<std::size_t>(d)], "tx.mapping");
    }
}

void parse_source(Scenario& s, const json& j) {
    if (j.contains("kind")) {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "random_uniform") {
            s.source.kind = ByteSource::Kind::random_uniform;
            s.source.lo = j.value("lo", 0);
            s.source.hi = j.value("hi", 4);
        } else if (kind == "vector") {
            s.source.kind = ByteSource::Kind::vector;
            if (!j.contains("data"))
                throw std::invalid_argument("source.data: required for vector sources");
        } else {
            throw std::invalid_argument("source.kind: must be random_uniform or vector");
        }
    }
    if (j.contains("data"))
        s.source.data = j.at("data").get<ByteStream>();
    if (j.contains("seed")) {
        s.source.seed = j.at("seed").get<std::uint64_t>();
        s.source_seed_explicit = true;
    }
    if (j.contains("unpack"))
        s.unpack = unpack_mode_from_string(j.at("unpack").get<std::string>(), "source.unpack");
}

void parse_channel(Scenario& s, const json& j) {
    if (j.contains("taps")) {
        s.channel.taps.clear();
        for (const auto& t : j.at("taps"))
            s.channel.taps.push_back(parse_cplx(t, "channel.taps"));
    }
    if (j.contains("cfo")) s.channel.cfo = j.at("cfo").get<double>();
    if (j.contains("phase0")) s.channel.phase0 = j.at("phase0").get<double>();
    if (j.contains("timing_frac")) s.channel.timing_frac = j.at("timing_frac").get<double>();
    if (j.contains("clock_ppm")) s.channel.clock_ppm = j.at("clock_ppm").get<double>();
    if (j.contains("ebn0_db")) {
        const auto& v = j.at("ebn0_db");
        if (v.is_null() || (v.is_string() && v.get<std::string>() == "noiseless"))
            s.channel.snr_eb_n0_db.reset();
        else if (v.is_number())
            s.channel.snr_eb_n0_db = v.get<double>();
        else
            throw std::invalid_argument("channel.ebn0_db: expected a number or \"noiseless\"");
    }
    if (j.contains("seed")) {
        s.channel.seed = j.at("seed").get<std::uint64_t>();
        s.channel_seed_explicit = true;
    }
}

void parse_rx(Scenario& s, const json& j) {
    if (j.contains("nfilts")) s.rx.nfilts = j.at("nfilts").get<int>();
    if (j.contains("proto_symbol_span"))
        s.rx.proto_symbol_span = j.at("proto_symbol_span").get<int>();
    if (j.contains("clock_bw")) s.rx.clock_bw = j.at("clock_bw").get<double>();
    if (j.contains("costas_bw")) s.rx.costas_bw = j.at("costas_bw").get<double>();
    if (j.contains("max_rate_dev")) s.rx.max_rate_dev = j.at("max_rate_dev").get<double>();
    if (j.contains("cma")) {
        const auto& c = j.at("cma");
        if (c.contains("enabled")) s.rx.cma.enabled = c.at("enabled").get<bool>();
        if (c.contains("length")) s.rx.cma.length = c.at("length").get<int>();
        if (c.contains("step_mu")) s.rx.cma.step_mu = c.at("step_mu").get<double>();
        if (c.contains("modulus")) s.rx.cma.modulus_r = c.at("modulus").get<double>();
    }
}

void parse_analysis(Scenario& s, const json& j) {
    if (j.contains("expected"))
        s.expected = j.at("expected").get<DibitStream>();
    if (j.contains("k_periods")) s.k_periods = j.at("k_periods").get<int>();
    if (j.contains("scan_frames")) s.scan_frames = j.at("scan_frames").get<bool>();
    if (j.contains("marker_prefix")) {
        const auto& p = j.at("marker_prefix");
        if (!p.is_array() || p.size() != 2)
            throw std::invalid_argument("analysis.marker_prefix: expected two bytes");
        s.marker.prefix = {p[0].get<std::uint8_t>(), p[1].get<std::uint8_t>()};
    }
    if (j.contains("payload_len")) s.marker.payload_len = j.at("payload_len").get<std::size_t>();
    if (j.contains("psd_nfft")) s.psd_nfft = j.at("psd_nfft").get<int>();
    if (j.contains("psd_overlap")) s.psd_overlap = j.at("psd_overlap").get<double>();
    if (j.contains("evm_window_frac"))
        s.evm_window_frac = j.at("evm_window_frac").get<double>();
}

void parse_sweep(Scenario& s, const json& j) {
    if (j.contains("ebn0_db"))
        s.sweep_ebn0_db = j.at("ebn0_db").get<std::vector<double>>();
    if (j.contains("bits_per_point"))
        s.sweep_bits_per_point = j.at("bits_per_point").get<std::size_t>();
}

} // namespace

Scenario Scenario::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!j.contains("name"))
        throw std::invalid_argument("scenario.name: required");

    Scenario s;
    s.kind = scenario_kind_from_string(j.at("name").get<std::string>());
    apply_kind_defaults(s);

    try {
        if (j.contains("duration_symbols"))
            s.duration_symbols = j.at("duration_symbols").get<std::size_t>();
        if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("output_dir")) s.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("tx")) parse_tx(s, j.at("tx"));
        if (j.contains("source")) parse_source(s, j.at("source"));
        if (j.contains("channel")) parse_channel(s, j.at("channel"));
        if (j.contains("rx")) parse_rx(s, j.at("rx"));
        if (j.contains("analysis")) parse_analysis(s, j.at("analysis"));
        if (j.contains("sweep")) parse_sweep(s, j.at("sweep"));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scenario: bad field type: ") + e.what());
    }

    // Receiver settings mirror the transmit side unless overridden later.
    s.rx.sps = s.tx.sps;
    s.rx.rolloff = s.tx.rolloff;
    s.rx.differential = s.tx.differential;
    s.rx.mapping = s.tx.mapping;
    s.rx.pack_mode = s.unpack;
    return s;
}

Scenario Scenario::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("scenario: cannot open file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

void Scenario::finalize_seeds() {
    if (!source_seed_explicit)
        source.seed = derive_seed(seed, 0);
    if (!channel_seed_explicit)
        channel.seed = derive_seed(seed, 1);
}

void Scenario::validate() const {
    tx.validate();
    channel.validate();
    rx.validate();
    if (kind == ScenarioKind::ber_sweep) {
        if (sweep_bits_per_point < 1000000)
            throw std::invalid_argument("sweep.bits_per_point: must be >= 1e6");
        if (sweep_ebn0_db.empty())
            throw std::invalid_argument("sweep.ebn0_db: must be nonempty");
    } else {
        if (duration_symbols < 10000)
            throw std::invalid_argument("scenario.duration_symbols: must be >= 10000");
    }
    if (evm_window_frac <= 0.0 || evm_window_frac > 1.0)
        throw std::invalid_argument("analysis.evm_window_frac: must be in (0, 1]");
    if (k_periods < 2)
        throw std::invalid_argument("analysis.k_periods: must be >= 2");
    if (output_dir.empty())
        throw std::invalid_argument("scenario.output_dir: must be nonempty");
}

} // namespace dsrclink
