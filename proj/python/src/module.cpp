#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dsrclink/analysis.hpp"
#include "dsrclink/channel.hpp"
#include "dsrclink/dsp.hpp"
#include "dsrclink/runner.hpp"
#include "dsrclink/rx.hpp"
#include "dsrclink/scenario.hpp"
#include "dsrclink/tx.hpp"

#include <array>

namespace py = pybind11;
using namespace dsrclink;

namespace {

UnpackMode unpack_from_string(const std::string& mode) {
    if (mode == "low2")
        return UnpackMode::low2;
    if (mode == "msb_first")
        return UnpackMode::full_byte_msb_first;
    if (mode == "lsb_first")
        return UnpackMode::full_byte_lsb_first;
    throw std::invalid_argument("mode: must be one of low2, msb_first, lsb_first");
}

py::dict report_to_dict(const LinkReport& r) {
    py::dict d;
    d["sync_index"] = r.sync_index ? py::cast(*r.sync_index) : py::none();
    d["sync_rotation"] = r.sync_rotation;
    d["ser_post_sync"] = r.have_error_rates ? py::cast(r.ser_post_sync) : py::none();
    d["ber_post_sync"] = r.have_error_rates ? py::cast(r.ber_post_sync) : py::none();
    d["evm_rms_pct"] = r.evm_rms_pct;
    d["clock_locked"] = r.clock_locked;
    d["costas_locked"] = r.costas_locked;
    d["cma_resets"] = r.cma_resets;
    d["clock_rate"] = r.clock_rate;
    d["costas_freq"] = r.costas_freq;
    d["frames_found"] = r.frames_found;
    d["payload_text"] = r.payload_text;
    d["n_symbols"] = r.n_symbols;
    d["n_dibits"] = r.n_dibits;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "QPSK link simulator: transmit chain, impairment channel, recovery loop";

    // --- filters and oscillators ---
    m.def(
        "design_rrc",
        [](int sps, double rolloff, int ntaps) {
            return design_rrc(sps, rolloff, ntaps).coefficients;
        },
        py::arg("sps"), py::arg("rolloff"), py::arg("ntaps"),
        "Unit-energy root-raised-cosine taps.");
    m.def(
        "fir_filter",
        [](const std::vector<double>& taps, const SampleStream& x) {
            FirTaps t{taps, 1};
            return fir_filter(t, x);
        },
        py::arg("taps"), py::arg("x"),
        "Streaming FIR with zero history; output length equals input length.");
    m.def(
        "polyphase_decompose",
        [](const std::vector<double>& proto, int nfilts) {
            const PolyphaseBank bank = polyphase_decompose(FirTaps{proto, 1}, nfilts);
            return py::make_tuple(bank.banks, bank.derivative_banks);
        },
        py::arg("prototype"), py::arg("nfilts"));
    m.def("nco_advance", &nco_advance, py::arg("phase"), py::arg("freq"), py::arg("n"));

    // --- transmit chain ---
    py::class_<TxConfig>(m, "TxConfig")
        .def(py::init<>())
        .def_readwrite("sps", &TxConfig::sps)
        .def_readwrite("rolloff", &TxConfig::rolloff)
        .def_readwrite("ntaps", &TxConfig::ntaps)
        .def_readwrite("differential", &TxConfig::differential)
        .def_readwrite("amplitude", &TxConfig::amplitude)
        .def_property(
            "mapping", [](const TxConfig& c) { return std::vector<cplx>(c.mapping.begin(), c.mapping.end()); },
            [](TxConfig& c, const std::vector<cplx>& m) {
                if (m.size() != 4)
                    throw std::invalid_argument("mapping: expected 4 points");
                std::copy(m.begin(), m.end(), c.mapping.begin());
            })
        .def("validate", &TxConfig::validate);

    m.def("default_gray_mapping", [] {
        const auto m4 = default_gray_mapping();
        return std::vector<cplx>(m4.begin(), m4.end());
    });

    m.def(
        "random_bytes",
        [](int lo, int hi, std::uint64_t seed, std::size_t n) {
            return source_bytes(ByteSource::random_uniform(lo, hi, seed), n);
        },
        py::arg("lo"), py::arg("hi"), py::arg("seed"), py::arg("n"));
    m.def(
        "vector_bytes",
        [](const ByteStream& data, std::size_t n) {
            return source_bytes(ByteSource::vector(data), n);
        },
        py::arg("data"), py::arg("n"));
    m.def(
        "unpack_dibits",
        [](const ByteStream& bytes, const std::string& mode) {
            return unpack_dibits(bytes, unpack_from_string(mode));
        },
        py::arg("bytes"), py::arg("mode") = "low2");
    m.def("diff_encode", &diff_encode, py::arg("dibits"), py::arg("initial") = 0);
    m.def("diff_decode", &diff_decode, py::arg("dibits"), py::arg("initial") = 0);
    m.def("map_symbols", &map_symbols, py::arg("dibits"), py::arg("cfg") = TxConfig{});
    m.def("shape_pulses", &shape_pulses, py::arg("symbols"), py::arg("cfg") = TxConfig{});
    m.def(
        "run_tx",
        [](const ByteStream& data, const TxConfig& cfg, const std::string& mode,
           std::size_t n_symbols) {
            const TxOutput out =
                run_tx(ByteSource::vector(data), cfg, unpack_from_string(mode), n_symbols);
            return py::make_tuple(out.dibits, out.symbols, out.samples);
        },
        py::arg("data"), py::arg("cfg") = TxConfig{}, py::arg("mode") = "low2",
        py::arg("n_symbols") = 1000,
        "Vector-source transmit chain; returns (dibits, symbols, samples).");

    // --- channel ---
    py::class_<ChannelConfig>(m, "ChannelConfig")
        .def(py::init<>())
        .def_static("lab_preset", &ChannelConfig::lab_preset)
        .def_readwrite("taps", &ChannelConfig::taps)
        .def_readwrite("cfo", &ChannelConfig::cfo)
        .def_readwrite("phase0", &ChannelConfig::phase0)
        .def_readwrite("timing_frac", &ChannelConfig::timing_frac)
        .def_readwrite("clock_ppm", &ChannelConfig::clock_ppm)
        .def_readwrite("snr_eb_n0_db", &ChannelConfig::snr_eb_n0_db)
        .def_readwrite("seed", &ChannelConfig::seed)
        .def("validate", &ChannelConfig::validate);

    m.def("apply_multipath", &apply_multipath, py::arg("x"), py::arg("taps"));
    m.def("apply_cfo", &apply_cfo, py::arg("x"), py::arg("cfo"), py::arg("phase0") = 0.0);
    m.def("apply_timing", &apply_timing, py::arg("x"), py::arg("timing_frac"),
          py::arg("clock_ppm") = 0.0);
    m.def("apply_awgn", &apply_awgn, py::arg("x"), py::arg("eb_n0_db"),
          py::arg("bits_per_symbol") = 2, py::arg("sps") = 4, py::arg("seed") = 0);
    m.def("run_channel", &run_channel, py::arg("x"), py::arg("cfg"), py::arg("sps") = 4);

    // --- receive chain ---
    py::class_<CmaConfig>(m, "CmaConfig")
        .def(py::init<>())
        .def_readwrite("enabled", &CmaConfig::enabled)
        .def_readwrite("length", &CmaConfig::length)
        .def_readwrite("step_mu", &CmaConfig::step_mu)
        .def_readwrite("modulus_r", &CmaConfig::modulus_r);

    py::class_<RxConfig>(m, "RxConfig")
        .def(py::init<>())
        .def_readwrite("sps", &RxConfig::sps)
        .def_readwrite("rolloff", &RxConfig::rolloff)
        .def_readwrite("nfilts", &RxConfig::nfilts)
        .def_readwrite("clock_bw", &RxConfig::clock_bw)
        .def_readwrite("costas_bw", &RxConfig::costas_bw)
        .def_readwrite("cma", &RxConfig::cma)
        .def_readwrite("differential", &RxConfig::differential)
        .def("validate", &RxConfig::validate);

    py::class_<RxResult>(m, "RxResult")
        .def_readonly("symbols", &RxResult::symbols)
        .def_readonly("dibits", &RxResult::dibits)
        .def_readonly("bytes", &RxResult::bytes)
        .def_readonly("clock_locked", &RxResult::clock_locked)
        .def_readonly("costas_locked", &RxResult::costas_locked)
        .def_readonly("cma_resets", &RxResult::cma_resets)
        .def_readonly("clock_rate", &RxResult::clock_rate)
        .def_readonly("costas_freq", &RxResult::costas_freq);

    m.def("run_rx", &run_rx, py::arg("x"), py::arg("cfg") = RxConfig{});
    m.def(
        "decide",
        [](const SymbolStream& v, const std::vector<cplx>& mapping) {
            if (mapping.size() != 4)
                throw std::invalid_argument("mapping: expected 4 points");
            std::array<cplx, 4> m4;
            std::copy(mapping.begin(), mapping.end(), m4.begin());
            return decide(v, m4);
        },
        py::arg("v"), py::arg("mapping"));
    m.def(
        "pack_bytes",
        [](const DibitStream& dibits, const std::string& mode) {
            return pack_bytes(dibits, unpack_from_string(mode));
        },
        py::arg("dibits"), py::arg("mode") = "low2");

    // --- analysis ---
    m.def(
        "find_sync",
        [](const DibitStream& dibits, const DibitStream& expected, int k_periods)
            -> py::object {
            const auto sync = find_sync(dibits, expected, k_periods);
            if (!sync)
                return py::none();
            return py::make_tuple(sync->index, sync->rotation);
        },
        py::arg("dibits"), py::arg("expected"), py::arg("k_periods") = 3,
        "Returns (index, rotation) or None.");
    m.def(
        "detect_frames",
        [](const ByteStream& bytes, const std::vector<std::uint8_t>& prefix,
           std::size_t payload_len) {
            if (prefix.size() != 2)
                throw std::invalid_argument("prefix: expected two bytes");
            FrameMarker marker{{prefix[0], prefix[1]}, payload_len};
            std::vector<py::tuple> out;
            for (const auto& f : detect_frames(bytes, marker))
                out.push_back(py::make_tuple(f.offset, f.payload));
            return out;
        },
        py::arg("bytes"), py::arg("prefix") = std::vector<std::uint8_t>{0, 255},
        py::arg("payload_len") = 10);
    m.def("compute_error_rates", &compute_error_rates, py::arg("rx"), py::arg("tx"),
          py::arg("sync_index") = 0, py::arg("rotation") = 0);
    m.def(
        "compute_evm",
        [](const SymbolStream& v, const std::vector<cplx>& mapping) {
            std::array<cplx, 4> m4 = default_gray_mapping();
            if (!mapping.empty()) {
                if (mapping.size() != 4)
                    throw std::invalid_argument("mapping: expected 4 points");
                std::copy(mapping.begin(), mapping.end(), m4.begin());
            }
            return compute_evm(v, m4);
        },
        py::arg("v"), py::arg("mapping") = std::vector<cplx>{});
    m.def(
        "psd",
        [](const SampleStream& x, int nfft, double overlap) {
            std::vector<double> freq, power;
            for (const auto& p : export_psd(x, nfft, overlap)) {
                freq.push_back(p.freq);
                power.push_back(p.power_db);
            }
            return py::make_tuple(freq, power);
        },
        py::arg("x"), py::arg("nfft") = 1024, py::arg("overlap") = 0.5,
        "Averaged periodogram; returns (freq, power_db), DC-centered.");
    m.def("qfunc", &qfunc, py::arg("x"));

    // --- scenario runner ---
    m.def(
        "run_scenario_file",
        [](const std::string& path, py::object seed, py::object out_dir, py::object duration) {
            Scenario s = Scenario::from_json_file(path);
            if (!seed.is_none())
                s.seed = seed.cast<std::uint64_t>();
            if (!out_dir.is_none())
                s.output_dir = out_dir.cast<std::string>();
            if (!duration.is_none())
                s.duration_symbols = duration.cast<std::size_t>();
            const ScenarioResult res = run_scenario(s);
            py::dict d = report_to_dict(res.report);
            d["check_failures"] = res.check_failures;
            return d;
        },
        py::arg("path"), py::arg("seed") = py::none(), py::arg("out_dir") = py::none(),
        py::arg("duration") = py::none(),
        "Run a scenario JSON file; returns the link report as a dict.");
    m.def(
        "run_scenario_json",
        [](const std::string& text) {
            const ScenarioResult res = run_scenario(Scenario::from_json_text(text));
            py::dict d = report_to_dict(res.report);
            d["check_failures"] = res.check_failures;
            return d;
        },
        py::arg("json_text"));
}
