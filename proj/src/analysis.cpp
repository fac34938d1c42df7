#include "dsrclink/analysis.hpp"

#include "dsrclink/dsp.hpp"
#include "dsrclink/rx.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dsrclink {

std::optional<SyncResult> find_sync(const DibitStream& dibits, const DibitStream& expected,
                                    int k_periods) {
    if (expected.empty())
        throw std::invalid_argument("find_sync: expected sequence must be nonempty");
    if (k_periods < 2)
        throw std::invalid_argument("find_sync: k_periods must be >= 2");

    const std::size_t period = expected.size();
    const std::size_t need = period * static_cast<std::size_t>(k_periods);
    if (dibits.size() < need)
        return std::nullopt;

    for (std::size_t i = 0; i + need <= dibits.size(); ++i) {
        for (std::size_t rot = 0; rot < period; ++rot) {
            bool ok = true;
            for (std::size_t m = 0; m < need; ++m) {
                if (dibits[i + m] != expected[(rot + m) % period]) {
                    ok = false;
                    break;
                }
            }
            if (ok)
                return SyncResult{i, rot};
        }
    }
    return std::nullopt;
}

std::vector<Frame> detect_frames(const ByteStream& bytes, const FrameMarker& marker) {
    std::vector<Frame> frames;
    if (marker.prefix[0] == marker.prefix[1])
        throw std::invalid_argument("FrameMarker.prefix: bytes must be distinct");
    std::size_t i = 0;
    while (i + 2 + marker.payload_len <= bytes.size()) {
        if (bytes[i] == marker.prefix[0] && bytes[i + 1] == marker.prefix[1]) {
            Frame f;
            f.offset = i;
            f.payload.assign(bytes.begin() + static_cast<long>(i + 2),
                             bytes.begin() + static_cast<long>(i + 2 + marker.payload_len));
            frames.push_back(std::move(f));
            i += 2 + marker.payload_len;
        } else {
            ++i;
        }
    }
    return frames;
}

std::pair<std::size_t, std::vector<Frame>> detect_frames_any_alignment(const DibitStream& dibits,
                                                                       const FrameMarker& marker,
                                                                       bool msb_first) {
    const UnpackMode mode =
        msb_first ? UnpackMode::full_byte_msb_first : UnpackMode::full_byte_lsb_first;
    std::size_t best_shift = 0;
    std::vector<Frame> best;
    for (std::size_t shift = 0; shift < 4 && shift < dibits.size(); ++shift) {
        DibitStream view(dibits.begin() + static_cast<long>(shift), dibits.end());
        auto frames = detect_frames(pack_bytes(view, mode), marker);
        if (frames.size() > best.size()) {
            best_shift = shift;
            best = std::move(frames);
        }
    }
    return {best_shift, std::move(best)};
}

std::pair<double, double> compute_error_rates(const DibitStream& rx, const DibitStream& tx,
                                              std::size_t sync_index, std::size_t rotation) {
    if (tx.empty())
        throw std::invalid_argument("compute_error_rates: tx stream must be nonempty");
    if (sync_index >= rx.size())
        throw std::invalid_argument("compute_error_rates: empty post-sync region");

    std::size_t sym_errors = 0;
    std::size_t bit_errors = 0;
    const std::size_t n = rx.size() - sync_index;
    for (std::size_t m = 0; m < n; ++m) {
        const std::uint8_t a = rx[sync_index + m];
        const std::uint8_t b = tx[(rotation + m) % tx.size()];
        if (a != b)
            ++sym_errors;
        const std::uint8_t diff = a ^ b;
        bit_errors += (diff & 1u) + ((diff >> 1) & 1u);
    }
    return {static_cast<double>(sym_errors) / static_cast<double>(n),
            static_cast<double>(bit_errors) / static_cast<double>(2 * n)};
}

double compute_evm(const SymbolStream& v, const std::array<cplx, 4>& mapping) {
    if (v.empty())
        throw std::invalid_argument("compute_evm: empty window");
    double ref = 0.0;
    for (const cplx& p : mapping)
        ref += std::norm(p);
    ref /= 4.0;

    double err = 0.0;
    for (const cplx& s : v) {
        double best = std::norm(s - mapping[0]);
        for (int d = 1; d < 4; ++d)
            best = std::min(best, std::norm(s - mapping[static_cast<std::size_t>(d)]));
        err += best;
    }
    err /= static_cast<double>(v.size());
    return 100.0 * std::sqrt(err / ref);
}

std::vector<PsdPoint> export_psd(const SampleStream& x, int nfft, double overlap) {
    if (nfft < 2 || (nfft & (nfft - 1)) != 0)
        throw std::invalid_argument("export_psd: nfft must be a power of two");
    if (overlap < 0.0 || overlap >= 1.0)
        throw std::invalid_argument("export_psd: overlap must be in [0, 1)");
    const std::size_t n = static_cast<std::size_t>(nfft);
    if (x.size() < n)
        throw std::invalid_argument("export_psd: input shorter than nfft");

    std::vector<double> window(n);
    double wsum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(i) /
                                          static_cast<double>(n - 1)));
        wsum2 += window[i] * window[i];
    }

    const std::size_t hop =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround((1.0 - overlap) *
                                                                      static_cast<double>(n))));
    std::vector<double> acc(n, 0.0);
    std::size_t segments = 0;
    std::vector<cplx> buf(n);
    for (std::size_t start = 0; start + n <= x.size(); start += hop) {
        for (std::size_t i = 0; i < n; ++i)
            buf[i] = x[start + i] * window[i];
        fft_radix2(buf);
        for (std::size_t i = 0; i < n; ++i)
            acc[i] += std::norm(buf[i]);
        ++segments;
    }

    const double scale = 1.0 / (static_cast<double>(segments) * wsum2);
    std::vector<PsdPoint> psd(n);
    for (std::size_t i = 0; i < n; ++i) {
        // DC-centered: output bin i corresponds to FFT bin (i + n/2) mod n.
        const std::size_t src = (i + n / 2) % n;
        const double p = acc[src] * scale;
        psd[i].freq = (static_cast<double>(i) - static_cast<double>(n / 2)) /
                      static_cast<double>(n);
        psd[i].power_db = 10.0 * std::log10(p + 1e-300);
    }
    return psd;
}

std::vector<std::array<double, 2>> export_constellation(const SymbolStream& v, std::size_t n) {
    const std::size_t take = std::min(n, v.size());
    std::vector<std::array<double, 2>> rows;
    rows.reserve(take);
    for (std::size_t i = v.size() - take; i < v.size(); ++i)
        rows.push_back({v[i].real(), v[i].imag()});
    return rows;
}

std::vector<SampleStream> export_eye(const SampleStream& x_matched, int sps, int span,
                                     std::size_t offset, std::size_t max_traces) {
    if (sps < 1 || span < 1)
        throw std::invalid_argument("export_eye: sps and span must be >= 1");
    const std::size_t trace_len = static_cast<std::size_t>(sps) * static_cast<std::size_t>(span);
    std::vector<SampleStream> traces;
    std::size_t start = offset;
    while (start + trace_len <= x_matched.size() && traces.size() < max_traces) {
        traces.emplace_back(x_matched.begin() + static_cast<long>(start),
                            x_matched.begin() + static_cast<long>(start + trace_len));
        start += static_cast<std::size_t>(sps);
    }
    return traces;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path);
    return out;
}

} // namespace

std::string LinkReport::to_text() const {
    std::string s;
    s += "sync_index=" + (sync_index ? std::to_string(*sync_index) : std::string("none")) + "\n";
    s += "sync_rotation=" + std::to_string(sync_rotation) + "\n";
    s += "ser_post_sync=" + (have_error_rates ? fmt(ser_post_sync) : std::string("n/a")) + "\n";
    s += "ber_post_sync=" + (have_error_rates ? fmt(ber_post_sync) : std::string("n/a")) + "\n";
    s += "evm_rms_pct=" + fmt(evm_rms_pct) + "\n";
    s += "clock_locked=" + std::string(clock_locked ? "1" : "0") + "\n";
    s += "costas_locked=" + std::string(costas_locked ? "1" : "0") + "\n";
    s += "cma_resets=" + std::to_string(cma_resets) + "\n";
    s += "clock_rate=" + fmt(clock_rate) + "\n";
    s += "costas_freq=" + fmt(costas_freq) + "\n";
    s += "frames_found=" + std::to_string(frames_found) + "\n";
    s += "payload_text=" + payload_text + "\n";
    s += "n_symbols=" + std::to_string(n_symbols) + "\n";
    s += "n_dibits=" + std::to_string(n_dibits) + "\n";
    return s;
}

void write_psd_tsv(const std::string& path, const std::vector<PsdPoint>& psd) {
    auto out = open_out(path);
    out << "freq_cycles_per_sample\tpower_db\n";
    for (const auto& p : psd)
        out << fmt(p.freq) << "\t" << fmt(p.power_db) << "\n";
}

void write_constellation_tsv(const std::string& path,
                             const std::vector<std::array<double, 2>>& rows) {
    auto out = open_out(path);
    out << "re\tim\n";
    for (const auto& r : rows)
        out << fmt(r[0]) << "\t" << fmt(r[1]) << "\n";
}

void write_eye_tsv(const std::string& path, const std::vector<SampleStream>& traces) {
    auto out = open_out(path);
    out << "trace\toffset\tre\tim\n";
    for (std::size_t t = 0; t < traces.size(); ++t)
        for (std::size_t i = 0; i < traces[t].size(); ++i)
            out << t << "\t" << i << "\t" << fmt(traces[t][i].real()) << "\t"
                << fmt(traces[t][i].imag()) << "\n";
}

void write_dibits_bin(const std::string& path, const DibitStream& dibits) {
    auto out = open_out(path, true);
    out.write(reinterpret_cast<const char*>(dibits.data()),
              static_cast<std::streamsize>(dibits.size()));
}

void write_report(const std::string& path, const LinkReport& report) {
    auto out = open_out(path);
    out << report.to_text();
}

} // namespace dsrclink
