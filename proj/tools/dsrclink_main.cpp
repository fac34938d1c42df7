#include "dsrclink/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

namespace {

struct CommonOpts {
    std::string scenario_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> duration;
    bool check = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("scenario", opts.scenario_file, "scenario JSON file")->required();
    cmd->add_option("--seed", opts.seed, "override the master seed");
    cmd->add_option("--out", opts.out_dir, "override the output directory");
    cmd->add_option("--duration", opts.duration, "override duration_symbols");
    cmd->add_flag("--check", opts.check, "verify thresholds; nonzero exit on failure");
}

dsrclink::Scenario load(const CommonOpts& opts) {
    dsrclink::Scenario s = dsrclink::Scenario::from_json_file(opts.scenario_file);
    if (opts.seed)
        s.seed = *opts.seed;
    if (opts.out_dir)
        s.output_dir = *opts.out_dir;
    if (opts.duration)
        s.duration_symbols = *opts.duration;
    return s;
}

int report_check(const std::vector<std::string>& failures, bool check) {
    if (failures.empty()) {
        if (check)
            std::printf("check: ok\n");
        return 0;
    }
    for (const auto& f : failures)
        std::printf("check: FAILED: %s\n", f.c_str());
    return check ? 1 : 0;
}

int cmd_run(const CommonOpts& opts) {
    const dsrclink::Scenario s = load(opts);
    const dsrclink::ScenarioResult res = dsrclink::run_scenario(s);
    std::printf("%s", res.report.to_text().c_str());
    std::printf("artifacts written to %s\n", s.output_dir.c_str());
    return report_check(res.check_failures, opts.check);
}

int cmd_sweep(const CommonOpts& opts) {
    const dsrclink::Scenario s = load(opts);
    const auto rows = dsrclink::run_ber_sweep(s);
    std::printf("ebn0_db\tbits\tbit_errors\tber\tber_theory\trel_err\n");
    for (const auto& r : rows)
        std::printf("%.3g\t%zu\t%zu\t%.6g\t%.6g\t%.4g\n", r.ebn0_db, r.bits, r.bit_errors, r.ber,
                    r.ber_theory, r.rel_err);
    return report_check(dsrclink::check_sweep(rows), opts.check);
}

int cmd_ablate(const CommonOpts& opts) {
    const dsrclink::Scenario s = load(opts);
    const auto cells = dsrclink::run_ablation(s);
    std::printf("differential\tmsb_first\tbw_scale\trotation_deg\tframes_found\tpayload_ok\n");
    for (const auto& c : cells)
        std::printf("%d\t%d\t%.3g\t%d\t%zu\t%d\n", c.differential ? 1 : 0, c.msb_first ? 1 : 0,
                    c.bw_scale, 90 * c.rotation_quarters, c.frames_found, c.payload_ok ? 1 : 0);
    return report_check(dsrclink::check_ablation(cells), opts.check);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"QPSK link simulator: transmit chain, impairment channel, recovery loop"};
    app.require_subcommand(1);

    CommonOpts run_opts, sweep_opts, ablate_opts;
    CLI::App* run = app.add_subcommand("run", "run one scenario end to end");
    add_common(run, run_opts);
    CLI::App* sweep = app.add_subcommand("sweep", "genie-synced BER sweep vs theory");
    add_common(sweep, sweep_opts);
    CLI::App* ablate = app.add_subcommand("ablate", "marker-framing ablation grid");
    add_common(ablate, ablate_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(run_opts);
        if (sweep->parsed())
            return cmd_sweep(sweep_opts);
        if (ablate->parsed())
            return cmd_ablate(ablate_opts);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
