#pragma once

#include "dsrclink/analysis.hpp"
#include "dsrclink/scenario.hpp"

#include <string>
#include <vector>

namespace dsrclink {

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
double qfunc(double x);

struct ScenarioResult {
    LinkReport report;
    /// Empty when every threshold for the scenario kind passed.
    std::vector<std::string> check_failures;
};

/// Runs tx -> channel -> rx -> analysis and writes psd.tsv,
/// constellation.tsv, eye.tsv, rx_dibits.bin and report.txt into
/// output_dir. Loss of lock is reported, never thrown.
ScenarioResult run_scenario(const Scenario& s);

struct SweepRow {
    double ebn0_db = 0.0;
    std::size_t bits = 0;
    std::size_t bit_errors = 0;
    double ber = 0.0;
    double ber_theory = 0.0;
    double rel_err = 0.0;
};

/// Genie-synchronized AWGN bit error rate sweep (loops bypassed: symbols
/// go straight through the noisy channel to the decision device). Writes
/// ber_sweep.tsv into output_dir. Each point owns an RNG stream derived
/// from (seed, point index).
std::vector<SweepRow> run_ber_sweep(const Scenario& s);
std::vector<std::string> check_sweep(const std::vector<SweepRow>& rows, double tolerance = 0.15);

struct AblationCell {
    bool differential = true;
    bool msb_first = true;
    double bw_scale = 1.0;
    int rotation_quarters = 0; // extra channel phase in 90-degree steps
    std::size_t frames_found = 0;
    bool payload_ok = false;
};

/// Reruns the marker-framing experiment across the ablation grid
/// {differential on/off} x {byte order MSB/LSB} x {loop bw x1/x4}
/// x {lock rotation 0/90deg}. Writes ablation.tsv into output_dir.
std::vector<AblationCell> run_ablation(const Scenario& s);
std::vector<std::string> check_ablation(const std::vector<AblationCell>& cells);

} // namespace dsrclink
