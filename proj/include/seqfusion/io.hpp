#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "seqfusion/core.hpp"
#include "seqfusion/eval.hpp"
#include "seqfusion/fusion.hpp"
#include "seqfusion/simulator.hpp"
#include "seqfusion/transition.hpp"

namespace seqfusion {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Score CSV: header `frame,p_lg,p_us,p_ds,p_ur,p_dr[,truth]`, frame indices
/// contiguous from 1, probabilities with 9 decimal digits, truth in 1..5.
/// Rows are renormalized on read, so the stream satisfies the simplex
/// invariants even if the file was written by another tool.
ScoreStream read_score_csv(const std::filesystem::path& path);
void write_score_csv(const ScoreStream& stream, const std::filesystem::path& path);

/// Decisions CSV: a `# key=value,...` metadata line carrying method, delay
/// and fusion settings, then `frame,decision,posterior_1..posterior_5`.
struct DecisionsFile {
    FusionTrace trace;
    int smooth_window = 5;
    int vote_halfwidth = 1;
};

void write_decisions_csv(const FusionTrace& trace, int smooth_window, int vote_halfwidth,
                         const std::filesystem::path& path);
DecisionsFile read_decisions_csv(const std::filesystem::path& path);

/// Everything needed to reproduce a run byte for byte.
struct ConfigEcho {
    int smooth_window = 5;
    int vote_halfwidth = 1;
    TransitionRuleParams matrix_params;
    std::uint64_t seed = 0;
};

nlohmann::ordered_json report_json(const AccuracyReport& report, const ConfigEcho& echo,
                                   const std::optional<TTestResult>& ttest = std::nullopt);
nlohmann::ordered_json sweep_json(const DelaySweep& sweep, const ConfigEcho& echo,
                                  double frame_rate_hz);

void write_json_file(const nlohmann::ordered_json& j, const std::filesystem::path& path);
nlohmann::ordered_json read_json_file(const std::filesystem::path& path);

/// Tidy `method,delay_frames,delay_ms,mean_accuracy,sd` rows for plotting.
void write_sweep_csv(const DelaySweep& sweep, double frame_rate_hz,
                     const std::filesystem::path& path);

TransitionMatrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const TransitionMatrix& m, const std::filesystem::path& path);

/// Flat key=value run settings ('#' comments allowed). Keys: script,
/// frame_rate_hz, concentration, error_rate, error_bias, seed, p_stay,
/// p_even, p_odd, lw, lv, windows, trials. A script is a comma list of
/// LABEL:FRAMES segments, e.g. `LG:30,US:20`. Unknown keys are rejected.
struct RunSettings {
    TrialScript script = default_trial_script();
    NoiseModel noise;
    TransitionRuleParams matrix_params;
    int smooth_window = 5;
    int vote_halfwidth = 1;
    std::vector<int> windows = {1, 3, 5, 7, 9, 11};
    int trials = 5;
};

RunSettings parse_settings_text(const std::string& text);
RunSettings load_settings(const std::filesystem::path& path);

TrialScript parse_script_spec(const std::string& spec);  // "LG:30,US:20,..."

}  // namespace seqfusion
