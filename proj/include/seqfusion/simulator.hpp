#pragma once

#include <cstdint>
#include <vector>

#include "seqfusion/core.hpp"

namespace seqfusion {

/// Ordered walking segments. The default script covers all five
/// environments with three level-ground stretches between them.
struct TrialScript {
    struct Segment {
        EnvLabel label;
        int frames;
    };
    std::vector<Segment> segments;
    double frame_rate_hz = 15.0;

    int total_frames() const;
    std::vector<EnvLabel> expand() const;
};

void validate_script(const TrialScript& script);  // throws std::invalid_argument

/// LG 30, US 20, LG 30, DS 20, LG 30, UR 20, DR 20 at 15 Hz (170 frames,
/// about 11 s). Segment lengths are plausible stand-ins, not measurements.
TrialScript default_trial_script();

/// Emission noise. Clean frames draw from a symmetric Dirichlet (base
/// parameter 1) whose true-label parameter is multiplied by
/// `concentration`; the expected true-label mass grows with concentration.
/// Error frames put `error_bias` mass on one uniformly chosen wrong label
/// and spread the rest evenly. A seed pins the whole stream.
struct NoiseModel {
    double concentration = 8.0;
    double error_rate = 0.1;
    double error_bias = 0.6;
    std::uint64_t seed = 0;
};

void validate_noise(const NoiseModel& noise);  // throws std::invalid_argument

/// Same sharpness, doubled error rate.
NoiseModel outdoor_noise(const NoiseModel& base);

ScoreStream generate_trial(const TrialScript& script, const NoiseModel& noise);

/// n_trials independent streams; trial i uses seed + i, so sessions are
/// reproducible and trials pairwise different.
std::vector<ScoreStream> generate_session(const TrialScript& script, const NoiseModel& noise,
                                          int n_trials);

}  // namespace seqfusion
