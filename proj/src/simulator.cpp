#include "seqfusion/simulator.hpp"

#include <cmath>
#include <stdexcept>

#include "seqfusion/rng.hpp"

namespace seqfusion {

namespace {
constexpr double kDirichletBase = 1.0;
}

int TrialScript::total_frames() const {
    int n = 0;
    for (const auto& seg : segments) n += seg.frames;
    return n;
}

std::vector<EnvLabel> TrialScript::expand() const {
    std::vector<EnvLabel> truth;
    truth.reserve(static_cast<std::size_t>(total_frames()));
    for (const auto& seg : segments) {
        for (int k = 0; k < seg.frames; ++k) truth.push_back(seg.label);
    }
    return truth;
}

void validate_script(const TrialScript& script) {
    if (script.segments.empty()) throw std::invalid_argument("script has no segments");
    for (const auto& seg : script.segments) {
        if (seg.frames <= 0) throw std::invalid_argument("segment duration must be positive");
    }
    if (!(script.frame_rate_hz > 0.0)) throw std::invalid_argument("frame rate must be > 0");
}

TrialScript default_trial_script() {
    using enum EnvLabel;
    return TrialScript{{{LevelGround, 30},
                        {UpStairs, 20},
                        {LevelGround, 30},
                        {DownStairs, 20},
                        {LevelGround, 30},
                        {UpRamp, 20},
                        {DownRamp, 20}},
                       15.0};
}

void validate_noise(const NoiseModel& noise) {
    if (!(noise.concentration > 0.0)) throw std::invalid_argument("concentration must be > 0");
    if (!(noise.error_rate >= 0.0 && noise.error_rate < 1.0)) {
        throw std::invalid_argument("error_rate must lie in [0, 1)");
    }
    if (!(noise.error_bias > 0.0 && noise.error_bias < 1.0)) {
        throw std::invalid_argument("error_bias must lie in (0, 1)");
    }
}

NoiseModel outdoor_noise(const NoiseModel& base) {
    NoiseModel out = base;
    out.error_rate = std::min(0.99, base.error_rate * 2.0);
    return out;
}

ScoreStream generate_trial(const TrialScript& script, const NoiseModel& noise) {
    validate_script(script);
    validate_noise(noise);

    Rng rng(noise.seed);
    ScoreStream stream;
    stream.frame_rate_hz = script.frame_rate_hz;
    auto truth = script.expand();
    stream.frames.reserve(truth.size());

    // Per frame, the draw order is fixed: one uniform for the error gate,
    // then either one wrong-label pick or five gamma variates in label order.
    for (EnvLabel lab : truth) {
        std::array<double, 5> raw{};
        if (rng.next_double() < noise.error_rate) {
            int wrong = rng.next_below(kNumEnv - 1);
            if (wrong >= label_ordinal(lab)) ++wrong;
            raw.fill((1.0 - noise.error_bias) / 4.0);
            raw[static_cast<std::size_t>(wrong)] = noise.error_bias;
        } else {
            for (int j = 0; j < kNumEnv; ++j) {
                const double alpha =
                    (j == label_ordinal(lab)) ? noise.concentration * kDirichletBase
                                              : kDirichletBase;
                raw[static_cast<std::size_t>(j)] = rng.next_gamma(alpha);
            }
        }
        stream.frames.push_back(normalize(raw));
    }
    stream.truth = std::move(truth);
    return stream;
}

std::vector<ScoreStream> generate_session(const TrialScript& script, const NoiseModel& noise,
                                          int n_trials) {
    if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    std::vector<ScoreStream> session;
    session.reserve(static_cast<std::size_t>(n_trials));
    for (int i = 0; i < n_trials; ++i) {
        NoiseModel derived = noise;
        derived.seed = noise.seed + static_cast<std::uint64_t>(i);
        session.push_back(generate_trial(script, derived));
    }
    return session;
}

}  // namespace seqfusion
