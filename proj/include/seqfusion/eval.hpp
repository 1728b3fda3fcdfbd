#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seqfusion/core.hpp"
#include "seqfusion/fusion.hpp"

namespace seqfusion {

struct AccuracyReport {
    std::vector<double> per_trial_accuracy;
    double mean = 0.0;
    double sd = 0.0;  ///< sample standard deviation (n-1 denominator)
    MethodId method = MethodId::Cnn;
    int delay_frames = 0;
    double delay_ms = 0.0;
};

/// Fraction of frames whose decision matches the truth label at the same
/// frame. Availability of each decision is delayed by trace.delay_frames,
/// but scoring is frame-aligned; latency is reported separately.
double accuracy_with_delay(const FusionTrace& trace, std::span<const EnvLabel> truth);

AccuracyReport summarize(std::vector<double> per_trial, double frame_rate_hz, int delay_frames,
                         MethodId method);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;  ///< two-sided
};

/// Welch's unequal-variance two-sample t-test with Welch-Satterthwaite
/// degrees of freedom; the p-value comes from the regularized incomplete
/// beta form of the t distribution. Needs >= 2 samples per side.
TTestResult welch_ttest(std::span<const double> a, std::span<const double> b);

/// Regularized incomplete beta function I_x(a, b); exposed because the
/// t-test's tail probability reduces to it and tests pin it directly.
double reg_incomplete_beta(double a, double b, double x);

struct DelaySweep {
    struct Point {
        int delay_frames = 0;
        double mean_accuracy = 0.0;
        double sd = 0.0;
    };
    struct MethodCurve {
        MethodId method = MethodId::Cnn;
        std::vector<Point> points;  ///< sorted by delay_frames
        /// least-squares slope of mean accuracy vs delay, in percentage
        /// points per frame; absent for single-point curves
        std::optional<double> slope_pct_per_frame;
    };
    std::vector<MethodCurve> methods;
};

/// Accuracy-vs-delay trade-off over a session. Voting windows w must be odd;
/// the voting half-width is (w-1)/2, so the plotted delays are (w-1)/2 for
/// argmax+voting and (w+1)/2 for smoother+voting (one extra frame from the
/// smoother). Plain argmax sits at delay 0 and the smoother alone at 1.
DelaySweep delay_sweep(std::span<const ScoreStream> session, const FusionConfig& cfg,
                       std::span<const MethodId> methods, std::span<const int> voting_windows);

struct TimingResult {
    double median_step_seconds = 0.0;
    double p99_step_seconds = 0.0;
};

/// Wall-clock latency of a single smoother step over a pre-generated random
/// stream (generation excluded from timing). Needs n_steps >= 10000.
TimingResult timing_bench(int n_steps, const FusionConfig& cfg, std::uint64_t seed);

}  // namespace seqfusion
