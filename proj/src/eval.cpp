#include "seqfusion/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "seqfusion/rng.hpp"

namespace seqfusion {

double accuracy_with_delay(const FusionTrace& trace, std::span<const EnvLabel> truth) {
    if (trace.decisions.size() != truth.size()) {
        throw std::invalid_argument("decision and truth sequences differ in length");
    }
    if (truth.empty()) throw std::invalid_argument("empty truth sequence");
    std::size_t hits = 0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        if (trace.decisions[k] == truth[k]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

AccuracyReport summarize(std::vector<double> per_trial, double frame_rate_hz, int delay_frames,
                         MethodId method) {
    if (per_trial.empty()) throw std::invalid_argument("no per-trial accuracies");
    if (!(frame_rate_hz > 0.0)) throw std::invalid_argument("frame rate must be > 0");

    AccuracyReport rep;
    rep.method = method;
    rep.delay_frames = delay_frames;
    rep.delay_ms = delay_frames * 1000.0 / frame_rate_hz;

    const auto n = static_cast<double>(per_trial.size());
    double sum = 0.0;
    for (double v : per_trial) sum += v;
    rep.mean = sum / n;
    if (per_trial.size() >= 2) {
        double ss = 0.0;
        for (double v : per_trial) ss += (v - rep.mean) * (v - rep.mean);
        rep.sd = std::sqrt(ss / (n - 1.0));
    }
    rep.per_trial_accuracy = std::move(per_trial);
    return rep;
}

namespace {

// Continued-fraction core of the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_var(std::span<const double> v, double mean) {
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / (static_cast<double>(v.size()) - 1.0);
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("beta parameters must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

TTestResult welch_ttest(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw std::invalid_argument("welch_ttest needs at least two samples per side");
    }
    for (double v : a) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample");
    }
    for (double v : b) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample");
    }

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    const double va = sample_var(a, ma);
    const double vb = sample_var(b, mb);

    const double diff = ma - mb;
    const double se2 = va / na + vb / nb;
    if (se2 <= 0.0) {
        // both samples constant: the statistic degenerates
        if (diff == 0.0) return {0.0, 1.0};
        return {diff > 0.0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity(),
                0.0};
    }

    const double t = diff / std::sqrt(se2);
    const double df = se2 * se2 /
                      ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
    const double p = reg_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    return {t, p};
}

DelaySweep delay_sweep(std::span<const ScoreStream> session, const FusionConfig& cfg,
                       std::span<const MethodId> methods, std::span<const int> voting_windows) {
    validate_config(cfg);
    if (session.empty()) throw std::invalid_argument("empty session");
    for (const auto& stream : session) {
        if (!stream.truth) {
            throw std::invalid_argument("delay sweep needs ground-truth labels on every trial");
        }
    }
    for (int w : voting_windows) {
        if (w < 1 || w % 2 == 0) {
            throw std::invalid_argument("voting windows must be odd and >= 1");
        }
    }

    DelaySweep sweep;
    for (MethodId method : methods) {
        DelaySweep::MethodCurve curve;
        curve.method = method;

        const bool voted = method == MethodId::CnnVoting || method == MethodId::HmmVoting;
        std::vector<int> halfwidths;
        if (voted) {
            for (int w : voting_windows) halfwidths.push_back((w - 1) / 2);
        } else {
            halfwidths.push_back(0);
        }

        for (int hw : halfwidths) {
            FusionConfig run_cfg = cfg;
            run_cfg.vote_halfwidth = hw;
            std::vector<double> accs;
            accs.reserve(session.size());
            int delay = 0;
            for (const auto& stream : session) {
                const FusionTrace trace = fuse_pipeline(stream, method, run_cfg);
                delay = trace.delay_frames;
                accs.push_back(accuracy_with_delay(trace, *stream.truth));
            }
            const AccuracyReport rep =
                summarize(std::move(accs), session[0].frame_rate_hz, delay, method);
            curve.points.push_back({delay, rep.mean, rep.sd});
        }
        std::sort(curve.points.begin(), curve.points.end(),
                  [](const auto& l, const auto& r) { return l.delay_frames < r.delay_frames; });

        if (curve.points.size() >= 2) {
            double sx = 0.0, sy = 0.0;
            for (const auto& pt : curve.points) {
                sx += pt.delay_frames;
                sy += pt.mean_accuracy;
            }
            const auto n = static_cast<double>(curve.points.size());
            const double mx = sx / n;
            const double my = sy / n;
            double sxx = 0.0, sxy = 0.0;
            for (const auto& pt : curve.points) {
                sxx += (pt.delay_frames - mx) * (pt.delay_frames - mx);
                sxy += (pt.delay_frames - mx) * (pt.mean_accuracy - my);
            }
            if (sxx > 0.0) curve.slope_pct_per_frame = 100.0 * sxy / sxx;
        }
        sweep.methods.push_back(std::move(curve));
    }
    return sweep;
}

namespace {
volatile double g_timing_sink = 0.0;
}

TimingResult timing_bench(int n_steps, const FusionConfig& cfg, std::uint64_t seed) {
    validate_config(cfg);
    if (n_steps < 10000) throw std::invalid_argument("timing bench needs n_steps >= 10000");

    Rng rng(seed);
    const int total = n_steps + cfg.smooth_window;
    std::vector<ProbDist5> frames;
    frames.reserve(static_cast<std::size_t>(total));
    for (int k = 0; k < total; ++k) {
        std::array<double, 5> raw{};
        for (auto& v : raw) v = rng.next_gamma(1.0);
        frames.push_back(normalize(raw));
    }

    Smoother smoother(std::span<const ProbDist5>(frames).first(static_cast<std::size_t>(cfg.smooth_window)), cfg);
    std::vector<double> secs(static_cast<std::size_t>(n_steps));
    using clock = std::chrono::steady_clock;
    for (int k = 0; k < n_steps; ++k) {
        const auto t0 = clock::now();
        const StepResult r = smoother.step(frames[static_cast<std::size_t>(cfg.smooth_window + k)]);
        const auto t1 = clock::now();
        g_timing_sink = g_timing_sink + r.posterior[0];
        secs[static_cast<std::size_t>(k)] =
            std::chrono::duration_cast<std::chrono::duration<double>>(t1 - t0).count();
    }
    std::sort(secs.begin(), secs.end());
    TimingResult res;
    res.median_step_seconds = secs[secs.size() / 2];
    res.p99_step_seconds = secs[static_cast<std::size_t>(0.99 * (secs.size() - 1))];
    return res;
}

}  // namespace seqfusion
