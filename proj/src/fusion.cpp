#include "seqfusion/fusion.hpp"

#include <cmath>
#include <stdexcept>

namespace seqfusion {

namespace {

void require_valid_emission(const ProbDist5& e) {
    double s = 0.0;
    for (double v : e.p) {
        if (!std::isfinite(v) || v < kProbFloor) {
            throw InvalidDistribution("emission component outside the simplex floor");
        }
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) {
        throw InvalidDistribution("emission does not sum to 1");
    }
}

std::vector<EnvLabel> argmax_decisions(const std::vector<ProbDist5>& frames) {
    std::vector<EnvLabel> out;
    out.reserve(frames.size());
    std::optional<EnvLabel> prev;
    for (const auto& f : frames) {
        prev = argmax_label(f, prev);
        out.push_back(*prev);
    }
    return out;
}

}  // namespace

void validate_config(const FusionConfig& cfg) {
    if (cfg.smooth_window < 1) throw std::invalid_argument("smooth_window must be >= 1");
    if (cfg.vote_halfwidth < 0) throw std::invalid_argument("vote_halfwidth must be >= 0");
}

Smoother::Smoother(std::span<const ProbDist5> first_frames, const FusionConfig& cfg)
    : matrix_(cfg.matrix), capacity_(cfg.smooth_window) {
    validate_config(cfg);
    if (first_frames.empty()) {
        throw std::invalid_argument("smoother needs at least one seed frame");
    }
    if (static_cast<int>(first_frames.size()) > capacity_) {
        throw std::invalid_argument("smoother seeded with more frames than the window holds");
    }
    ring_.resize(static_cast<std::size_t>(capacity_));
    for (const auto& f : first_frames) {
        require_valid_emission(f);
        push(f);
        ++frame_index_;
    }
}

void Smoother::push(const ProbDist5& d) {
    if (count_ < capacity_) {
        ring_[static_cast<std::size_t>(count_)] = d;
        ++count_;
    } else {
        ring_[static_cast<std::size_t>(head_)] = d;
        head_ = (head_ + 1) % capacity_;
    }
}

std::vector<ProbDist5> Smoother::history() const {
    std::vector<ProbDist5> out;
    out.reserve(static_cast<std::size_t>(count_));
    for (int k = 0; k < count_; ++k) {
        out.push_back(ring_[static_cast<std::size_t>((head_ + k) % capacity_)]);
    }
    return out;
}

StepResult Smoother::step(const ProbDist5& emission) {
    require_valid_emission(emission);

    // (a) buffer average, oldest to newest
    std::array<double, 5> mean{};
    for (int i = 0; i < kNumEnv; ++i) {
        double s = 0.0;
        for (int k = 0; k < count_; ++k) {
            s += ring_[static_cast<std::size_t>((head_ + k) % capacity_)][i];
        }
        mean[static_cast<std::size_t>(i)] = s / count_;
    }

    // (b) score of having been in i, given the incoming emission
    std::array<double, 5> scored{};
    for (int i = 0; i < kNumEnv; ++i) {
        double dot = 0.0;
        for (int j = 0; j < kNumEnv; ++j) {
            dot += matrix_(i, j) * emission[j];
        }
        scored[static_cast<std::size_t>(i)] = mean[static_cast<std::size_t>(i)] * dot;
    }

    // (c) commit the previous frame's decision
    std::optional<int> prev;
    if (last_opt_) prev = label_ordinal(*last_opt_);
    const int opt = argmax_index(scored, prev);

    // (d) propagate along the committed row, (e) renormalize
    std::array<double, 5> raw{};
    for (int j = 0; j < kNumEnv; ++j) {
        raw[static_cast<std::size_t>(j)] =
            mean[static_cast<std::size_t>(opt)] * matrix_(opt, j) * emission[j];
    }
    const ProbDist5 posterior = normalize(raw);

    push(posterior);
    ++frame_index_;
    last_opt_ = label_from_ordinal(opt);
    return StepResult{*last_opt_, posterior};
}

FusionTrace fuse_hmm(const ScoreStream& stream, const FusionConfig& cfg) {
    validate_config(cfg);
    if (stream.frames.empty()) throw std::invalid_argument("empty score stream");

    const int n = static_cast<int>(stream.frames.size());
    const int warm = std::min(n, cfg.smooth_window);

    FusionTrace trace;
    trace.method = MethodId::Hmm;
    trace.delay_frames = 1;
    trace.decisions.reserve(static_cast<std::size_t>(n));
    trace.posteriors.reserve(static_cast<std::size_t>(n));

    std::optional<EnvLabel> prev;
    for (int k = 0; k < warm; ++k) {
        trace.posteriors.push_back(stream.frames[static_cast<std::size_t>(k)]);
        prev = argmax_label(stream.frames[static_cast<std::size_t>(k)], prev);
        trace.decisions.push_back(*prev);
    }
    if (n == warm) return trace;

    Smoother smoother(std::span<const ProbDist5>(stream.frames).first(static_cast<std::size_t>(warm)), cfg);
    for (int t = warm; t < n; ++t) {
        const StepResult r = smoother.step(stream.frames[static_cast<std::size_t>(t)]);
        // Each step decides frame t-1. The first step's decision lands on
        // the last seed frame and replaces its provisional argmax, which is
        // how a noisy frame at the seed boundary gets absorbed.
        if (t == warm) {
            trace.decisions.back() = r.decision_for_previous;
        } else {
            trace.decisions.push_back(r.decision_for_previous);
        }
        trace.posteriors.push_back(r.posterior);
    }
    trace.decisions.push_back(argmax_label(trace.posteriors.back(), smoother.last_decision()));
    return trace;
}

std::vector<EnvLabel> voting_filter(std::span<const EnvLabel> labels, int halfwidth) {
    if (labels.empty()) throw std::invalid_argument("empty label sequence");
    if (halfwidth < 0) throw std::invalid_argument("vote half-width must be >= 0");

    const int n = static_cast<int>(labels.size());
    std::vector<EnvLabel> out;
    out.reserve(labels.size());
    for (int t = 0; t < n; ++t) {
        const int lo = std::max(0, t - halfwidth);
        const int hi = std::min(n - 1, t + halfwidth);
        std::array<double, 5> counts{};
        for (int k = lo; k <= hi; ++k) {
            counts[static_cast<std::size_t>(label_ordinal(labels[static_cast<std::size_t>(k)]))] +=
                1.0;
        }
        std::optional<int> prev;
        if (t > 0) prev = label_ordinal(out.back());
        out.push_back(label_from_ordinal(argmax_index(counts, prev)));
    }
    return out;
}

FusionTrace fuse_pipeline(const ScoreStream& stream, MethodId method, const FusionConfig& cfg) {
    validate_config(cfg);
    if (stream.frames.empty()) throw std::invalid_argument("empty score stream");

    switch (method) {
        case MethodId::Cnn: {
            FusionTrace trace;
            trace.method = MethodId::Cnn;
            trace.delay_frames = 0;
            trace.posteriors = stream.frames;
            trace.decisions = argmax_decisions(stream.frames);
            return trace;
        }
        case MethodId::CnnVoting: {
            FusionTrace trace;
            trace.method = MethodId::CnnVoting;
            trace.delay_frames = cfg.vote_halfwidth;
            trace.posteriors = stream.frames;
            trace.decisions = voting_filter(argmax_decisions(stream.frames), cfg.vote_halfwidth);
            return trace;
        }
        case MethodId::Hmm:
            return fuse_hmm(stream, cfg);
        case MethodId::HmmVoting: {
            FusionTrace trace = fuse_hmm(stream, cfg);
            trace.method = MethodId::HmmVoting;
            trace.delay_frames = cfg.vote_halfwidth + 1;
            trace.decisions = voting_filter(trace.decisions, cfg.vote_halfwidth);
            return trace;
        }
    }
    throw std::invalid_argument("unknown fusion method");
}

}  // namespace seqfusion
