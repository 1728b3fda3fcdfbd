#pragma once

#include <span>
#include <vector>

#include "seqfusion/core.hpp"
#include "seqfusion/transition.hpp"

namespace seqfusion {

struct FusionConfig {
    int smooth_window = 5;   ///< l_w: sliding-window length of the smoother
    int vote_halfwidth = 1;  ///< l_v: voting half-window in frames
    TransitionMatrix matrix = build_matrix(TransitionRuleParams{});
};

void validate_config(const FusionConfig& cfg);  // throws std::invalid_argument

struct StepResult {
    EnvLabel decision_for_previous;  ///< committed decision about frame t-1
    ProbDist5 posterior;             ///< normalized smooth state for frame t
};

/// Online smoother over the emission stream. Seeded with at most
/// smooth_window leading emissions (which become the initial smooth states
/// verbatim); each step() then consumes the next emission and
///   (a) averages the ring buffer of smooth states,
///   (b) scores every environment by average * (transition row . emission),
///   (c) commits the argmax as the decision for the previous frame,
///   (d) propagates the committed row's transition-weighted emission,
///   (e) normalizes it into the new smooth state, which enters the buffer.
/// One step costs a handful of multiply-adds; a single smoother serves one
/// stream, and independent streams can run concurrently without sharing.
class Smoother {
  public:
    Smoother(std::span<const ProbDist5> first_frames, const FusionConfig& cfg);

    StepResult step(const ProbDist5& emission);

    int frame_index() const { return frame_index_; }
    std::optional<EnvLabel> last_decision() const { return last_opt_; }
    std::vector<ProbDist5> history() const;  ///< buffered smooth states, oldest first

  private:
    void push(const ProbDist5& d);

    TransitionMatrix matrix_;
    std::vector<ProbDist5> ring_;
    int capacity_;
    int head_ = 0;   // slot of the oldest entry once the ring is full
    int count_ = 0;
    int frame_index_ = 0;
    std::optional<EnvLabel> last_opt_;
};

/// Run the smoother over a whole stream. Seed frames get their per-frame
/// argmax as provisional decisions; each step() then decides frame t-1 upon
/// consuming frame t (the first step finalizes the last seed frame), and
/// the final frame takes the argmax of its own posterior. delay_frames = 1.
FusionTrace fuse_hmm(const ScoreStream& stream, const FusionConfig& cfg);

/// Mode filter over a label sequence with centered window of half-width
/// `halfwidth`, truncated at the boundaries. Ties keep the previous output
/// when it is among the tied labels, else take the lowest index. The caller
/// accounts the `halfwidth` frames of delay.
std::vector<EnvLabel> voting_filter(std::span<const EnvLabel> labels, int halfwidth);

/// The four compared pipelines: per-frame argmax (delay 0), argmax + voting
/// (delay l_v), smoother (delay 1), smoother + voting (delay l_v + 1).
FusionTrace fuse_pipeline(const ScoreStream& stream, MethodId method, const FusionConfig& cfg);

}  // namespace seqfusion
