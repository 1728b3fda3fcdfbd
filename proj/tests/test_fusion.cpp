#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "seqfusion/fusion.hpp"
#include "seqfusion/rng.hpp"

using namespace seqfusion;

namespace {

ProbDist5 one_hot(EnvLabel e) {
    std::array<double, 5> raw{};
    raw[static_cast<std::size_t>(label_ordinal(e))] = 1.0;
    return normalize(raw);
}

ScoreStream constant_stream(EnvLabel e, int n) {
    ScoreStream s;
    s.frames.assign(static_cast<std::size_t>(n), one_hot(e));
    return s;
}

ProbDist5 random_dist(Rng& rng) {
    std::array<double, 5> raw{};
    for (auto& v : raw) v = rng.next_gamma(1.0);
    return normalize(raw);
}

FusionConfig default_cfg() { return FusionConfig{}; }

}  // namespace

TEST_CASE("smoother seeds hold the given emissions verbatim") {
    const FusionConfig cfg = default_cfg();
    Rng rng(31);

    SUBCASE("one frame") {
        const ProbDist5 e = one_hot(EnvLabel::LevelGround);
        Smoother sm(std::span<const ProbDist5>(&e, 1), cfg);
        CHECK(sm.frame_index() == 1);
        CHECK(!sm.last_decision());
        const auto hist = sm.history();
        REQUIRE(hist.size() == 1);
        CHECK(hist[0] == e);
    }
    SUBCASE("five distinct frames in order") {
        std::vector<ProbDist5> frames;
        for (int k = 0; k < 5; ++k) frames.push_back(random_dist(rng));
        Smoother sm(frames, cfg);
        CHECK(sm.frame_index() == 5);
        CHECK(sm.history() == frames);
    }
    SUBCASE("empty or oversized seeds are rejected") {
        std::vector<ProbDist5> none;
        CHECK_THROWS_AS(Smoother(none, cfg), std::invalid_argument);
        std::vector<ProbDist5> six(6, one_hot(EnvLabel::UpStairs));
        CHECK_THROWS_AS(Smoother(six, cfg), std::invalid_argument);
    }
}

TEST_CASE("step rejects invalid emissions") {
    const FusionConfig cfg = default_cfg();
    const ProbDist5 seed = one_hot(EnvLabel::LevelGround);
    Smoother sm(std::span<const ProbDist5>(&seed, 1), cfg);
    ProbDist5 bad;
    bad.p = {0.5, 0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS(sm.step(bad), InvalidDistribution);
}

TEST_CASE("a one-hot absorbing stream stays on its label") {
    const FusionConfig cfg = default_cfg();
    const ProbDist5 lg = one_hot(EnvLabel::LevelGround);
    std::vector<ProbDist5> seeds(5, lg);
    Smoother sm(seeds, cfg);
    const StepResult r = sm.step(lg);
    CHECK(r.decision_for_previous == EnvLabel::LevelGround);
    CHECK(r.posterior[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("uniform transition matrix with window one reduces to the emission") {
    FusionConfig cfg;
    cfg.smooth_window = 1;
    cfg.matrix = TransitionMatrix::uniform();
    Rng rng(32);
    const ProbDist5 seed = random_dist(rng);
    Smoother sm(std::span<const ProbDist5>(&seed, 1), cfg);
    const ProbDist5 e = random_dist(rng);
    const StepResult r = sm.step(e);
    for (int i = 0; i < kNumEnv; ++i) {
        CHECK(std::abs(r.posterior[i] - e[i]) <= 1e-12);
    }
    CHECK(r.decision_for_previous == argmax_label(seed));
}

TEST_CASE("step matches the frozen reference posterior") {
    // seeded with five copies of a level-ground-heavy state, then one
    // ambiguous up-stairs-leaning emission
    const FusionConfig cfg = default_cfg();
    const ProbDist5 hist = normalize({0.96, 0.01, 0.01, 0.01, 0.01});
    std::vector<ProbDist5> seeds(5, hist);
    Smoother sm(seeds, cfg);
    ProbDist5 e;
    e.p = {0.30, 0.40, 0.10, 0.10, 0.10};
    const StepResult r = sm.step(e);
    CHECK(r.decision_for_previous == EnvLabel::LevelGround);
    const std::array<double, 5> expected{0.9391304347826086, 0.03478260869565216,
                                         0.00869565217391304, 0.00869565217391304,
                                         0.00869565217391304};
    for (int i = 0; i < kNumEnv; ++i) {
        CHECK(std::abs(r.posterior[i] - expected[static_cast<std::size_t>(i)]) <= 1e-15);
    }
}

TEST_CASE("a constant stream fuses to constant decisions") {
    const FusionTrace t = fuse_hmm(constant_stream(EnvLabel::LevelGround, 30), default_cfg());
    REQUIRE(t.decisions.size() == 30);
    REQUIRE(t.posteriors.size() == 30);
    CHECK(t.delay_frames == 1);
    for (EnvLabel d : t.decisions) CHECK(d == EnvLabel::LevelGround);
}

TEST_CASE("one ambiguous frame inside a steady stream is absorbed") {
    ScoreStream s = constant_stream(EnvLabel::LevelGround, 10);
    s.frames[4].p = {0.30, 0.40, 0.10, 0.10, 0.10};
    const FusionTrace t = fuse_hmm(s, default_cfg());
    REQUIRE(t.decisions.size() == 10);
    for (EnvLabel d : t.decisions) CHECK(d == EnvLabel::LevelGround);
}

TEST_CASE("streams shorter than the window fall back to per-frame argmax") {
    Rng rng(33);
    ScoreStream s;
    for (int k = 0; k < 3; ++k) s.frames.push_back(random_dist(rng));
    const FusionTrace t = fuse_hmm(s, default_cfg());
    REQUIRE(t.decisions.size() == 3);
    CHECK(t.delay_frames == 1);  // structural, reported even for short streams
    std::optional<EnvLabel> prev;
    for (std::size_t k = 0; k < 3; ++k) {
        prev = argmax_label(s.frames[k], prev);
        CHECK(t.decisions[k] == *prev);
        CHECK(t.posteriors[k] == s.frames[k]);
    }
}

TEST_CASE("voting majority wins") {
    using enum EnvLabel;
    const std::vector<EnvLabel> in{LevelGround, LevelGround, UpStairs, LevelGround, LevelGround};
    const auto out = voting_filter(in, 2);
    CHECK(out[2] == LevelGround);
}

TEST_CASE("voting ties keep the previous output") {
    using enum EnvLabel;
    const std::vector<EnvLabel> in{LevelGround, LevelGround, UpStairs, UpStairs, DownStairs};
    const auto out = voting_filter(in, 2);
    // window at index 2 holds 2x LG and 2x US plus 1x DS: tie between LG/US,
    // the previous output is LG
    CHECK(out[1] == LevelGround);
    CHECK(out[2] == LevelGround);
}

TEST_CASE("voting with half-width zero is the identity") {
    using enum EnvLabel;
    const std::vector<EnvLabel> in{UpRamp, DownRamp, LevelGround, UpStairs, DownStairs};
    CHECK(voting_filter(in, 0) == in);
}

TEST_CASE("voting over identical labels is the identity for any half-width") {
    const std::vector<EnvLabel> in(17, EnvLabel::DownRamp);
    for (int hw : {0, 1, 2, 5, 40}) CHECK(voting_filter(in, hw) == in);
}

TEST_CASE("pipelines report their structural delays") {
    const ScoreStream s = constant_stream(EnvLabel::UpRamp, 25);
    FusionConfig cfg = default_cfg();
    cfg.vote_halfwidth = 1;  // voting window of three frames

    const FusionTrace c = fuse_pipeline(s, MethodId::Cnn, cfg);
    const FusionTrace cv = fuse_pipeline(s, MethodId::CnnVoting, cfg);
    const FusionTrace h = fuse_pipeline(s, MethodId::Hmm, cfg);
    const FusionTrace hv = fuse_pipeline(s, MethodId::HmmVoting, cfg);

    CHECK(c.delay_frames == 0);
    CHECK(cv.delay_frames == 1);
    CHECK(h.delay_frames == 1);
    CHECK(hv.delay_frames == 2);

    for (const FusionTrace* t : {&c, &cv, &h, &hv}) {
        CHECK(t->decisions.size() == s.frames.size());
        CHECK(t->posteriors.size() == s.frames.size());
        for (EnvLabel d : t->decisions) CHECK(d == EnvLabel::UpRamp);
    }
}

TEST_CASE("fusion output matches the straight-line reference bitwise") {
    Rng rng(34);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + rng.next_below(50);
        const int lw = 1 + rng.next_below(8);

        ScoreStream s;
        std::vector<testref::Dist> raw;
        for (int k = 0; k < n; ++k) {
            const ProbDist5 d = random_dist(rng);
            s.frames.push_back(d);
            raw.push_back(d.p);
        }
        TransitionRuleParams p;
        p.p_stay = 0.5 + rng.next_double() * 0.49;
        p.p_even = (1.0 - p.p_stay) / 4.0 * (0.05 + rng.next_double() * 0.9);
        p.p_odd = p.p_even * (0.05 + rng.next_double() * 0.9);

        FusionConfig cfg;
        cfg.smooth_window = lw;
        cfg.matrix = build_matrix(p);

        const FusionTrace mine = fuse_hmm(s, cfg);
        const testref::RefTrace ref = testref::ref_fuse(raw, cfg.matrix.t, lw);

        REQUIRE(mine.decisions.size() == ref.decisions.size());
        for (std::size_t k = 0; k < ref.decisions.size(); ++k) {
            CHECK(label_ordinal(mine.decisions[k]) == ref.decisions[k]);
        }
        for (std::size_t k = 0; k < ref.posteriors.size(); ++k) {
            CHECK(mine.posteriors[k].p == ref.posteriors[k]);  // bitwise
        }
    }
}

TEST_CASE("posterior true-label mass is monotone on a constant one-hot stream") {
    const FusionConfig cfg = default_cfg();
    const ScoreStream s = constant_stream(EnvLabel::DownStairs, 40);
    const FusionTrace t = fuse_hmm(s, cfg);
    const int ord = label_ordinal(EnvLabel::DownStairs);
    double prev = 0.0;
    bool converged = false;
    for (const auto& post : t.posteriors) {
        if (!converged) {
            CHECK(post[ord] >= prev - 1e-15);
        }
        if (std::abs(post[ord] - prev) <= 1e-9) converged = true;
        prev = post[ord];
    }
}

TEST_CASE("identical inputs produce identical traces") {
    Rng rng(35);
    ScoreStream s;
    for (int k = 0; k < 30; ++k) s.frames.push_back(random_dist(rng));
    const FusionConfig cfg = default_cfg();
    const FusionTrace a = fuse_pipeline(s, MethodId::HmmVoting, cfg);
    const FusionTrace b = fuse_pipeline(s, MethodId::HmmVoting, cfg);
    CHECK(a.decisions == b.decisions);
    for (std::size_t k = 0; k < a.posteriors.size(); ++k) {
        CHECK(a.posteriors[k] == b.posteriors[k]);
    }
}

TEST_CASE("every posterior in a trace is a valid distribution") {
    Rng rng(36);
    for (int trial = 0; trial < 20; ++trial) {
        ScoreStream s;
        const int n = 5 + rng.next_below(60);
        for (int k = 0; k < n; ++k) s.frames.push_back(random_dist(rng));
        for (MethodId m : {MethodId::Cnn, MethodId::CnnVoting, MethodId::Hmm, MethodId::HmmVoting}) {
            const FusionTrace t = fuse_pipeline(s, m, default_cfg());
            for (const auto& post : t.posteriors) {
                CHECK(std::abs(post.sum() - 1.0) <= 1e-9);
                CHECK(post.min_component() >= kProbFloor);
            }
        }
    }
}

TEST_CASE("invalid configurations are rejected") {
    const ScoreStream s = constant_stream(EnvLabel::LevelGround, 5);
    FusionConfig cfg = default_cfg();
    cfg.smooth_window = 0;
    CHECK_THROWS_AS(fuse_hmm(s, cfg), std::invalid_argument);
    cfg.smooth_window = 5;
    cfg.vote_halfwidth = -1;
    CHECK_THROWS_AS(fuse_pipeline(s, MethodId::CnnVoting, cfg), std::invalid_argument);
    CHECK_THROWS_AS(fuse_hmm(ScoreStream{}, default_cfg()), std::invalid_argument);
}
