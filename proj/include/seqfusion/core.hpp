#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seqfusion {

inline constexpr int kNumEnv = 5;

/// Floor for distribution components. normalize() clamps to this value and
/// guarantees no component ever falls below it afterwards.
inline constexpr double kProbFloor = 1e-9;

/// The five locomotion environments. The 1..5 numbering is fixed and
/// identical everywhere: serialization, transition matrices, score streams.
enum class EnvLabel : int {
    LevelGround = 1,
    UpStairs = 2,
    DownStairs = 3,
    UpRamp = 4,
    DownRamp = 5,
};

/// 1-based index, as used in all human-facing I/O.
constexpr int label_index(EnvLabel e) { return static_cast<int>(e); }

/// 0-based ordinal for array access.
constexpr int label_ordinal(EnvLabel e) { return static_cast<int>(e) - 1; }

EnvLabel label_from_index(int index_1based);  // throws std::out_of_range
EnvLabel label_from_ordinal(int ordinal);     // throws std::out_of_range

/// Two-letter code: LG, US, DS, UR, DR.
std::string_view label_code(EnvLabel e);

/// Accepts a two-letter code (any case) or a 1..5 digit.
std::optional<EnvLabel> parse_label(std::string_view text);

struct InvalidDistribution : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A point on the 5-category probability simplex: the universal currency of
/// the pipeline (emissions, smooth states, posteriors). Instances produced
/// by normalize() sum to 1 within 1e-9 with every component >= kProbFloor.
struct ProbDist5 {
    std::array<double, 5> p{0.2, 0.2, 0.2, 0.2, 0.2};

    double operator[](int i) const { return p[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return p[static_cast<std::size_t>(i)]; }

    double sum() const;
    double min_component() const;

    bool operator==(const ProbDist5&) const = default;
};

/// Scale a non-negative raw score vector onto the simplex. Components that
/// would land below kProbFloor are pinned at the floor and the remaining
/// mass is carried by the free components, so the floor survives rescaling.
/// Throws InvalidDistribution for all-zero, negative or non-finite input.
ProbDist5 normalize(const std::array<double, 5>& raw);

/// 0-based index of the strictly greatest component. Ties return `previous`
/// when it is among the tied indices, otherwise the lowest tied index.
int argmax_index(const std::array<double, 5>& v,
                 std::optional<int> previous = std::nullopt);

EnvLabel argmax_label(const ProbDist5& d,
                      std::optional<EnvLabel> previous = std::nullopt);

/// Time-ordered emission distributions, one per camera frame, with optional
/// ground-truth labels of equal length.
struct ScoreStream {
    std::vector<ProbDist5> frames;
    std::optional<std::vector<EnvLabel>> truth;
    double frame_rate_hz = 15.0;
};

enum class MethodId { Cnn, CnnVoting, Hmm, HmmVoting };

/// Canonical names: cnn, cnn-voting, hmm, hmm-voting.
std::string_view method_name(MethodId m);
std::optional<MethodId> parse_method(std::string_view name);

/// Per-frame fused decisions and posterior distributions. delay_frames is
/// the method's structural delay: the number of later frames that must
/// arrive before the decision about a given frame is final.
struct FusionTrace {
    std::vector<EnvLabel> decisions;
    std::vector<ProbDist5> posteriors;
    int delay_frames = 0;
    MethodId method = MethodId::Cnn;
};

}  // namespace seqfusion
