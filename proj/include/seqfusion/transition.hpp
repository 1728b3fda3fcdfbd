#pragma once

#include <array>
#include <string>
#include <vector>

#include "seqfusion/core.hpp"

namespace seqfusion {

struct InvalidParameters : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Free parameters of the rule-based mode-switch prior. The remaining
/// entries of the matrix are forced: level-ground exits share (1-p_stay)/4
/// and the return-to-level-ground probability is the row residual.
struct TransitionRuleParams {
    double p_stay = 0.9;   ///< remain in the same environment
    double p_even = 0.01;  ///< hop between non-LG environments, even index gap
    double p_odd = 0.005;  ///< hop between non-LG environments, odd index gap

    double lg_exit() const { return (1.0 - p_stay) / 4.0; }
    double to_lg() const { return 1.0 - p_stay - p_even - 2.0 * p_odd; }
};

/// Required orderings:
///   p_stay > p_even > p_odd > 0
///   to_lg() > 0
///   lg_exit() > p_even          (switches route through level ground)
///   p_stay > lg_exit(), to_lg() (the diagonal stays the row maximum)
/// Throws InvalidParameters listing every violated condition.
void validate_params(const TransitionRuleParams& params);

/// Row-stochastic 5x5 prior over mode switches; t[i][j] is the probability
/// of transiting from environment i+1 to environment j+1.
struct TransitionMatrix {
    std::array<std::array<double, 5>, 5> t{};

    double operator()(int from, int to) const {
        return t[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
    }

    static TransitionMatrix uniform();  // all entries 0.2

    bool operator==(const TransitionMatrix&) const = default;
};

/// Assemble the matrix from the rule parameters. Rows sum to 1 exactly by
/// construction (the to-LG entry is the residual).
TransitionMatrix build_matrix(const TransitionRuleParams& params);

enum class TransitionRule {
    RowStochastic,
    PositiveEntries,
    DiagonalEqual,
    DiagonalMaximal,
    LevelRowUniform,
    LevelColumnUniform,
    EvenGapUniform,
    OddGapUniform,
    OddGapMinimal,
};

std::string_view rule_name(TransitionRule rule);

struct RuleViolation {
    TransitionRule rule;
    std::string detail;
};

/// Check an arbitrary matrix against the design rules. Violations are data,
/// not errors; an empty list means the matrix is rule-conforming.
std::vector<RuleViolation> validate_rules(const TransitionMatrix& m);

/// Text form: 5 lines of 5 space-separated decimals, 17 significant digits
/// (enough to round-trip doubles exactly).
std::string matrix_to_text(const TransitionMatrix& m);
TransitionMatrix matrix_from_text(const std::string& text);  // throws ParseError

}  // namespace seqfusion
