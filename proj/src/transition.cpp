#include "seqfusion/transition.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace seqfusion {

namespace {

constexpr double kRowSumTol = 1e-12;
// Equality of entries that the rules force to coincide is checked with a
// small relative slack so that matrices rebuilt from text survive.
constexpr double kEqualTol = 1e-12;

bool nearly_equal(double a, double b) {
    return std::abs(a - b) <= kEqualTol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

void validate_params(const TransitionRuleParams& p) {
    std::vector<std::string> problems;
    if (!(std::isfinite(p.p_stay) && std::isfinite(p.p_even) && std::isfinite(p.p_odd))) {
        throw InvalidParameters("transition parameters must be finite");
    }
    if (!(p.p_odd > 0.0)) problems.push_back("p_odd must be > 0");
    if (!(p.p_even > p.p_odd)) problems.push_back("p_even must exceed p_odd");
    if (!(p.p_stay > p.p_even)) problems.push_back("p_stay must exceed p_even");
    if (!(p.to_lg() > 0.0)) problems.push_back("p_stay + p_even + 2*p_odd must stay below 1");
    if (!(p.lg_exit() > p.p_even)) {
        problems.push_back("(1 - p_stay)/4 must exceed p_even");
    }
    if (!(p.p_stay > p.lg_exit()) || !(p.p_stay > p.to_lg())) {
        problems.push_back("p_stay must exceed the derived off-diagonal entries");
    }
    if (!problems.empty()) {
        std::string msg = "invalid transition parameters:";
        for (const auto& s : problems) msg += " " + s + ";";
        throw InvalidParameters(msg);
    }
}

TransitionMatrix TransitionMatrix::uniform() {
    TransitionMatrix m;
    for (auto& row : m.t) row.fill(0.2);
    return m;
}

TransitionMatrix build_matrix(const TransitionRuleParams& params) {
    validate_params(params);
    TransitionMatrix m;
    const double lg_exit = params.lg_exit();
    const double to_lg = params.to_lg();
    for (int i = 0; i < kNumEnv; ++i) {
        for (int j = 0; j < kNumEnv; ++j) {
            double v;
            if (i == j) {
                v = params.p_stay;
            } else if (i == 0) {
                v = lg_exit;
            } else if (j == 0) {
                v = to_lg;
            } else if ((i - j) % 2 == 0) {
                v = params.p_even;
            } else {
                v = params.p_odd;
            }
            m.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
        }
    }
    return m;
}

std::string_view rule_name(TransitionRule rule) {
    switch (rule) {
        case TransitionRule::RowStochastic: return "row-stochastic";
        case TransitionRule::PositiveEntries: return "positive-entries";
        case TransitionRule::DiagonalEqual: return "diagonal-equal";
        case TransitionRule::DiagonalMaximal: return "diagonal-maximal";
        case TransitionRule::LevelRowUniform: return "level-row-uniform";
        case TransitionRule::LevelColumnUniform: return "level-column-uniform";
        case TransitionRule::EvenGapUniform: return "even-gap-uniform";
        case TransitionRule::OddGapUniform: return "odd-gap-uniform";
        case TransitionRule::OddGapMinimal: return "odd-gap-minimal";
    }
    return "?";
}

std::vector<RuleViolation> validate_rules(const TransitionMatrix& m) {
    std::vector<RuleViolation> out;
    const auto entry = [&](int i, int j) { return m(i, j); };
    const auto flag = [&](TransitionRule r, std::string detail) {
        out.push_back({r, std::move(detail)});
    };

    int bad_row = -1;
    for (int i = 0; i < kNumEnv; ++i) {
        double s = 0.0;
        for (int j = 0; j < kNumEnv; ++j) s += entry(i, j);
        if (std::abs(s - 1.0) > kRowSumTol && bad_row < 0) bad_row = i;
    }
    if (bad_row >= 0) {
        flag(TransitionRule::RowStochastic,
             "row " + std::to_string(bad_row + 1) + " does not sum to 1");
    }

    int bad_i = -1, bad_j = -1;
    for (int i = 0; i < kNumEnv; ++i) {
        for (int j = 0; j < kNumEnv; ++j) {
            if (!(entry(i, j) > 0.0) && bad_i < 0) {
                bad_i = i;
                bad_j = j;
            }
        }
    }
    if (bad_i >= 0) {
        flag(TransitionRule::PositiveEntries,
             "entry (" + std::to_string(bad_i + 1) + "," + std::to_string(bad_j + 1) +
                 ") is not strictly positive");
    }

    bool diag_equal = true;
    for (int i = 1; i < kNumEnv; ++i) {
        if (!nearly_equal(entry(i, i), entry(0, 0))) diag_equal = false;
    }
    if (!diag_equal) flag(TransitionRule::DiagonalEqual, "diagonal entries differ");

    bool diag_max = true;
    for (int i = 0; i < kNumEnv; ++i) {
        for (int j = 0; j < kNumEnv; ++j) {
            if (i != j && !(entry(i, i) > entry(i, j))) diag_max = false;
        }
    }
    if (!diag_max) {
        flag(TransitionRule::DiagonalMaximal,
             "a diagonal entry does not strictly dominate its row");
    }

    bool lg_row = true;
    for (int j = 2; j < kNumEnv; ++j) {
        if (!nearly_equal(entry(0, j), entry(0, 1))) lg_row = false;
    }
    if (!lg_row) flag(TransitionRule::LevelRowUniform, "row 1 off-diagonal entries differ");

    bool lg_col = true;
    for (int i = 2; i < kNumEnv; ++i) {
        if (!nearly_equal(entry(i, 0), entry(1, 0))) lg_col = false;
    }
    if (!lg_col) flag(TransitionRule::LevelColumnUniform, "column 1 entries (rows 2..5) differ");

    // Reference even/odd-gap entries: (2,4) has gap 2, (2,3) has gap 1.
    const double even_ref = entry(1, 3);
    const double odd_ref = entry(1, 2);
    bool even_uniform = true;
    bool odd_uniform = true;
    for (int i = 1; i < kNumEnv; ++i) {
        for (int j = 1; j < kNumEnv; ++j) {
            if (i == j) continue;
            if ((i - j) % 2 == 0) {
                if (!nearly_equal(entry(i, j), even_ref)) even_uniform = false;
            } else {
                if (!nearly_equal(entry(i, j), odd_ref)) odd_uniform = false;
            }
        }
    }
    if (!even_uniform) flag(TransitionRule::EvenGapUniform, "even-gap entries differ");
    if (!odd_uniform) flag(TransitionRule::OddGapUniform, "odd-gap entries differ");

    bool odd_minimal = true;
    for (int i = 0; i < kNumEnv; ++i) {
        for (int j = 0; j < kNumEnv; ++j) {
            const bool is_odd_gap = i != j && i >= 1 && j >= 1 && (i - j) % 2 != 0;
            if (!is_odd_gap && !(odd_ref < entry(i, j))) odd_minimal = false;
        }
    }
    if (!odd_minimal) {
        flag(TransitionRule::OddGapMinimal, "odd-gap entries are not strictly smallest");
    }

    return out;
}

std::string matrix_to_text(const TransitionMatrix& m) {
    std::string out;
    char buf[64];
    for (int i = 0; i < kNumEnv; ++i) {
        for (int j = 0; j < kNumEnv; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out += buf;
            out += (j + 1 < kNumEnv) ? ' ' : '\n';
        }
    }
    return out;
}

TransitionMatrix matrix_from_text(const std::string& text) {
    std::istringstream in(text);
    TransitionMatrix m;
    for (int i = 0; i < kNumEnv; ++i) {
        for (int j = 0; j < kNumEnv; ++j) {
            double v;
            if (!(in >> v)) {
                throw ParseError("transition matrix text needs 25 numbers (stopped at row " +
                                 std::to_string(i + 1) + ", column " + std::to_string(j + 1) +
                                 ")");
            }
            if (!std::isfinite(v)) {
                throw ParseError("transition matrix entry is not finite");
            }
            m.t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
        }
    }
    double extra;
    if (in >> extra) throw ParseError("transition matrix text has trailing numbers");
    return m;
}

}  // namespace seqfusion
