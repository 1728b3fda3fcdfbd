#include "seqfusion/core.hpp"

#include <algorithm>
#include <cmath>

namespace seqfusion {

EnvLabel label_from_index(int index_1based) {
    if (index_1based < 1 || index_1based > kNumEnv) {
        throw std::out_of_range("environment index out of range 1..5: " +
                                std::to_string(index_1based));
    }
    return static_cast<EnvLabel>(index_1based);
}

EnvLabel label_from_ordinal(int ordinal) { return label_from_index(ordinal + 1); }

std::string_view label_code(EnvLabel e) {
    switch (e) {
        case EnvLabel::LevelGround: return "LG";
        case EnvLabel::UpStairs: return "US";
        case EnvLabel::DownStairs: return "DS";
        case EnvLabel::UpRamp: return "UR";
        case EnvLabel::DownRamp: return "DR";
    }
    return "??";
}

std::optional<EnvLabel> parse_label(std::string_view text) {
    if (text.size() == 1 && text[0] >= '1' && text[0] <= '5') {
        return static_cast<EnvLabel>(text[0] - '0');
    }
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (int i = 1; i <= kNumEnv; ++i) {
        const auto e = static_cast<EnvLabel>(i);
        if (upper == label_code(e)) return e;
    }
    return std::nullopt;
}

double ProbDist5::sum() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
}

double ProbDist5::min_component() const { return *std::min_element(p.begin(), p.end()); }

ProbDist5 normalize(const std::array<double, 5>& raw) {
    double total = 0.0;
    for (double v : raw) {
        if (!std::isfinite(v)) throw InvalidDistribution("non-finite score component");
        if (v < 0.0) throw InvalidDistribution("negative score component");
        total += v;
    }
    if (total <= 0.0) throw InvalidDistribution("all-zero score vector");

    ProbDist5 d;
    for (int i = 0; i < kNumEnv; ++i) d[i] = raw[static_cast<std::size_t>(i)] / total;

    // Pin sub-floor components at the floor, carry the deficit on the free
    // ones. Rescaling can in principle push a free component under the
    // floor, hence the loop; once pinned a component stays pinned, and the
    // largest component never is, so the loop settles within kNumEnv rounds.
    for (int round = 0; round < kNumEnv; ++round) {
        int clamped = 0;
        double free_mass = 0.0;
        for (int i = 0; i < kNumEnv; ++i) {
            if (d[i] <= kProbFloor) {
                ++clamped;
            } else {
                free_mass += d[i];
            }
        }
        if (clamped == 0) break;
        const double scale = (1.0 - clamped * kProbFloor) / free_mass;
        bool stable = true;
        for (int i = 0; i < kNumEnv; ++i) {
            if (d[i] <= kProbFloor) {
                d[i] = kProbFloor;
            } else {
                d[i] *= scale;
                if (d[i] < kProbFloor) stable = false;
            }
        }
        if (stable) break;
    }
    return d;
}

int argmax_index(const std::array<double, 5>& v, std::optional<int> previous) {
    const double top = *std::max_element(v.begin(), v.end());
    if (previous && v[static_cast<std::size_t>(*previous)] == top) return *previous;
    for (int i = 0; i < kNumEnv; ++i) {
        if (v[static_cast<std::size_t>(i)] == top) return i;
    }
    return 0;  // unreachable for finite input
}

EnvLabel argmax_label(const ProbDist5& d, std::optional<EnvLabel> previous) {
    std::optional<int> prev;
    if (previous) prev = label_ordinal(*previous);
    return label_from_ordinal(argmax_index(d.p, prev));
}

std::string_view method_name(MethodId m) {
    switch (m) {
        case MethodId::Cnn: return "cnn";
        case MethodId::CnnVoting: return "cnn-voting";
        case MethodId::Hmm: return "hmm";
        case MethodId::HmmVoting: return "hmm-voting";
    }
    return "?";
}

std::optional<MethodId> parse_method(std::string_view name) {
    for (MethodId m : {MethodId::Cnn, MethodId::CnnVoting, MethodId::Hmm, MethodId::HmmVoting}) {
        if (name == method_name(m)) return m;
    }
    return std::nullopt;
}

}  // namespace seqfusion
