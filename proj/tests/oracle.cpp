#include "oracle.hpp"

#include <cassert>
#include <deque>

namespace seqfusion::testref {

namespace {
constexpr double kFloor = 1e-9;
}

Dist ref_normalize(const Dist& raw) {
    double total = 0.0;
    for (int i = 0; i < 5; ++i) total += raw[i];
    Dist d{};
    for (int i = 0; i < 5; ++i) d[i] = raw[i] / total;

    for (int round = 0; round < 5; ++round) {
        int clamped = 0;
        double free_mass = 0.0;
        for (int i = 0; i < 5; ++i) {
            if (d[i] <= kFloor) {
                clamped = clamped + 1;
            } else {
                free_mass += d[i];
            }
        }
        if (clamped == 0) break;
        const double scale = (1.0 - clamped * kFloor) / free_mass;
        bool stable = true;
        for (int i = 0; i < 5; ++i) {
            if (d[i] <= kFloor) {
                d[i] = kFloor;
            } else {
                d[i] = d[i] * scale;
                if (d[i] < kFloor) stable = false;
            }
        }
        if (stable) break;
    }
    return d;
}

int ref_argmax(const Dist& v, int prev) {
    double top = v[0];
    for (int i = 1; i < 5; ++i) {
        if (v[i] > top) top = v[i];
    }
    if (prev >= 0 && v[prev] == top) return prev;
    for (int i = 0; i < 5; ++i) {
        if (v[i] == top) return i;
    }
    return 0;
}

RefTrace ref_fuse(const std::vector<Dist>& emissions, const Matrix& t, int window) {
    assert(!emissions.empty());
    assert(window >= 1);

    const int n = static_cast<int>(emissions.size());
    const int warm = n < window ? n : window;

    RefTrace trace;
    int prev = -1;
    for (int k = 0; k < warm; ++k) {
        trace.posteriors.push_back(emissions[static_cast<std::size_t>(k)]);
        prev = ref_argmax(emissions[static_cast<std::size_t>(k)], prev);
        trace.decisions.push_back(prev);
    }
    if (n == warm) return trace;

    std::deque<Dist> buffer;
    for (int k = 0; k < warm; ++k) buffer.push_back(emissions[static_cast<std::size_t>(k)]);

    int last_opt = -1;
    for (int frame = warm; frame < n; ++frame) {
        const Dist& e = emissions[static_cast<std::size_t>(frame)];

        Dist mean{};
        for (int i = 0; i < 5; ++i) {
            double s = 0.0;
            for (const Dist& slot : buffer) s += slot[i];
            mean[i] = s / static_cast<double>(buffer.size());
        }

        Dist scored{};
        for (int i = 0; i < 5; ++i) {
            double dot = 0.0;
            for (int j = 0; j < 5; ++j) dot += t[i][j] * e[j];
            scored[i] = mean[i] * dot;
        }

        const int opt = ref_argmax(scored, last_opt);

        Dist raw{};
        for (int j = 0; j < 5; ++j) raw[j] = mean[opt] * t[opt][j] * e[j];
        const Dist posterior = ref_normalize(raw);

        if (frame == warm) {
            trace.decisions[static_cast<std::size_t>(warm - 1)] = opt;
        } else {
            trace.decisions.push_back(opt);
        }
        trace.posteriors.push_back(posterior);

        buffer.push_back(posterior);
        if (static_cast<int>(buffer.size()) > window) buffer.pop_front();
        last_opt = opt;
    }
    trace.decisions.push_back(ref_argmax(trace.posteriors.back(), last_opt));
    return trace;
}

}  // namespace seqfusion::testref
