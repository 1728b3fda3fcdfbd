#include "seqfusion/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace seqfusion {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& token, int line_no) {
    const std::string t = trim(token);
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + t + "'");
    }
}

long parse_long(const std::string& token, int line_no) {
    const std::string t = trim(token);
    try {
        std::size_t used = 0;
        const long v = std::stol(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + t + "'");
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return in;
}

std::string format_prob(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

// Quantize a distribution to 9 decimal digits so that the printed row sums
// to exactly 1.000000000. Floor plus largest-remainder keeps every
// component strictly within 1e-9 of its double value, which is what makes
// the read-back renormalization a sub-1e-9 perturbation.
std::array<long, 5> quantize_row(const ProbDist5& d) {
    std::array<long, 5> q{};
    std::array<double, 5> frac{};
    long total = 0;
    for (int i = 0; i < kNumEnv; ++i) {
        const double scaled = d[i] * 1e9;
        const double f = std::floor(scaled);
        q[static_cast<std::size_t>(i)] = static_cast<long>(f);
        frac[static_cast<std::size_t>(i)] = scaled - f;
        total += q[static_cast<std::size_t>(i)];
    }
    long residual = 1000000000L - total;
    for (int guard = 0; residual > 0 && guard < kNumEnv; ++guard) {
        int best = 0;
        for (int i = 1; i < kNumEnv; ++i) {
            if (frac[static_cast<std::size_t>(i)] > frac[static_cast<std::size_t>(best)]) best = i;
        }
        ++q[static_cast<std::size_t>(best)];
        frac[static_cast<std::size_t>(best)] = -1.0;
        --residual;
    }
    for (int guard = 0; residual < 0 && guard < kNumEnv; ++guard) {
        int best = -1;
        for (int i = 0; i < kNumEnv; ++i) {
            if (q[static_cast<std::size_t>(i)] > 1 &&
                (best < 0 ||
                 frac[static_cast<std::size_t>(i)] < frac[static_cast<std::size_t>(best)])) {
                best = i;
            }
        }
        if (best < 0) break;
        --q[static_cast<std::size_t>(best)];
        frac[static_cast<std::size_t>(best)] = 2.0;
        ++residual;
    }
    return q;
}

void append_row_probs(std::ofstream& out, const ProbDist5& d) {
    const auto q = quantize_row(d);
    char buf[16];
    for (int i = 0; i < kNumEnv; ++i) {
        std::snprintf(buf, sizeof(buf), "0.%09ld", q[static_cast<std::size_t>(i)]);
        out << ',' << buf;
    }
}

constexpr std::string_view kScoreHeader = "frame,p_lg,p_us,p_ds,p_ur,p_dr";
constexpr std::string_view kScoreHeaderTruth = "frame,p_lg,p_us,p_ds,p_ur,p_dr,truth";

}  // namespace

ScoreStream read_score_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    ++line_no;
    const std::string header = trim(line);
    bool has_truth = false;
    if (header == kScoreHeaderTruth) {
        has_truth = true;
    } else if (header != kScoreHeader) {
        throw ParseError(path.string() + ": line 1: unexpected header '" + header + "'");
    }

    ScoreStream stream;
    std::vector<EnvLabel> truth;
    int expected_frame = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cols = split(line, ',');
        const std::size_t want = has_truth ? 7 : 6;
        if (cols.size() != want) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": expected " +
                             std::to_string(want) + " columns, got " + std::to_string(cols.size()));
        }
        const long frame = parse_long(cols[0], line_no);
        if (frame != expected_frame) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": frame indices must be contiguous from 1 (expected " +
                             std::to_string(expected_frame) + ", got " + std::to_string(frame) +
                             ")");
        }
        ++expected_frame;

        std::array<double, 5> raw{};
        for (int j = 0; j < kNumEnv; ++j) {
            raw[static_cast<std::size_t>(j)] = parse_double(cols[static_cast<std::size_t>(j + 1)], line_no);
        }
        try {
            stream.frames.push_back(normalize(raw));
        } catch (const InvalidDistribution& e) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": " +
                             e.what());
        }
        if (has_truth) {
            const long t = parse_long(cols[6], line_no);
            if (t < 1 || t > kNumEnv) {
                throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                                 ": truth label out of range 1..5");
            }
            truth.push_back(label_from_index(static_cast<int>(t)));
        }
    }
    if (stream.frames.empty()) {
        throw ParseError(path.string() + ": no data rows");
    }
    if (has_truth) stream.truth = std::move(truth);
    return stream;
}

void write_score_csv(const ScoreStream& stream, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << (stream.truth ? kScoreHeaderTruth : kScoreHeader) << '\n';
    for (std::size_t k = 0; k < stream.frames.size(); ++k) {
        out << (k + 1);
        append_row_probs(out, stream.frames[k]);
        if (stream.truth) out << ',' << label_index((*stream.truth)[k]);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_decisions_csv(const FusionTrace& trace, int smooth_window, int vote_halfwidth,
                         const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "# method=" << method_name(trace.method) << ",delay_frames=" << trace.delay_frames
        << ",lw=" << smooth_window << ",lv=" << vote_halfwidth << '\n';
    out << "frame,decision,posterior_1,posterior_2,posterior_3,posterior_4,posterior_5\n";
    for (std::size_t k = 0; k < trace.decisions.size(); ++k) {
        out << (k + 1) << ',' << label_index(trace.decisions[k]);
        append_row_probs(out, trace.posteriors[k]);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

DecisionsFile read_decisions_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    int line_no = 0;

    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    ++line_no;
    DecisionsFile file;
    {
        const std::string meta = trim(line);
        if (meta.rfind("# ", 0) != 0) {
            throw ParseError(path.string() + ": line 1: missing metadata comment");
        }
        bool have_method = false;
        for (const auto& kv : split(meta.substr(2), ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ParseError(path.string() + ": line 1: bad metadata token '" + kv + "'");
            }
            const std::string key = trim(kv.substr(0, eq));
            const std::string value = trim(kv.substr(eq + 1));
            if (key == "method") {
                const auto m = parse_method(value);
                if (!m) throw ParseError(path.string() + ": line 1: unknown method " + value);
                file.trace.method = *m;
                have_method = true;
            } else if (key == "delay_frames") {
                file.trace.delay_frames = static_cast<int>(parse_long(value, 1));
            } else if (key == "lw") {
                file.smooth_window = static_cast<int>(parse_long(value, 1));
            } else if (key == "lv") {
                file.vote_halfwidth = static_cast<int>(parse_long(value, 1));
            } else {
                throw ParseError(path.string() + ": line 1: unknown metadata key " + key);
            }
        }
        if (!have_method) throw ParseError(path.string() + ": line 1: metadata lacks method");
    }

    if (!std::getline(in, line)) throw ParseError(path.string() + ": missing header");
    ++line_no;
    if (trim(line) != "frame,decision,posterior_1,posterior_2,posterior_3,posterior_4,posterior_5") {
        throw ParseError(path.string() + ": line 2: unexpected header");
    }

    int expected_frame = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() != 7) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": expected 7 columns");
        }
        if (parse_long(cols[0], line_no) != expected_frame) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": frame indices must be contiguous from 1");
        }
        ++expected_frame;
        const long d = parse_long(cols[1], line_no);
        if (d < 1 || d > kNumEnv) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": decision out of range 1..5");
        }
        file.trace.decisions.push_back(label_from_index(static_cast<int>(d)));
        std::array<double, 5> raw{};
        for (int j = 0; j < kNumEnv; ++j) {
            raw[static_cast<std::size_t>(j)] = parse_double(cols[static_cast<std::size_t>(j + 2)], line_no);
        }
        file.trace.posteriors.push_back(normalize(raw));
    }
    if (file.trace.decisions.empty()) throw ParseError(path.string() + ": no data rows");
    return file;
}

namespace {

nlohmann::ordered_json echo_json(const ConfigEcho& echo) {
    return {{"lw", echo.smooth_window},
            {"lv", echo.vote_halfwidth},
            {"p_stay", echo.matrix_params.p_stay},
            {"p_even", echo.matrix_params.p_even},
            {"p_odd", echo.matrix_params.p_odd},
            {"seed", echo.seed}};
}

}  // namespace

nlohmann::ordered_json report_json(const AccuracyReport& report, const ConfigEcho& echo,
                                   const std::optional<TTestResult>& ttest) {
    nlohmann::ordered_json j;
    j["method"] = std::string(method_name(report.method));
    j["config"] = echo_json(echo);
    j["per_trial_accuracy"] = report.per_trial_accuracy;
    j["mean"] = report.mean;
    j["sd"] = report.sd;
    j["delay_frames"] = report.delay_frames;
    j["delay_ms"] = report.delay_ms;
    if (ttest) {
        j["ttest"] = {{"t", ttest->t}, {"p", ttest->p}};
    }
    return j;
}

nlohmann::ordered_json sweep_json(const DelaySweep& sweep, const ConfigEcho& echo,
                                  double frame_rate_hz) {
    nlohmann::ordered_json j;
    j["config"] = echo_json(echo);
    j["frame_rate_hz"] = frame_rate_hz;
    nlohmann::ordered_json methods = nlohmann::ordered_json::array();
    for (const auto& curve : sweep.methods) {
        nlohmann::ordered_json m;
        m["method"] = std::string(method_name(curve.method));
        nlohmann::ordered_json pts = nlohmann::ordered_json::array();
        for (const auto& pt : curve.points) {
            pts.push_back({{"delay_frames", pt.delay_frames},
                           {"mean_accuracy", pt.mean_accuracy},
                           {"sd", pt.sd}});
        }
        m["points"] = std::move(pts);
        if (curve.slope_pct_per_frame) {
            m["slope_pct_per_frame"] = *curve.slope_pct_per_frame;
        } else {
            m["slope_pct_per_frame"] = nullptr;
        }
        methods.push_back(std::move(m));
    }
    j["methods"] = std::move(methods);
    return j;
}

void write_json_file(const nlohmann::ordered_json& j, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::ordered_json read_json_file(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    try {
        return nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_sweep_csv(const DelaySweep& sweep, double frame_rate_hz,
                     const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "method,delay_frames,delay_ms,mean_accuracy,sd\n";
    for (const auto& curve : sweep.methods) {
        for (const auto& pt : curve.points) {
            char ms[32];
            std::snprintf(ms, sizeof(ms), "%.4f", pt.delay_frames * 1000.0 / frame_rate_hz);
            out << method_name(curve.method) << ',' << pt.delay_frames << ',' << ms << ','
                << format_prob(pt.mean_accuracy) << ',' << format_prob(pt.sd) << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

TransitionMatrix read_matrix_file(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return matrix_from_text(buf.str());
}

void write_matrix_file(const TransitionMatrix& m, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << matrix_to_text(m);
    if (!out) throw IoError("write failed: " + path.string());
}

TrialScript parse_script_spec(const std::string& spec) {
    TrialScript script;
    for (const auto& token : split(spec, ',')) {
        const auto colon = token.find(':');
        if (colon == std::string::npos) {
            throw ParseError("bad script segment '" + token + "' (want LABEL:FRAMES)");
        }
        const auto label = parse_label(trim(token.substr(0, colon)));
        if (!label) throw ParseError("unknown environment label in script: " + token);
        const long frames = parse_long(token.substr(colon + 1), 0);
        if (frames <= 0) throw ParseError("segment duration must be positive: " + token);
        script.segments.push_back({*label, static_cast<int>(frames)});
    }
    if (script.segments.empty()) throw ParseError("empty script");
    return script;
}

RunSettings parse_settings_text(const std::string& text) {
    RunSettings s;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ParseError("settings line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "script") {
            s.script = parse_script_spec(value);
        } else if (key == "frame_rate_hz") {
            s.script.frame_rate_hz = parse_double(value, line_no);
        } else if (key == "concentration") {
            s.noise.concentration = parse_double(value, line_no);
        } else if (key == "error_rate") {
            s.noise.error_rate = parse_double(value, line_no);
        } else if (key == "error_bias") {
            s.noise.error_bias = parse_double(value, line_no);
        } else if (key == "seed") {
            s.noise.seed = static_cast<std::uint64_t>(parse_long(value, line_no));
        } else if (key == "p_stay") {
            s.matrix_params.p_stay = parse_double(value, line_no);
        } else if (key == "p_even") {
            s.matrix_params.p_even = parse_double(value, line_no);
        } else if (key == "p_odd") {
            s.matrix_params.p_odd = parse_double(value, line_no);
        } else if (key == "lw") {
            s.smooth_window = static_cast<int>(parse_long(value, line_no));
        } else if (key == "lv") {
            s.vote_halfwidth = static_cast<int>(parse_long(value, line_no));
        } else if (key == "windows") {
            s.windows.clear();
            for (const auto& tok : split(value, ',')) {
                s.windows.push_back(static_cast<int>(parse_long(tok, line_no)));
            }
        } else if (key == "trials") {
            s.trials = static_cast<int>(parse_long(value, line_no));
        } else {
            throw ParseError("settings line " + std::to_string(line_no) + ": unknown key '" +
                             key + "'");
        }
    }
    return s;
}

RunSettings load_settings(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_settings_text(buf.str());
}

}  // namespace seqfusion
