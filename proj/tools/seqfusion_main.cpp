#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqfusion/eval.hpp"
#include "seqfusion/fusion.hpp"
#include "seqfusion/io.hpp"
#include "seqfusion/simulator.hpp"
#include "seqfusion/transition.hpp"

namespace fs = std::filesystem;
using namespace seqfusion;

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::string cur;
    std::istringstream in(csv);
    while (std::getline(in, cur, ',')) {
        out.push_back(std::stod(cur));
    }
    return out;
}

std::vector<double> read_number_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(std::stod(line));
    }
    return out;
}

struct SimulateArgs {
    int trials = 5;
    std::uint64_t seed = 0;
    std::string preset = "indoor";
    std::string config_path;
    std::string script_spec;
    double concentration = -1.0;
    double error_rate = -1.0;
    double error_bias = -1.0;
    double fps = -1.0;
    std::string out_dir = ".";
};

int run_simulate(const SimulateArgs& args) {
    RunSettings settings;
    if (!args.config_path.empty()) settings = load_settings(args.config_path);
    if (!args.script_spec.empty()) {
        const double fps = settings.script.frame_rate_hz;
        settings.script = parse_script_spec(args.script_spec);
        settings.script.frame_rate_hz = fps;
    }
    if (args.concentration >= 0.0) settings.noise.concentration = args.concentration;
    if (args.error_rate >= 0.0) settings.noise.error_rate = args.error_rate;
    if (args.error_bias >= 0.0) settings.noise.error_bias = args.error_bias;
    if (args.fps > 0.0) settings.script.frame_rate_hz = args.fps;
    settings.noise.seed = args.seed;
    if (args.preset == "outdoor") {
        settings.noise = outdoor_noise(settings.noise);
    } else if (args.preset != "indoor") {
        throw std::invalid_argument("unknown preset '" + args.preset + "' (indoor|outdoor)");
    }

    fs::create_directories(args.out_dir);
    const auto session = generate_session(settings.script, settings.noise, args.trials);
    for (std::size_t i = 0; i < session.size(); ++i) {
        const fs::path path = fs::path(args.out_dir) / ("trial_" + std::to_string(i + 1) + ".csv");
        write_score_csv(session[i], path);
        std::cout << "wrote " << path.string() << " (" << session[i].frames.size()
                  << " frames)\n";
    }
    return 0;
}

struct FuseArgs {
    std::string method = "hmm-voting";
    int lw = 5;
    int lv = 1;
    std::string matrix_path;
    double p_stay = 0.9;
    double p_even = 0.01;
    double p_odd = 0.005;
    std::string input;
    std::string out;
    std::string trace_json;
};

int run_fuse(const FuseArgs& args) {
    const auto method = parse_method(args.method);
    if (!method) throw std::invalid_argument("unknown method '" + args.method + "'");

    FusionConfig cfg;
    cfg.smooth_window = args.lw;
    cfg.vote_halfwidth = args.lv;
    if (!args.matrix_path.empty()) {
        cfg.matrix = read_matrix_file(args.matrix_path);
    } else {
        cfg.matrix = build_matrix({args.p_stay, args.p_even, args.p_odd});
    }

    const ScoreStream stream = read_score_csv(args.input);
    const FusionTrace trace = fuse_pipeline(stream, *method, cfg);

    fs::path out = args.out.empty()
                       ? fs::path(args.input).replace_extension(".decisions.csv")
                       : fs::path(args.out);
    write_decisions_csv(trace, args.lw, args.lv, out);
    std::cout << "wrote " << out.string() << " method=" << method_name(trace.method)
              << " delay_frames=" << trace.delay_frames << " delay_ms="
              << fmt(trace.delay_frames * 1000.0 / stream.frame_rate_hz, "%.2f") << '\n';

    if (!args.trace_json.empty()) {
        nlohmann::ordered_json j;
        j["method"] = std::string(method_name(trace.method));
        j["delay_frames"] = trace.delay_frames;
        j["decisions"] = [&] {
            std::vector<int> d;
            for (EnvLabel e : trace.decisions) d.push_back(label_index(e));
            return d;
        }();
        nlohmann::ordered_json posts = nlohmann::ordered_json::array();
        for (const auto& p : trace.posteriors) posts.push_back(p.p);
        j["posteriors"] = std::move(posts);
        write_json_file(j, args.trace_json);
    }
    return 0;
}

struct EvalArgs {
    std::vector<std::string> decisions;
    std::vector<std::string> scores;
    std::string out;
    double fps = 0.0;
    double p_stay = 0.9;
    double p_even = 0.01;
    double p_odd = 0.005;
    std::uint64_t seed = 0;
};

int run_eval(const EvalArgs& args) {
    if (args.decisions.size() != args.scores.size() || args.decisions.empty()) {
        throw std::invalid_argument("need matching --decisions and --scores file lists");
    }
    std::vector<double> accs;
    std::optional<DecisionsFile> first;
    double fps = args.fps;
    for (std::size_t i = 0; i < args.decisions.size(); ++i) {
        DecisionsFile dec = read_decisions_csv(args.decisions[i]);
        const ScoreStream stream = read_score_csv(args.scores[i]);
        if (!stream.truth) {
            throw std::invalid_argument(args.scores[i] +
                                        " has no truth column; accuracy needs ground truth");
        }
        if (first && (first->trace.method != dec.trace.method ||
                      first->trace.delay_frames != dec.trace.delay_frames)) {
            throw std::invalid_argument("decision files mix methods or delays");
        }
        accs.push_back(accuracy_with_delay(dec.trace, *stream.truth));
        if (fps <= 0.0) fps = stream.frame_rate_hz;
        if (!first) first = std::move(dec);
    }
    const AccuracyReport report =
        summarize(std::move(accs), fps, first->trace.delay_frames, first->trace.method);

    ConfigEcho echo{first->smooth_window, first->vote_halfwidth,
                    {args.p_stay, args.p_even, args.p_odd}, args.seed};
    const auto j = report_json(report, echo);
    if (!args.out.empty()) {
        write_json_file(j, args.out);
        std::cout << "wrote " << args.out << '\n';
    }
    std::cout << "method=" << method_name(report.method) << " trials=" << report.per_trial_accuracy.size()
              << " mean=" << fmt(report.mean) << " sd=" << fmt(report.sd)
              << " delay_frames=" << report.delay_frames << " delay_ms="
              << fmt(report.delay_ms, "%.2f") << '\n';
    return 0;
}

struct SweepArgs {
    std::string config_path;
    int trials = 40;
    std::uint64_t seed = 7;
    std::string windows = "1,3,5,7,9,11";
    std::string out;
    std::string csv;
};

int run_sweep(const SweepArgs& args) {
    RunSettings settings;
    if (!args.config_path.empty()) settings = load_settings(args.config_path);
    settings.noise.seed = args.seed;
    settings.trials = args.trials;
    if (!args.windows.empty()) {
        settings.windows.clear();
        for (double w : parse_double_list(args.windows)) {
            settings.windows.push_back(static_cast<int>(w));
        }
    }

    FusionConfig cfg;
    cfg.smooth_window = settings.smooth_window;
    cfg.vote_halfwidth = settings.vote_halfwidth;
    cfg.matrix = build_matrix(settings.matrix_params);

    const auto session = generate_session(settings.script, settings.noise, settings.trials);
    const std::vector<MethodId> methods = {MethodId::Cnn, MethodId::CnnVoting, MethodId::Hmm,
                                           MethodId::HmmVoting};
    const DelaySweep sweep = delay_sweep(session, cfg, methods, settings.windows);

    for (const auto& curve : sweep.methods) {
        std::cout << method_name(curve.method) << ":";
        for (const auto& pt : curve.points) {
            std::cout << " (" << pt.delay_frames << ", " << fmt(pt.mean_accuracy, "%.4f") << ")";
        }
        if (curve.slope_pct_per_frame) {
            std::cout << " slope=" << fmt(*curve.slope_pct_per_frame, "%.4f") << " %/frame";
        }
        std::cout << '\n';
    }

    ConfigEcho echo{settings.smooth_window, settings.vote_halfwidth, settings.matrix_params,
                    settings.noise.seed};
    if (!args.out.empty()) {
        write_json_file(sweep_json(sweep, echo, settings.script.frame_rate_hz), args.out);
        std::cout << "wrote " << args.out << '\n';
    }
    if (!args.csv.empty()) {
        write_sweep_csv(sweep, settings.script.frame_rate_hz, args.csv);
        std::cout << "wrote " << args.csv << '\n';
    }
    return 0;
}

struct TTestArgs {
    std::string a_list;
    std::string b_list;
    std::string a_file;
    std::string b_file;
    std::string out;
};

int run_ttest(const TTestArgs& args) {
    std::vector<double> a, b;
    if (!args.a_list.empty()) a = parse_double_list(args.a_list);
    if (!args.b_list.empty()) b = parse_double_list(args.b_list);
    if (!args.a_file.empty()) a = read_number_lines(args.a_file);
    if (!args.b_file.empty()) b = read_number_lines(args.b_file);
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("provide both samples via --a/--b or --a-file/--b-file");
    }
    const TTestResult r = welch_ttest(a, b);
    std::cout << "t=" << fmt(r.t) << " p=" << fmt(r.p) << '\n';
    if (!args.out.empty()) {
        write_json_file(nlohmann::ordered_json{{"t", r.t}, {"p", r.p}}, args.out);
        std::cout << "wrote " << args.out << '\n';
    }
    return 0;
}

struct BenchArgs {
    int steps = 100000;
    std::uint64_t seed = 1;
    int lw = 5;
    std::string out;
};

int run_bench(const BenchArgs& args) {
    FusionConfig cfg;
    cfg.smooth_window = args.lw;
    const TimingResult r = timing_bench(args.steps, cfg, args.seed);
    std::cout << "steps=" << args.steps << " median_us=" << fmt(r.median_step_seconds * 1e6, "%.3f")
              << " p99_us=" << fmt(r.p99_step_seconds * 1e6, "%.3f") << '\n';
    if (!args.out.empty()) {
        write_json_file(nlohmann::ordered_json{{"steps", args.steps},
                                               {"median_us", r.median_step_seconds * 1e6},
                                               {"p99_us", r.p99_step_seconds * 1e6}},
                        args.out);
        std::cout << "wrote " << args.out << '\n';
    }
    return 0;
}

int run_validate_matrix(const std::string& path) {
    const TransitionMatrix m = read_matrix_file(path);
    const auto violations = validate_rules(m);
    if (violations.empty()) {
        std::cout << path << ": ok (all transition rules hold)\n";
        return 0;
    }
    for (const auto& v : violations) {
        std::cout << path << ": " << rule_name(v.rule) << ": " << v.detail << '\n';
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential decision fusion for locomotion environment classification"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Generate synthetic labeled score streams");
    c_sim->add_option("--trials", sim.trials, "number of trials")->check(CLI::PositiveNumber);
    c_sim->add_option("--seed", sim.seed, "base seed");
    c_sim->add_option("--preset", sim.preset, "indoor|outdoor (outdoor doubles error rate)");
    c_sim->add_option("--config", sim.config_path, "flat key=value settings file");
    c_sim->add_option("--script", sim.script_spec, "segment list, e.g. LG:30,US:20");
    c_sim->add_option("--concentration", sim.concentration, "emission sharpness");
    c_sim->add_option("--error-rate", sim.error_rate, "error-frame probability");
    c_sim->add_option("--error-bias", sim.error_bias, "mass on the wrong label in error frames");
    c_sim->add_option("--fps", sim.fps, "frame rate in Hz");
    c_sim->add_option("--out-dir", sim.out_dir, "output directory");

    FuseArgs fuse;
    auto* c_fuse = app.add_subcommand("fuse", "Run a fusion pipeline over a score CSV");
    c_fuse->add_option("--method", fuse.method, "cnn|cnn-voting|hmm|hmm-voting");
    c_fuse->add_option("--lw", fuse.lw, "smoothing window length")->check(CLI::PositiveNumber);
    c_fuse->add_option("--lv", fuse.lv, "voting half-window")->check(CLI::NonNegativeNumber);
    c_fuse->add_option("--matrix", fuse.matrix_path, "transition matrix text file");
    c_fuse->add_option("--p-stay", fuse.p_stay, "stay probability");
    c_fuse->add_option("--p-even", fuse.p_even, "even-gap hop probability");
    c_fuse->add_option("--p-odd", fuse.p_odd, "odd-gap hop probability");
    c_fuse->add_option("input", fuse.input, "score CSV")->required();
    c_fuse->add_option("--out", fuse.out, "decisions CSV path");
    c_fuse->add_option("--trace-json", fuse.trace_json, "also write the full trace as JSON");

    EvalArgs ev;
    auto* c_eval = app.add_subcommand("eval", "Score decision files against ground truth");
    c_eval->add_option("--decisions", ev.decisions, "decision CSVs")->required();
    c_eval->add_option("--scores", ev.scores, "score CSVs with truth, same order")->required();
    c_eval->add_option("--out", ev.out, "result JSON path");
    c_eval->add_option("--fps", ev.fps, "frame rate override");
    c_eval->add_option("--p-stay", ev.p_stay, "echoed stay probability");
    c_eval->add_option("--p-even", ev.p_even, "echoed even-gap probability");
    c_eval->add_option("--p-odd", ev.p_odd, "echoed odd-gap probability");
    c_eval->add_option("--seed", ev.seed, "echoed seed");

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("delay-sweep", "Accuracy vs delay trade-off analysis");
    c_sweep->add_option("--config", sweep.config_path, "flat key=value settings file");
    c_sweep->add_option("--trials", sweep.trials, "trials per session")->check(CLI::PositiveNumber);
    c_sweep->add_option("--seed", sweep.seed, "base seed");
    c_sweep->add_option("--windows", sweep.windows, "odd voting windows, e.g. 1,3,5");
    c_sweep->add_option("--out", sweep.out, "sweep JSON path");
    c_sweep->add_option("--csv", sweep.csv, "tidy sweep CSV path");

    TTestArgs tt;
    auto* c_tt = app.add_subcommand("ttest", "Welch t-test on two accuracy lists");
    c_tt->add_option("--a", tt.a_list, "comma list of sample A");
    c_tt->add_option("--b", tt.b_list, "comma list of sample B");
    c_tt->add_option("--a-file", tt.a_file, "file with one number per line");
    c_tt->add_option("--b-file", tt.b_file, "file with one number per line");
    c_tt->add_option("--out", tt.out, "result JSON path");

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "Per-step latency of the smoother");
    c_bench->add_option("--steps", bench.steps, "steps to time (>= 10000)");
    c_bench->add_option("--seed", bench.seed, "stream seed");
    c_bench->add_option("--lw", bench.lw, "smoothing window length")->check(CLI::PositiveNumber);
    c_bench->add_option("--out", bench.out, "result JSON path");

    std::string matrix_path;
    auto* c_vm = app.add_subcommand("validate-matrix", "Check a matrix file against the rules");
    c_vm->add_option("matrix", matrix_path, "transition matrix text file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_sim) return run_simulate(sim);
        if (*c_fuse) return run_fuse(fuse);
        if (*c_eval) return run_eval(ev);
        if (*c_sweep) return run_sweep(sweep);
        if (*c_tt) return run_ttest(tt);
        if (*c_bench) return run_bench(bench);
        if (*c_vm) return run_validate_matrix(matrix_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
