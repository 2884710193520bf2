#include "cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bigset/errors.hpp"
#include "bigset/evaluation.hpp"
#include "bigset/hsi_io.hpp"
#include "bigset/stats_rx.hpp"
#include "bigset/synth.hpp"
#include "bigset/trainer.hpp"

#ifndef BIGSET_VERSION
#define BIGSET_VERSION "unknown"
#endif

namespace bigset::cli {

namespace fs = std::filesystem;

namespace {

// Written into manifests, ignored when read back.
const std::set<std::string> kMetadataKeys{"command", "tool_version", "wall_clock_seconds"};

const std::vector<std::string> kSynthKeys{"out_dir", "height",   "width", "bands", "anomalies",
                                          "contrast", "noise", "seed",  "means", "scales"};
const std::vector<std::string> kEvalKeys{"input", "gt", "out_dir"};
const std::vector<std::string> kRxKeys{"input", "gt", "out_dir", "detector"};
const std::vector<std::string> kPlainKeys{"input", "gt",     "out_dir",   "detector",    "epochs",
                                          "lr",    "seed",   "hidden",    "normalize",   "auc_interval"};
const std::vector<std::string> kBigsetKeys{"input",  "gt",     "out_dir",   "detector",  "epochs",
                                           "lr",     "seed",   "hidden",    "normalize", "auc_interval",
                                           "lambda", "gamma",  "iterations", "bins",     "tau_override"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw std::invalid_argument(key + ": expected a number, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument(key + ": expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    if (out.empty()) throw std::invalid_argument(key + ": expected a comma-separated list");
    return out;
}

bool parse_switch(const std::string& key, const std::string& text) {
    if (text == "on") return true;
    if (text == "off") return false;
    throw std::invalid_argument(key + ": expected 'on' or 'off', got '" + text + "'");
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

std::string key_of(const std::string& flag) {
    std::string k = flag;
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

std::string flag_of(const std::string& key) {
    std::string f = key;
    std::replace(f.begin(), f.end(), '_', '-');
    return "--" + f;
}

/// Rejects keys outside `allowed`, naming the context (file or detector).
void check_keys(const Settings& s, const std::vector<std::string>& allowed, const std::string& context) {
    for (const auto& [key, value] : s) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw std::invalid_argument(flag_of(key) + " is not valid " + context);
        }
    }
}

void apply_threads() {
    const char* env = std::getenv("BIGSET_THREADS");
    if (!env || !*env) return;
    const auto n = parse_uint("BIGSET_THREADS", env);
    if (n == 0) throw std::invalid_argument("BIGSET_THREADS must be >= 1");
    Eigen::setNbThreads(static_cast<int>(n));
}

HsiCube load_input(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("input not found: " + path.string());
    if (path.extension() == ".hdr") return load_envi(path);
    return load_raw(path);
}

ErrorMap load_scores(const fs::path& path) {
    if (!fs::exists(path)) throw DataError("input not found: " + path.string());
    if (path.extension() == ".pgm") {
        const PgmImage img = read_pgm(path);
        std::vector<double> v(img.pixels.begin(), img.pixels.end());
        return ErrorMap(img.height, img.width, std::move(v));
    }
    return load_raw_map(path);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    return f;
}

void write_manifest(const fs::path& path, const std::string& command, const Settings& resolved, double seconds) {
    std::ofstream f = open_out(path);
    f << "# bigset run manifest; rerun with: bigset " << command << " --config <this file>\n";
    f << "# relative paths resolve against the working directory\n";
    f << "command = " << command << "\n";
    for (const auto& [key, value] : resolved) f << key << " = " << value << "\n";
    f << "tool_version = " << BIGSET_VERSION << "\n";
    f << "wall_clock_seconds = " << format_double(seconds) << "\n";
    if (!f) throw DataError("cannot write " + path.string());
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string four_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const Settings& s, std::ostream& out) {
    check_keys(s, kSynthKeys, "for synth");
    const Timer timer;
    SynthConfig cfg;
    if (s.count("height")) cfg.height = parse_uint("height", s.at("height"));
    if (s.count("width")) cfg.width = parse_uint("width", s.at("width"));
    if (s.count("bands")) cfg.bands = parse_uint("bands", s.at("bands"));
    if (s.count("anomalies")) cfg.anomalies = parse_uint("anomalies", s.at("anomalies"));
    if (s.count("contrast")) cfg.contrast = parse_double("contrast", s.at("contrast"));
    if (s.count("noise")) cfg.noise_std = parse_double("noise", s.at("noise"));
    if (s.count("seed")) cfg.seed = parse_uint("seed", s.at("seed"));
    if (s.count("means")) cfg.component_means = parse_list("means", s.at("means"));
    if (s.count("scales")) cfg.component_scales = parse_list("scales", s.at("scales"));
    validate(cfg);
    const fs::path dir = s.count("out_dir") ? fs::path(s.at("out_dir")) : fs::path(".");

    const SynthScene scene = synth_scene(cfg);
    fs::create_directories(dir);
    save_raw(scene.cube, dir / "cube.raw");
    save_ground_truth_pgm(scene.truth, dir / "gt.pgm");

    Settings resolved{{"out_dir", dir.string()},
                      {"height", std::to_string(cfg.height)},
                      {"width", std::to_string(cfg.width)},
                      {"bands", std::to_string(cfg.bands)},
                      {"anomalies", std::to_string(cfg.anomalies)},
                      {"contrast", format_double(cfg.contrast)},
                      {"noise", format_double(cfg.noise_std)},
                      {"seed", std::to_string(cfg.seed)},
                      {"means", join(cfg.component_means)},
                      {"scales", join(cfg.component_scales)}};
    write_manifest(dir / "manifest_synth.txt", "synth", resolved, timer.seconds());
    out << "wrote " << (dir / "cube.raw").string() << " (" << cfg.height << "x" << cfg.width << "x" << cfg.bands
        << ") and " << (dir / "gt.pgm").string() << " (" << count_ones(scene.truth) << " anomalous pixels)\n";
    return kExitOk;
}

// ---------------------------------------------------------------- detect

void write_loss_trace(const fs::path& path, const std::vector<EpochRecord>& losses) {
    std::ofstream f = open_out(path);
    f << "epoch,l_br,l_as,total\n";
    for (const EpochRecord& r : losses) {
        f << r.epoch << "," << format_double(r.loss.background) << "," << format_double(r.loss.suppression) << ","
          << format_double(r.loss.total) << "\n";
    }
}

void write_auc_trace(const fs::path& path, const std::vector<AucRecord>& aucs) {
    std::ofstream f = open_out(path);
    f << "epoch,auc\n";
    for (const AucRecord& r : aucs) f << r.epoch << "," << format_double(r.auc) << "\n";
}

void write_tau_report(const fs::path& dir, const TrainResult& r, const TrainConfig& cfg) {
    std::ofstream f = open_out(dir / "tau.txt");
    f << "tau = " << format_double(r.tau) << "\n";
    f << "source = " << (r.tau_estimate ? "estimated" : "override") << "\n";
    if (!r.tau_estimate) return;
    const TauEstimate& e = *r.tau_estimate;
    f << "gamma = " << format_double(e.gamma) << "\n";
    f << "bins = " << cfg.bins << "\n";
    f << "corner_bin = " << e.corner_bin << "\n";
    f << "corner_value = " << format_double(e.corner_value) << "\n";

    std::ofstream h = open_out(dir / "tau_histogram.csv");
    h << "left,right,count\n";
    for (std::size_t i = 0; i < e.histogram.counts.size(); ++i) {
        h << format_double(e.histogram.edges[i]) << "," << format_double(e.histogram.edges[i + 1]) << ","
          << e.histogram.counts[i] << "\n";
    }
}

TrainConfig train_config(const Settings& s) {
    TrainConfig cfg;
    if (s.count("lambda")) cfg.lambda = parse_double("lambda", s.at("lambda"));
    if (s.count("gamma")) cfg.gamma = parse_double("gamma", s.at("gamma"));
    if (s.count("iterations")) cfg.iterations = parse_uint("iterations", s.at("iterations"));
    if (s.count("epochs")) cfg.epochs_per_iter = parse_uint("epochs", s.at("epochs"));
    if (s.count("lr")) cfg.learning_rate = parse_double("lr", s.at("lr"));
    if (s.count("seed")) cfg.seed = parse_uint("seed", s.at("seed"));
    if (s.count("hidden")) cfg.hidden = parse_uint("hidden", s.at("hidden"));
    if (s.count("bins")) cfg.bins = parse_uint("bins", s.at("bins"));
    if (s.count("tau_override")) cfg.tau_override = parse_double("tau_override", s.at("tau_override"));
    if (s.count("normalize")) cfg.normalize = parse_switch("normalize", s.at("normalize"));
    if (s.count("auc_interval")) cfg.auc_interval = parse_uint("auc_interval", s.at("auc_interval"));
    validate(cfg);
    return cfg;
}

Settings resolved_train(const TrainConfig& cfg, bool full) {
    Settings r{{"epochs", std::to_string(cfg.epochs_per_iter)},
               {"lr", format_double(cfg.learning_rate)},
               {"seed", std::to_string(cfg.seed)},
               {"hidden", std::to_string(cfg.hidden)},
               {"normalize", cfg.normalize ? "on" : "off"},
               {"auc_interval", std::to_string(cfg.auc_interval)}};
    if (full) {
        r["lambda"] = format_double(cfg.lambda);
        r["gamma"] = format_double(cfg.gamma);
        r["iterations"] = std::to_string(cfg.iterations);
        r["bins"] = std::to_string(cfg.bins);
        if (cfg.tau_override) r["tau_override"] = format_double(*cfg.tau_override);
    }
    return r;
}

int cmd_detect(const Settings& s, std::ostream& out) {
    const std::string detector = s.count("detector") ? s.at("detector") : "bigset";
    if (detector == "rx") check_keys(s, kRxKeys, "with --detector rx");
    else if (detector == "plain-ae") check_keys(s, kPlainKeys, "with --detector plain-ae");
    else if (detector == "bigset") check_keys(s, kBigsetKeys, "with --detector bigset");
    else throw std::invalid_argument("--detector must be bigset, rx or plain-ae, got '" + detector + "'");
    if (!s.count("input")) throw std::invalid_argument("detect requires --input");

    const Timer timer;
    const fs::path input = s.at("input");
    const fs::path dir = s.count("out_dir") ? fs::path(s.at("out_dir")) : fs::path(".");
    const TrainConfig cfg = detector == "rx" ? TrainConfig{} : train_config(s);

    const HsiCube cube = load_input(input);
    std::optional<GroundTruth> truth;
    if (s.count("gt")) truth = load_ground_truth(s.at("gt"), cube.height(), cube.width());
    fs::create_directories(dir);

    Settings resolved{{"detector", detector}, {"input", input.string()}, {"out_dir", dir.string()}};
    if (truth) resolved["gt"] = s.at("gt");

    ErrorMap detection;
    if (detector == "rx") {
        detection = rx_detect(cube);
    } else {
        const TrainOptions options{truth ? &*truth : nullptr};
        TrainResult result;
        try {
            result = detector == "bigset" ? train(cube, cfg, options) : train_plain(cube, cfg, options);
        } catch (const TrainingError& e) {
            write_loss_trace(dir / "loss_trace.csv", e.trace());
            throw;
        }
        write_loss_trace(dir / "loss_trace.csv", result.losses);
        if (!result.aucs.empty()) write_auc_trace(dir / "auc_trace.csv", result.aucs);
        if (detector == "bigset") {
            write_tau_report(dir, result, cfg);
            for (std::size_t k = 0; k < result.masks.size(); ++k) {
                save_mask_pgm(result.masks[k], dir / ("mask_" + std::to_string(k + 1) + ".pgm"));
            }
            out << "tau: " << four_decimals(result.tau) << (result.tau_estimate ? "" : " (override)") << "\n";
            out << "masked pixels: " << count_ones(result.masks.back()) << "\n";
        }
        out << "final loss: " << format_double(result.losses.back().loss.total) << "\n";
        detection = std::move(result.detection);
        for (auto& [k, v] : resolved_train(cfg, detector == "bigset")) resolved[k] = v;
    }

    save_raw(detection, dir / "detection.raw");
    export_map(detection, dir / "detection.pgm");
    if (truth) out << "AUC: " << four_decimals(auc(detection, *truth)) << "\n";
    write_manifest(dir / "manifest_detect.txt", "detect", resolved, timer.seconds());
    out << "wrote " << (dir / "detection.raw").string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const Settings& s, std::ostream& out) {
    check_keys(s, kEvalKeys, "for eval");
    if (!s.count("input") || !s.count("gt")) throw std::invalid_argument("eval requires --input and --gt");
    const Timer timer;
    const fs::path dir = s.count("out_dir") ? fs::path(s.at("out_dir")) : fs::path(".");
    const ErrorMap scores = load_scores(s.at("input"));
    const GroundTruth gt = load_ground_truth(s.at("gt"), scores.height(), scores.width());
    const RocCurve curve = roc_curve(scores, gt);
    fs::create_directories(dir);
    save_roc_csv(curve, dir / "roc.csv");
    out << "AUC: " << four_decimals(auc(curve)) << "\n";
    write_manifest(dir / "manifest_eval.txt", "eval", {{"input", s.at("input")}, {"gt", s.at("gt")}, {"out_dir", dir.string()}},
                   timer.seconds());
    return kExitOk;
}

struct Command {
    explicit Command(CLI::App* sub) : app(sub) {}
    CLI::App* app;
    std::vector<std::string> keys;
    std::map<std::string, std::string> values;  // flag key -> bound storage
};

void add_flags(Command& c, const std::vector<std::pair<std::string, std::string>>& flags) {
    for (const auto& [flag, help] : flags) {
        const std::string key = key_of(flag);
        c.keys.push_back(key);
        c.app->add_option("--" + flag, c.values[key], help);
    }
}

/// Config file values, overridden by flags given on the command line.
Settings merge(const Command& c, const std::string& config, const std::string& command) {
    Settings s;
    if (!config.empty()) {
        for (auto& [key, value] : read_config(config)) {
            if (key == "command" && value != command) {
                throw std::invalid_argument(config + " was written by '" + value + "', not '" + command + "'");
            }
            if (kMetadataKeys.count(key)) continue;
            if (std::find(c.keys.begin(), c.keys.end(), key) == c.keys.end()) {
                throw std::invalid_argument("unknown key '" + key + "' in " + config);
            }
            s[key] = value;
        }
    }
    for (const std::string& key : c.keys) {
        if (c.app->count(flag_of(key)) > 0) s[key] = c.values.at(key);
    }
    return s;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

Settings read_config(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot read config " + path.string());
    Settings s;
    std::string line;
    for (std::size_t n = 1; std::getline(f, line); ++n) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(n) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw std::invalid_argument(path.string() + ":" + std::to_string(n) + ": empty key");
        s[key] = trim(line.substr(eq + 1));
    }
    return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hyperspectral anomaly detection with mask-guided separation training"};
    app.set_version_flag("--version", std::string(BIGSET_VERSION));
    app.require_subcommand(1);

    std::string synth_config, detect_config, eval_config;
    Command synth{app.add_subcommand("synth", "Generate a seeded synthetic scene")};
    synth.app->add_option("--config", synth_config, "key = value config file; flags override it");
    add_flags(synth, {{"out-dir", "Output directory (default .)"},
                      {"height", "Rows"},
                      {"width", "Columns"},
                      {"bands", "Spectral bands"},
                      {"anomalies", "Anomalous pixels to implant"},
                      {"contrast", "Anomaly offset in background standard deviations"},
                      {"noise", "Additive Gaussian noise standard deviation"},
                      {"seed", "Random seed"},
                      {"means", "Comma-separated material brightness means"},
                      {"scales", "Comma-separated material brightness deviations"}});

    Command detect{app.add_subcommand("detect", "Run a detector on a cube")};
    detect.app->add_option("--config", detect_config, "key = value config file; flags override it");
    add_flags(detect, {{"input", "Cube: raw container or ENVI .hdr"},
                       {"gt", "Ground truth (.pgm or .csv) for AUC reporting"},
                       {"out-dir", "Output directory (default .)"},
                       {"detector", "bigset | rx | plain-ae (default bigset)"},
                       {"lambda", "Suppression weight"},
                       {"gamma", "Gamma for the threshold estimate"},
                       {"iterations", "Mask updates K"},
                       {"epochs", "Epochs per iteration"},
                       {"lr", "ADAM learning rate"},
                       {"seed", "Initialization seed"},
                       {"hidden", "Hidden units"},
                       {"bins", "Histogram bins for the threshold estimate"},
                       {"tau-override", "Use this tau instead of estimating it"},
                       {"normalize", "on | off: min-max scale the cube first"},
                       {"auc-interval", "Epochs between AUC samples when --gt is given"}});

    Command eval{app.add_subcommand("eval", "Score a detection map against ground truth")};
    eval.app->add_option("--config", eval_config, "key = value config file; flags override it");
    add_flags(eval, {{"input", "Detection map: raw container or PGM"},
                     {"gt", "Ground truth (.pgm or .csv)"},
                     {"out-dir", "Output directory for roc.csv (default .)"}});

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        apply_threads();
        if (*synth.app) return cmd_synth(merge(synth, synth_config, "synth"), out);
        if (*detect.app) return cmd_detect(merge(detect, detect_config, "detect"), out);
        return cmd_eval(merge(eval, eval_config, "eval"), out);
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace bigset::cli
