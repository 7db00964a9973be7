// Command-line driver: simulate | calibrate | infer | detect | report.
// Exit codes: 0 success, 1 computation error, 2 usage or config error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gazelab/config.hpp"
#include "gazelab/runner.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string logs_dir;
    std::string calibration_path;
    std::string model_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> profile;
    bool identity = false;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaze inference lab: simulate foveated-rendering workload traces, run the "
                 "scan-based gaze attack, and evaluate windowed-statistics defenses."};
    app.require_subcommand(1);

    CliArgs args;
    std::uint64_t seed_value = 0;
    std::string profile_value;
    app.add_option("--config", args.config_path, "Experiment config file (JSON)");
    app.add_option("--out", args.out_dir, "Artifact directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed_value, "Replace the config's seed list");
    auto* profile_opt =
        app.add_option("--profile", profile_value, "Override the config's profile name");

    CLI::App* sim = app.add_subcommand("simulate", "Generate session logs for the sweep");
    CLI::App* cal = app.add_subcommand("calibrate", "Fit the profile's offset model");
    CLI::App* inf = app.add_subcommand("infer", "Run gaze inference over session logs");
    CLI::App* det = app.add_subcommand("detect", "Extract windows and run the detector");
    CLI::App* rep = app.add_subcommand("report", "Summarize artifacts into tables and plots");
    for (CLI::App* sub : {sim, cal, inf, det, rep}) {
        sub->fallthrough();
        sub->footer("Shared flags (before or after the subcommand): --config <path>, "
                    "--out <dir>, --seed <n>, --profile <name>");
    }

    cal->add_option("--logs", args.logs_dir, "Directory holding sessions.csv (default: --out)");
    inf->add_option("--logs", args.logs_dir, "Directory holding sessions.csv (default: --out)");
    det->add_option("--logs", args.logs_dir, "Directory holding sessions.csv (default: --out)");
    inf->add_option("--calibration", args.calibration_path,
                    "Calibration file (default: <out>/calibration.json)");
    inf->add_flag("--identity", args.identity, "Skip offset correction entirely");
    det->add_option("--model", args.model_path, "Reuse a trained detector model file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (seed_opt->count() > 0) args.seed = seed_value;
    if (profile_opt->count() > 0) args.profile = profile_value;

    const CLI::App* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();

    try {
        if (cmd == "report") {
            return gazelab::cmd_report(args.out_dir);
        }
        if (args.config_path.empty()) {
            std::cerr << "error: " << cmd << " requires --config\n";
            return 2;
        }
        const gazelab::ExperimentConfig cfg =
            gazelab::load_config(args.config_path, args.profile, args.seed);
        const std::filesystem::path out = args.out_dir;
        const std::filesystem::path logs = args.logs_dir.empty() ? out
                                                                 : std::filesystem::path(args.logs_dir);
        if (cmd == "simulate") return gazelab::cmd_simulate(cfg, out);
        if (cmd == "calibrate") return gazelab::cmd_calibrate(cfg, out, logs);
        if (cmd == "infer") {
            std::optional<std::filesystem::path> calib;
            if (!args.calibration_path.empty()) calib = args.calibration_path;
            return gazelab::cmd_infer(cfg, out, logs, calib, args.identity);
        }
        if (cmd == "detect") {
            std::optional<std::filesystem::path> model;
            if (!args.model_path.empty()) model = args.model_path;
            return gazelab::cmd_detect(cfg, out, logs, model);
        }
        std::cerr << "error: unknown subcommand " << cmd << "\n";
        return 2;
    } catch (const gazelab::Error& e) {
        std::cerr << "error [" << gazelab::error_code_name(e.code()) << "]: " << e.what() << "\n";
        return e.code() == gazelab::ErrorCode::ConfigError ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
