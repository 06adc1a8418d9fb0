#include "nprach/cli.hpp"

#include "nprach/errors.hpp"
#include "nprach/harness.hpp"
#include "nprach/hopping.hpp"
#include "nprach/iq_file.hpp"
#include "nprach/waveform.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

namespace nprach {

namespace {

struct Options {
    std::string config = "defaults";
    std::string scenario;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    int threads = 0;
    std::optional<double> target_fa;
    int n0 = 0;
};

int resolve_threads(int requested)
{
    if (requested > 0)
        return requested;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

Scenario scenario_for(const Options& opt, CLI::App* sub)
{
    Scenario scn = opt.scenario.empty() ? Scenario{} : load_scenario(opt.scenario);
    if (sub->count("--config") > 0)
        scn.cfg = load_config(opt.config);
    if (opt.seed)
        scn.master_seed = *opt.seed;
    if (opt.target_fa)
        scn.target_fa = *opt.target_fa;
    require_valid(scn.cfg);
    const auto errors = validate(scn);
    if (!errors.empty())
        throw ValidationError("invalid scenario: " + errors.front());
    return scn;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f)
        throw IoError("write failed on '" + path.string() + "'");
}

void make_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"NB-IoT NPRACH link-level simulator"};
    app.require_subcommand(1);
    Options opt;

    auto* pattern = app.add_subcommand("pattern", "Print the hopping pattern as 'm, index' lines");
    pattern->add_option("--config", opt.config, "Configuration file or 'defaults'");
    pattern->add_option("--n0", opt.n0, "Start subcarrier in [0, 12)");
    pattern->add_option("--out", opt.out, "Write to this file instead of stdout");

    auto* generate_cmd = app.add_subcommand("generate", "Write a preamble IQ dump (cf32 + .hdr sidecar)");
    generate_cmd->add_option("--config", opt.config, "Configuration file or 'defaults'");
    generate_cmd->add_option("--n0", opt.n0, "Start subcarrier in [0, 12)");
    generate_cmd->add_option("--out", opt.out, "Output directory")->required();

    auto* calibrate = app.add_subcommand("calibrate", "Calibrate the detection threshold on noise-only trials");
    calibrate->add_option("--config", opt.config, "Configuration file or 'defaults'");
    calibrate->add_option("--scenario", opt.scenario, "Scenario file (receiver grids, n_rx)");
    calibrate->add_option("--target-fa", opt.target_fa, "Target false-alarm probability");
    calibrate->add_option("--trials", opt.trials, "Noise-only trials");
    calibrate->add_option("--seed", opt.seed, "Master seed");
    calibrate->add_option("--threads", opt.threads, "Worker threads (0 = hardware)");
    calibrate->add_option("--out", opt.out, "Also write threshold.txt into this directory");

    auto* campaign = app.add_subcommand("campaign", "Run a Monte Carlo campaign and export the results");
    campaign->add_option("--scenario", opt.scenario, "Scenario file")->required();
    campaign->add_option("--config", opt.config, "Configuration file overriding the scenario's");
    campaign->add_option("--out", opt.out, "Output directory")->required();
    campaign->add_option("--seed", opt.seed, "Master seed");
    campaign->add_option("--trials", opt.trials, "Number of trials");
    campaign->add_option("--threads", opt.threads, "Worker threads (0 = hardware)");
    campaign->add_option("--target-fa", opt.target_fa, "Target false-alarm probability for calibration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (pattern->parsed()) {
            const auto cfg = load_config(opt.config);
            const auto text = pattern_to_text(full_pattern(cfg, opt.n0));
            if (opt.out.empty())
                out << text;
            else
                write_text(opt.out, text);
        } else if (generate_cmd->parsed()) {
            const auto cfg = load_config(opt.config);
            const auto pat = full_pattern(cfg, opt.n0);
            const auto buf = generate(cfg, pat, default_sequence(static_cast<std::size_t>(cfg.preamble_groups)));
            make_dir(opt.out);
            KeyValueFile meta = config_to_keyvalue(cfg);
            meta.set("n0", std::to_string(opt.n0));
            const auto path = (std::filesystem::path(opt.out) / ("preamble_n0_" + std::to_string(opt.n0) + ".cf32")).string();
            dump_iq(path, buf, meta);
            out << path << "\n";
        } else if (calibrate->parsed()) {
            Scenario scn = scenario_for(opt, calibrate);
            if (opt.trials)
                scn.calibration_trials = *opt.trials;
            const double threshold = calibrate_scenario(scn, resolve_threads(opt.threads));
            out << "threshold = " << format_double(threshold) << "\n";
            if (!opt.out.empty()) {
                make_dir(opt.out);
                write_text(std::filesystem::path(opt.out) / "threshold.txt", format_double(threshold) + "\n");
            }
        } else if (campaign->parsed()) {
            Scenario scn = scenario_for(opt, campaign);
            if (opt.trials)
                scn.n_trials = *opt.trials;
            const int threads = resolve_threads(opt.threads);
            const double threshold = scn.threshold ? *scn.threshold : calibrate_scenario(scn, threads);
            const auto result = run_campaign(scn, threshold, threads);
            export_campaign(result, opt.out);
            const auto& st = result.stats;
            out << "mode = " << to_string(scn.mode) << "\n"
                << "trials = " << st.trials << "\n"
                << "threshold = " << format_double(st.threshold) << "\n";
            if (scn.mode == CampaignMode::FalseAlarm)
                out << "false_alarms = " << st.false_alarms << "\n";
            else
                out << "misdetections = " << st.misdetections << "\n"
                    << "toa_within_3us = " << format_double(st.toa_within_3us) << "\n";
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace nprach
