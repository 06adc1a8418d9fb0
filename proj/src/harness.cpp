#include "nprach/harness.hpp"

#include "nprach/errors.hpp"
#include "nprach/parallel.hpp"
#include "nprach/rng.hpp"
#include "nprach/stats.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#ifndef NPRACH_VERSION
#define NPRACH_VERSION "0.0.0"
#endif

namespace nprach {

namespace {

constexpr std::uint64_t kCalibrationStream = 0xca11b7a7e5eedull;

const std::vector<std::string>& scenario_keys()
{
    static const std::vector<std::string> keys{
        "coverage_class", "mode",        "n_trials",       "master_seed",        "snr_db",
        "snr_reference",  "fading",      "doppler_hz",     "n_rx",               "cfo_hz",
        "cfo_mode",       "drift_hz_per_s", "drift_mode",  "tu_profile",         "threshold",
        "target_fa",      "calibration_trials", "toa_step", "cfo_min",           "cfo_max",
        "cfo_step",       "block_size",
    };
    return keys;
}

CoverageClass parse_coverage_class(const std::string& s)
{
    if (s == "C1")
        return CoverageClass::C1;
    if (s == "C2")
        return CoverageClass::C2;
    if (s == "C3")
        return CoverageClass::C3;
    if (s == "custom")
        return CoverageClass::Custom;
    throw ValidationError("coverage_class must be C1, C2, C3 or custom (got '" + s + "')");
}

CampaignMode parse_mode(const std::string& s)
{
    if (s == "detection")
        return CampaignMode::Detection;
    if (s == "false_alarm")
        return CampaignMode::FalseAlarm;
    if (s == "toa_sweep")
        return CampaignMode::ToaSweep;
    throw ValidationError("mode must be detection, false_alarm or toa_sweep (got '" + s + "')");
}

DrawMode parse_draw_mode(const std::string& s)
{
    if (s == "two_point")
        return DrawMode::TwoPoint;
    if (s == "interval")
        return DrawMode::Interval;
    throw ValidationError("draw mode must be two_point or interval (got '" + s + "')");
}

SnrReference parse_snr_reference(const std::string& s)
{
    if (s == "sample")
        return SnrReference::Sample;
    if (s == "subcarrier")
        return SnrReference::Subcarrier;
    throw ValidationError("snr_reference must be sample or subcarrier (got '" + s + "')");
}

double draw(double magnitude, DrawMode mode, Rng& rng)
{
    if (magnitude == 0.0)
        return 0.0;
    if (mode == DrawMode::TwoPoint)
        return std::bernoulli_distribution(0.5)(rng) ? magnitude : -magnitude;
    return std::uniform_real_distribution<double>(-magnitude, magnitude)(rng);
}

std::size_t get_count(const KeyValueFile& kv, const std::string& key)
{
    const long long v = kv.get_int(key);
    if (v < 0)
        throw ValidationError(kv.origin() + ": '" + key + "' must be >= 0");
    return static_cast<std::size_t>(v);
}

}  // namespace

std::string to_string(CoverageClass c)
{
    switch (c) {
    case CoverageClass::C1:
        return "C1";
    case CoverageClass::C2:
        return "C2";
    case CoverageClass::C3:
        return "C3";
    case CoverageClass::Custom:
        return "custom";
    }
    return "?";
}

std::string to_string(CampaignMode m)
{
    switch (m) {
    case CampaignMode::Detection:
        return "detection";
    case CampaignMode::FalseAlarm:
        return "false_alarm";
    case CampaignMode::ToaSweep:
        return "toa_sweep";
    }
    return "?";
}

std::string to_string(DrawMode d)
{
    return d == DrawMode::TwoPoint ? "two_point" : "interval";
}

std::string to_string(SnrReference r)
{
    return r == SnrReference::Sample ? "sample" : "subcarrier";
}

SearchGrids Scenario::grids() const
{
    return SearchGrids::uniform(cfg, toa_step, cfo_min, cfo_max, cfo_step, block_size);
}

double Scenario::snr_per_sample_db() const
{
    if (snr_reference == SnrReference::Sample)
        return snr_db;
    return snr_db - 10.0 * std::log10(static_cast<double>(cfg.fft_size));
}

void apply_preset(Scenario& scn, CoverageClass c)
{
    scn.coverage_class = c;
    switch (c) {
    case CoverageClass::C1:
        scn.cfg.preamble_groups = 8;
        scn.snr_db = 14.25;
        break;
    case CoverageClass::C2:
        scn.cfg.preamble_groups = 32;
        scn.snr_db = 4.25;
        break;
    case CoverageClass::C3:
        scn.cfg.preamble_groups = 128;
        scn.snr_db = -5.75;
        break;
    case CoverageClass::Custom:
        break;
    }
}

Scenario preset_scenario(CoverageClass c)
{
    Scenario scn;
    apply_preset(scn, c);
    return scn;
}

std::vector<std::string> validate(const Scenario& scn)
{
    auto errors = validate(scn.cfg);
    if (!errors.empty())
        return errors;
    if (scn.cfg.band_subcarriers != kHopBand)
        errors.push_back("hopping requires band_subcarriers = 12");
    if (scn.n_rx < 1)
        errors.push_back("n_rx must be >= 1");
    if (!(scn.doppler_hz >= 0.0))
        errors.push_back("doppler_hz must be >= 0");
    if (std::isnan(scn.snr_db))
        errors.push_back("snr_db is NaN");
    if (!(scn.cfo_hz >= 0.0) || !(scn.drift_hz_per_s >= 0.0))
        errors.push_back("cfo_hz and drift_hz_per_s are magnitudes and must be >= 0");
    if (!(scn.target_fa > 0.0 && scn.target_fa < 1.0))
        errors.push_back("target_fa must lie in (0, 1)");
    if (!scn.threshold && scn.calibration_trials < 100)
        errors.push_back("calibration_trials must be >= 100");
    if (scn.threshold && !(*scn.threshold > 0.0))
        errors.push_back("threshold must be > 0");
    if (!(scn.toa_step > 0.0) || !(scn.cfo_step > 0.0) || scn.cfo_max < scn.cfo_min) {
        errors.push_back("search grid steps must be positive and cfo_min <= cfo_max");
    } else {
        for (auto& e : validate(scn.grids(), scn.cfg))
            errors.push_back(std::move(e));
    }
    return errors;
}

Scenario scenario_from_keyvalue(const KeyValueFile& kv)
{
    std::vector<std::string> known = scenario_keys();
    known.insert(known.end(), config_keys().begin(), config_keys().end());
    const auto unknown = kv.unknown_keys(known);
    if (!unknown.empty())
        throw ValidationError(kv.origin() + ": unknown scenario key '" + unknown.front() + "'");

    Scenario scn;
    if (kv.contains("coverage_class"))
        apply_preset(scn, parse_coverage_class(kv.at("coverage_class")));

    KeyValueFile cfg_kv;
    for (const auto& key : config_keys()) {
        if (kv.contains(key))
            cfg_kv.set(key, kv.at(key));
    }
    scn.cfg = config_from_keyvalue(cfg_kv, scn.cfg);

    auto get_double = [&](const char* key, double& field) {
        if (kv.contains(key))
            field = kv.get_double(key);
    };
    if (kv.contains("mode"))
        scn.mode = parse_mode(kv.at("mode"));
    if (kv.contains("n_trials"))
        scn.n_trials = get_count(kv, "n_trials");
    if (kv.contains("master_seed"))
        scn.master_seed = static_cast<std::uint64_t>(kv.get_int("master_seed"));
    get_double("snr_db", scn.snr_db);
    if (kv.contains("snr_reference"))
        scn.snr_reference = parse_snr_reference(kv.at("snr_reference"));
    if (kv.contains("fading"))
        scn.fading = parse_fading_model(kv.at("fading"));
    get_double("doppler_hz", scn.doppler_hz);
    if (kv.contains("n_rx"))
        scn.n_rx = static_cast<int>(kv.get_int("n_rx"));
    get_double("cfo_hz", scn.cfo_hz);
    if (kv.contains("cfo_mode"))
        scn.cfo_mode = parse_draw_mode(kv.at("cfo_mode"));
    get_double("drift_hz_per_s", scn.drift_hz_per_s);
    if (kv.contains("drift_mode"))
        scn.drift_mode = parse_draw_mode(kv.at("drift_mode"));
    if (kv.contains("tu_profile")) {
        scn.tu_profile_path = kv.at("tu_profile");
        scn.tu_profile = load_tap_profile(scn.tu_profile_path);
    }
    if (kv.contains("threshold"))
        scn.threshold = kv.get_double("threshold");
    get_double("target_fa", scn.target_fa);
    if (kv.contains("calibration_trials"))
        scn.calibration_trials = get_count(kv, "calibration_trials");
    get_double("toa_step", scn.toa_step);
    get_double("cfo_min", scn.cfo_min);
    get_double("cfo_max", scn.cfo_max);
    get_double("cfo_step", scn.cfo_step);
    if (kv.contains("block_size"))
        scn.block_size = static_cast<int>(kv.get_int("block_size"));
    return scn;
}

Scenario load_scenario(const std::string& path)
{
    return scenario_from_keyvalue(KeyValueFile::load(path));
}

KeyValueFile scenario_to_keyvalue(const Scenario& scn)
{
    KeyValueFile kv = config_to_keyvalue(scn.cfg);
    kv.set("coverage_class", to_string(scn.coverage_class));
    kv.set("mode", to_string(scn.mode));
    kv.set("n_trials", std::to_string(scn.n_trials));
    kv.set("master_seed", std::to_string(scn.master_seed));
    kv.set("snr_db", format_double(scn.snr_db));
    kv.set("snr_reference", to_string(scn.snr_reference));
    kv.set("fading", to_string(scn.fading));
    kv.set("doppler_hz", format_double(scn.doppler_hz));
    kv.set("n_rx", std::to_string(scn.n_rx));
    kv.set("cfo_hz", format_double(scn.cfo_hz));
    kv.set("cfo_mode", to_string(scn.cfo_mode));
    kv.set("drift_hz_per_s", format_double(scn.drift_hz_per_s));
    kv.set("drift_mode", to_string(scn.drift_mode));
    if (!scn.tu_profile_path.empty())
        kv.set("tu_profile", scn.tu_profile_path);
    if (scn.threshold)
        kv.set("threshold", format_double(*scn.threshold));
    kv.set("target_fa", format_double(scn.target_fa));
    kv.set("calibration_trials", std::to_string(scn.calibration_trials));
    kv.set("toa_step", format_double(scn.toa_step));
    kv.set("cfo_min", format_double(scn.cfo_min));
    kv.set("cfo_max", format_double(scn.cfo_max));
    kv.set("cfo_step", format_double(scn.cfo_step));
    kv.set("block_size", std::to_string(scn.block_size));
    return kv;
}

bool CampaignStats::same_outcome(const CampaignStats& o) const
{
    auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
    if (trials != o.trials || detections != o.detections || misdetections != o.misdetections ||
        false_alarms != o.false_alarms || toa_errors_us != o.toa_errors_us || !same(toa_within_3us, o.toa_within_3us) ||
        threshold != o.threshold)
        return false;
    for (std::size_t k = 0; k < toa_error_percentiles_us.size(); ++k) {
        if (!same(toa_error_percentiles_us[k], o.toa_error_percentiles_us[k]))
            return false;
    }
    return true;
}

CampaignRunner::CampaignRunner(Scenario scn, double threshold)
    : scn_(std::move(scn)), num_(derive(scn_.cfg)), threshold_(threshold),
      estimator_(scn_.cfg, scn_.grids()), seq_(default_sequence(static_cast<std::size_t>(scn_.cfg.preamble_groups)))
{
    const auto errors = validate(scn_);
    if (!errors.empty())
        throw ValidationError("invalid scenario: " + errors.front());
    for (int n0 = 0; n0 < kHopBand; ++n0) {
        patterns_.push_back(full_pattern(scn_.cfg, n0));
        waveforms_.push_back(generate(scn_.cfg, patterns_.back(), seq_));
    }
}

TrialRecord CampaignRunner::run_trial(std::size_t trial_index) const
{
    const auto& cfg = scn_.cfg;
    TrialRecord rec;
    rec.index = trial_index;
    rec.seed = derive_seed(scn_.master_seed, {trial_index});
    Rng rng(derive_seed(rec.seed, {0}));

    if (scn_.mode == CampaignMode::ToaSweep)
        rec.toa_true = (static_cast<double>(trial_index) + 0.5) * num_.cp_samples / static_cast<double>(scn_.n_trials);
    else
        rec.toa_true = std::uniform_real_distribution<double>(0.0, num_.cp_samples)(rng);
    rec.n0 = std::uniform_int_distribution<int>(0, kHopBand - 1)(rng);
    rec.cfo_true = draw(scn_.cfo_hz, scn_.cfo_mode, rng);
    rec.drift_true = draw(scn_.drift_hz_per_s, scn_.drift_mode, rng);

    const double tx_power = cfg.tx_energy_per_sample / (static_cast<double>(cfg.fft_size) * cfg.fft_size);
    const std::uint64_t channel_seed = derive_seed(rec.seed, {1});
    const auto& pattern = patterns_[rec.n0];

    RxBuffers rx;
    if (scn_.mode == CampaignMode::FalseAlarm) {
        rec.toa_true = 0.0;
        rec.cfo_true = 0.0;
        rec.drift_true = 0.0;
        rx = noise_only_rx(cfg, scn_.n_rx, noise_variance(scn_.snr_per_sample_db(), tx_power), channel_seed);
    } else {
        ChannelConfig ch;
        ch.delay_samples = rec.toa_true;
        ch.cfo_hz = rec.cfo_true;
        ch.drift_hz_per_s = rec.drift_true;
        ch.snr_db = scn_.snr_per_sample_db();
        ch.fading = scn_.fading;
        ch.doppler_hz = scn_.doppler_hz;
        ch.n_rx = scn_.n_rx;
        ch.seed = channel_seed;
        ch.tu_profile = scn_.tu_profile;
        rx = propagate(waveforms_[rec.n0], ch, cfg);
    }

    const auto grid = demodulate(rx, cfg, pattern);
    const auto result = detect(estimator_.estimate(grid, seq_, pattern), threshold_);
    rec.detected = result.detected;
    rec.toa_est = result.toa_samples;
    rec.cfo_est = result.cfo_hz;
    rec.metric = result.metric;
    rec.normalized_metric = result.normalized_metric;

    // D and D + N are indistinguishable, so the error is taken modulo N.
    const double n = cfg.fft_size;
    double err = rec.toa_est - rec.toa_true;
    err -= n * std::floor(err / n + 0.5);
    rec.toa_error_us = err / num_.sample_rate_hz * 1e6;
    return rec;
}

TrialRecord run_trial(const Scenario& scn, double threshold, std::size_t trial_index)
{
    return CampaignRunner(scn, threshold).run_trial(trial_index);
}

std::uint64_t calibration_seed(std::uint64_t master_seed)
{
    return derive_seed(master_seed, {kCalibrationStream});
}

double calibrate_scenario(const Scenario& scn, int threads)
{
    CalibrationOptions opts;
    opts.n_rx = scn.n_rx;
    opts.threads = threads;
    return calibrate_threshold(scn.cfg, scn.grids(), scn.target_fa, scn.calibration_trials,
                               calibration_seed(scn.master_seed), opts);
}

CampaignStats aggregate(const Scenario& scn, const std::vector<TrialRecord>& records, double threshold)
{
    std::vector<const TrialRecord*> ordered;
    ordered.reserve(records.size());
    for (const auto& r : records)
        ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->index < b->index; });

    CampaignStats st;
    st.trials = records.size();
    st.threshold = threshold;
    for (const auto* r : ordered) {
        if (scn.mode == CampaignMode::FalseAlarm) {
            st.false_alarms += r->detected ? 1 : 0;
            continue;
        }
        if (r->detected) {
            ++st.detections;
            st.toa_errors_us.push_back(r->toa_error_us);
        } else {
            ++st.misdetections;
        }
    }
    st.toa_error_percentiles_us.fill(NAN);
    st.toa_within_3us = NAN;
    if (!st.toa_errors_us.empty()) {
        for (std::size_t k = 0; k < kReportedPercentiles.size(); ++k)
            st.toa_error_percentiles_us[k] = empirical_quantile(st.toa_errors_us, kReportedPercentiles[k] / 100.0);
        const auto within = std::count_if(st.toa_errors_us.begin(), st.toa_errors_us.end(),
                                          [](double e) { return std::abs(e) <= 3.0; });
        st.toa_within_3us = static_cast<double>(within) / static_cast<double>(st.toa_errors_us.size());
    }
    return st;
}

CampaignResult run_campaign(const Scenario& scn, double threshold, int threads)
{
    const auto start = std::chrono::steady_clock::now();
    const CampaignRunner runner(scn, threshold);
    CampaignResult result;
    result.scenario = scn;
    result.records.resize(scn.n_trials);
    parallel_for(scn.n_trials, threads, [&](std::size_t i) { result.records[i] = runner.run_trial(i); });
    result.stats = aggregate(scn, result.records, threshold);
    result.stats.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string trials_csv(const std::vector<TrialRecord>& records)
{
    std::string out =
        "trial,seed,n0,d_true,d_est,detected,cfo_true,cfo_est,drift_true,metric,normalized_metric,toa_error_us\n";
    for (const auto& r : records) {
        out += std::to_string(r.index) + "," + std::to_string(r.seed) + "," + std::to_string(r.n0) + "," +
               format_double(r.toa_true) + "," + format_double(r.toa_est) + "," + (r.detected ? "1" : "0") + "," +
               format_double(r.cfo_true) + "," + format_double(r.cfo_est) + "," + format_double(r.drift_true) + "," +
               format_double(r.metric) + "," + format_double(r.normalized_metric) + "," +
               format_double(r.toa_error_us) + "\n";
    }
    return out;
}

std::string summary_json(const CampaignResult& result)
{
    const auto& st = result.stats;
    auto number = [](double v) -> nlohmann::ordered_json {
        if (std::isnan(v))
            return nullptr;
        return v;
    };

    nlohmann::ordered_json j;
    j["software_version"] = software_version();
    nlohmann::ordered_json scenario;
    const auto echo = scenario_to_keyvalue(result.scenario);
    for (const auto& [key, value] : echo.entries())
        scenario[key] = value;
    j["scenario"] = scenario;
    j["conventions"] = {
        {"toa_error", "measured on detected trials only, wrapped modulo fft_size samples, in microseconds"},
        {"threshold_domain", "normalized metric J / sum |y|^2"},
    };
    nlohmann::ordered_json s;
    s["trials"] = st.trials;
    s["detections"] = st.detections;
    s["misdetections"] = st.misdetections;
    s["false_alarms"] = st.false_alarms;
    s["misdetection_rate"] = st.trials ? number(double(st.misdetections) / double(st.trials)) : nullptr;
    s["false_alarm_rate"] = st.trials ? number(double(st.false_alarms) / double(st.trials)) : nullptr;
    s["threshold"] = st.threshold;
    s["toa_error_samples"] = st.toa_errors_us.size();
    nlohmann::ordered_json pct;
    for (std::size_t k = 0; k < kReportedPercentiles.size(); ++k)
        pct["p" + std::to_string(static_cast<int>(kReportedPercentiles[k]))] = number(st.toa_error_percentiles_us[k]);
    s["toa_error_percentiles_us"] = pct;
    s["toa_within_3us"] = number(st.toa_within_3us);
    s["wall_time_s"] = st.wall_time_s;
    j["stats"] = s;
    return j.dump(2) + "\n";
}

void export_campaign(const CampaignResult& result, const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory '" + dir + "': " + ec.message());
    auto write = [](const std::filesystem::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open '" + path.string() + "' for writing");
        out << text;
        if (!out)
            throw IoError("write failed on '" + path.string() + "'");
    };
    write(std::filesystem::path(dir) / "summary.json", summary_json(result));
    write(std::filesystem::path(dir) / "trials.csv", trials_csv(result.records));
}

std::string software_version()
{
    return NPRACH_VERSION;
}

}  // namespace nprach
