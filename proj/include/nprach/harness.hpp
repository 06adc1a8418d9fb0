#pragma once

#include "nprach/channel.hpp"
#include "nprach/keyvalue.hpp"
#include "nprach/numerology.hpp"
#include "nprach/receiver.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nprach {

enum class CoverageClass { C1, C2, C3, Custom };
enum class CampaignMode { Detection, FalseAlarm, ToaSweep };
// TwoPoint draws -v or +v with equal probability; Interval draws from [-v, v].
enum class DrawMode { TwoPoint, Interval };
// Sample: snr_db is per sample over the N*B band. Subcarrier: snr_db is
// measured in one subcarrier, i.e. 10 log10(N) dB above the per-sample value.
enum class SnrReference { Sample, Subcarrier };

std::string to_string(CoverageClass c);
std::string to_string(CampaignMode m);
std::string to_string(DrawMode d);
std::string to_string(SnrReference r);

struct Scenario {
    NprachConfig cfg;
    CoverageClass coverage_class = CoverageClass::Custom;
    CampaignMode mode = CampaignMode::Detection;
    std::size_t n_trials = 2000;
    std::uint64_t master_seed = 1;

    double snr_db = 14.25;
    SnrReference snr_reference = SnrReference::Sample;
    FadingModel fading = FadingModel::TypicalUrban;
    double doppler_hz = 1.0;
    int n_rx = 2;
    double cfo_hz = 50.0;
    DrawMode cfo_mode = DrawMode::TwoPoint;
    double drift_hz_per_s = 22.5;
    DrawMode drift_mode = DrawMode::TwoPoint;
    TapProfile tu_profile = typical_urban_profile();
    std::string tu_profile_path;

    std::optional<double> threshold;  // calibrated when empty
    double target_fa = 1e-3;
    std::size_t calibration_trials = 20000;

    double toa_step = 0.125;
    double cfo_min = -60.0;
    double cfo_max = 60.0;
    double cfo_step = 2.5;
    int block_size = 4;

    SearchGrids grids() const;
    double snr_per_sample_db() const;
};

// C1: L = 8 at 14.25 dB, C2: L = 32 at 4.25 dB, C3: L = 128 at -5.75 dB.
void apply_preset(Scenario& scn, CoverageClass c);
Scenario preset_scenario(CoverageClass c);

std::vector<std::string> validate(const Scenario& scn);

// Scenario keys plus every NprachConfig key. coverage_class is applied first,
// explicit keys override it. Unknown keys throw ValidationError.
Scenario scenario_from_keyvalue(const KeyValueFile& kv);
Scenario load_scenario(const std::string& path);
KeyValueFile scenario_to_keyvalue(const Scenario& scn);

struct TrialRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    int n0 = 0;
    double toa_true = 0.0;  // samples
    double toa_est = 0.0;
    bool detected = false;
    double cfo_true = 0.0;
    double drift_true = 0.0;
    double cfo_est = 0.0;
    double metric = 0.0;
    double normalized_metric = 0.0;
    double toa_error_us = 0.0;  // wrapped into [-N/2, N/2) samples, then converted

    bool operator==(const TrialRecord&) const = default;
};

inline constexpr std::array<double, 5> kReportedPercentiles{1.0, 5.0, 50.0, 95.0, 99.0};

struct CampaignStats {
    std::size_t trials = 0;
    std::size_t detections = 0;
    std::size_t misdetections = 0;
    std::size_t false_alarms = 0;
    std::vector<double> toa_errors_us;               // detected trials only
    std::array<double, 5> toa_error_percentiles_us{};  // at kReportedPercentiles, NaN if none
    double toa_within_3us = 0.0;                     // fraction of detected trials
    double threshold = 0.0;
    double wall_time_s = 0.0;

    // Everything except wall_time_s.
    bool same_outcome(const CampaignStats& other) const;
};

struct CampaignResult {
    Scenario scenario;
    CampaignStats stats;
    std::vector<TrialRecord> records;
};

/// One campaign's fixed state: estimator tables, the twelve patterns and the
/// threshold. run_trial is const and safe to call concurrently.
class CampaignRunner {
public:
    CampaignRunner(Scenario scn, double threshold);

    TrialRecord run_trial(std::size_t trial_index) const;
    const Scenario& scenario() const { return scn_; }
    double threshold() const { return threshold_; }

private:
    Scenario scn_;
    DerivedNumerology num_;
    double threshold_;
    Estimator estimator_;
    std::vector<HoppingPattern> patterns_;
    std::vector<ComplexBuffer> waveforms_;  // per start subcarrier
    PreambleSequence seq_;
};

TrialRecord run_trial(const Scenario& scn, double threshold, std::size_t trial_index);

// Seed used for threshold calibration within a campaign, disjoint from the
// trial seeds derive_seed(master_seed, {trial_index}).
std::uint64_t calibration_seed(std::uint64_t master_seed);

// Threshold for the scenario's (L, grids) at its target_fa.
double calibrate_scenario(const Scenario& scn, int threads);

CampaignResult run_campaign(const Scenario& scn, double threshold, int threads = 1);

// Aggregation used by run_campaign; independent of record order.
CampaignStats aggregate(const Scenario& scn, const std::vector<TrialRecord>& records, double threshold);

std::string trials_csv(const std::vector<TrialRecord>& records);
std::string summary_json(const CampaignResult& result);

// Writes <dir>/summary.json and <dir>/trials.csv, creating dir if needed.
void export_campaign(const CampaignResult& result, const std::string& dir);

std::string software_version();

}  // namespace nprach
