#pragma once

#include "nprach/channel.hpp"
#include "nprach/hopping.hpp"
#include "nprach/numerology.hpp"
#include "nprach/waveform.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nprach {

/// Demodulated symbols y[antenna][m][i]: the tone bin of repeat i in symbol
/// group m.
class ReceiveGrid {
public:
    ReceiveGrid() = default;
    ReceiveGrid(int n_rx, int groups, int repeats)
        : n_rx_(n_rx), groups_(groups), repeats_(repeats),
          data_(static_cast<std::size_t>(n_rx) * groups * repeats)
    {
    }

    int n_rx() const { return n_rx_; }
    int groups() const { return groups_; }
    int repeats() const { return repeats_; }

    cdouble& at(int a, int m, int i) { return data_[index(a, m, i)]; }
    const cdouble& at(int a, int m, int i) const { return data_[index(a, m, i)]; }

    double energy() const;
    void scale(cdouble c);

private:
    std::size_t index(int a, int m, int i) const
    {
        return (static_cast<std::size_t>(a) * groups_ + m) * repeats_ + i;
    }

    int n_rx_ = 0;
    int groups_ = 0;
    int repeats_ = 0;
    std::vector<cdouble> data_;
};

/// Hypothesis space of the joint search and the block-fading length Q.
struct SearchGrids {
    std::vector<double> toa_grid;  // samples, within [0, N_cp)
    std::vector<double> cfo_grid;  // Hz
    int block_size = 4;

    // ToA 0..N_cp step 0.125 sample, CFO -60..60 Hz step 2.5 Hz, Q = 4.
    static SearchGrids defaults(const NprachConfig& cfg);
    static SearchGrids uniform(const NprachConfig& cfg, double toa_step, double cfo_min, double cfo_max,
                               double cfo_step, int block_size);
};

std::vector<std::string> validate(const SearchGrids& grids, const NprachConfig& cfg);

struct DetectionResult {
    bool detected = false;
    double toa_samples = 0.0;
    double toa_seconds = 0.0;
    double cfo_hz = 0.0;
    double metric = 0.0;
    double normalized_metric = 0.0;

    bool operator==(const DetectionResult&) const = default;
};

// {detected, toa_us, cfo_hz, metric, normalized_metric} as a JSON object.
std::string to_json(const DetectionResult& result);

ReceiveGrid demodulate(const RxBuffers& rx, const NprachConfig& cfg, const HoppingPattern& pattern);

// sqrt(E) sin(N pi df) / (N sin(pi df)) exp(j 2 pi df ((N - 1) / 2 - D)), df
// normalized by the sample rate.
cdouble dirichlet_gain(double delta_f_norm, double delay_samples, int fft_size, double energy);

// Block-noncoherent correlation metric J(D, cfo) evaluated term by term.
double metric(const ReceiveGrid& grid, const PreambleSequence& seq, const HoppingPattern& pattern,
              double delay_samples, double cfo_hz, int block_size, const NprachConfig& cfg);

/// J over the full toa x cfo grid; value(c, d) is J(toa_grid[d], cfo_grid[c]).
struct MetricSurface {
    std::size_t n_toa = 0;
    std::size_t n_cfo = 0;
    std::vector<double> values;
    double grid_energy = 0.0;

    double value(std::size_t c, std::size_t d) const { return values[c * n_toa + d]; }
};

/// Joint ToA/CFO search. Tables depending only on (cfg, grids) are built
/// once; a single Estimator can serve concurrent callers.
///
/// For a fixed CFO hypothesis the per-group sums z[m] are formed first, and
///   sum_g |J_g(D)|^2 = C_0 + 2 Re sum_{delta > 0} C_delta exp(j 2 pi delta D / N)
/// where C_delta collects z[m] z*[m'] over same-block pairs with subcarrier
/// difference delta. The D dimension then costs (band - 1) multiply-adds per
/// grid point regardless of L or the antenna count.
class Estimator {
public:
    Estimator(const NprachConfig& cfg, SearchGrids grids);

    const SearchGrids& grids() const { return grids_; }

    MetricSurface surface(const ReceiveGrid& grid, const PreambleSequence& seq,
                          const HoppingPattern& pattern) const;

    // Argmax of the surface; ties go to the smallest D, then the smallest |cfo|.
    // The decision field is left false.
    DetectionResult estimate(const ReceiveGrid& grid, const PreambleSequence& seq,
                             const HoppingPattern& pattern) const;

private:
    NprachConfig cfg_;
    DerivedNumerology num_;
    SearchGrids grids_;
    int max_delta_ = 0;
    std::vector<cdouble> cfo_phase_;  // [c][m * repeats + i]
    std::vector<double> toa_cos_;     // [delta][d], delta = 1..max_delta
    std::vector<double> toa_sin_;
};

DetectionResult estimate(const ReceiveGrid& grid, const PreambleSequence& seq, const HoppingPattern& pattern,
                         const SearchGrids& grids, const NprachConfig& cfg);

// Reference search evaluating metric() at every hypothesis.
DetectionResult exhaustive_estimate(const ReceiveGrid& grid, const PreambleSequence& seq,
                                    const HoppingPattern& pattern, const SearchGrids& grids,
                                    const NprachConfig& cfg);

// detected = normalized_metric > threshold (strict).
DetectionResult detect(DetectionResult result, double threshold);

// Receiver input with no preamble: AWGN of variance noise_var on every antenna.
RxBuffers noise_only_rx(const NprachConfig& cfg, int n_rx, double noise_var, std::uint64_t seed);

struct CalibrationOptions {
    int n_rx = 2;
    double noise_variance = 1.0;
    int threads = 1;
};

// Normalized metrics of n_trials noise-only receptions, each correlated
// against the pattern of a random start subcarrier. Trial t uses seed
// derive_seed(seed, {t}).
std::vector<double> noise_metrics(const Estimator& estimator, const NprachConfig& cfg, std::size_t n_trials,
                                  std::uint64_t seed, const CalibrationOptions& opts);

// (1 - target_fa) empirical quantile of noise_metrics().
double calibrate_threshold(const NprachConfig& cfg, const SearchGrids& grids, double target_fa,
                           std::size_t n_trials, std::uint64_t seed, const CalibrationOptions& opts = {});

}  // namespace nprach
