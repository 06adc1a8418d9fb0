#include "nprach/receiver.hpp"

#include "nprach/errors.hpp"
#include "nprach/parallel.hpp"
#include "nprach/rng.hpp"
#include "nprach/stats.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <numbers>

namespace nprach {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Pair {
    int p;
    int q;
    int delta;  // pattern[p] - pattern[q] >= 0
};

std::vector<Pair> block_pairs(const HoppingPattern& pattern, int block_size)
{
    std::vector<Pair> pairs;
    const int groups = static_cast<int>(pattern.size());
    for (int start = 0; start < groups; start += block_size) {
        for (int a = start; a < start + block_size; ++a) {
            for (int b = a + 1; b < start + block_size; ++b) {
                const int delta = pattern[a] - pattern[b];
                if (delta >= 0)
                    pairs.push_back({a, b, delta});
                else
                    pairs.push_back({b, a, -delta});
            }
        }
    }
    return pairs;
}

// Better hypothesis under the tie rule: larger J, then smaller D, then smaller |cfo|.
bool better(double j, double toa, double cfo, const DetectionResult& best)
{
    if (j != best.metric)
        return j > best.metric;
    if (toa != best.toa_samples)
        return toa < best.toa_samples;
    return std::abs(cfo) < std::abs(best.cfo_hz);
}

void check_inputs(const ReceiveGrid& grid, const PreambleSequence& seq, const HoppingPattern& pattern,
                  const NprachConfig& cfg)
{
    const int groups = cfg.preamble_groups;
    if (grid.groups() != groups || grid.repeats() != cfg.repeats_per_group)
        throw ValidationError("receive grid shape does not match the configuration");
    if (static_cast<int>(seq.size()) != groups || static_cast<int>(pattern.size()) != groups)
        throw ValidationError("sequence/pattern length does not match L");
    for (int idx : pattern.indices) {
        if (idx < 0 || idx >= cfg.band_subcarriers)
            throw ValidationError("pattern index outside the NPRACH band");
    }
}

}  // namespace

double ReceiveGrid::energy() const
{
    double e = 0.0;
    for (const auto& y : data_)
        e += std::norm(y);
    return e;
}

void ReceiveGrid::scale(cdouble c)
{
    for (auto& y : data_)
        y *= c;
}

SearchGrids SearchGrids::uniform(const NprachConfig& cfg, double toa_step, double cfo_min, double cfo_max,
                                 double cfo_step, int block_size)
{
    if (!(toa_step > 0.0) || !(cfo_step > 0.0) || cfo_max < cfo_min)
        throw ValidationError("search grid steps must be positive and cfo_min <= cfo_max");
    const auto num = derive(cfg);
    SearchGrids g;
    g.block_size = block_size;
    for (long long d = 0;; ++d) {
        const double toa = static_cast<double>(d) * toa_step;
        if (toa >= num.cp_samples)
            break;
        g.toa_grid.push_back(toa);
    }
    const auto n_cfo = static_cast<long long>(std::floor((cfo_max - cfo_min) / cfo_step + 1e-9));
    for (long long c = 0; c <= n_cfo; ++c)
        g.cfo_grid.push_back(cfo_min + static_cast<double>(c) * cfo_step);
    return g;
}

SearchGrids SearchGrids::defaults(const NprachConfig& cfg)
{
    return uniform(cfg, 0.125, -60.0, 60.0, 2.5, 4);
}

std::vector<std::string> validate(const SearchGrids& grids, const NprachConfig& cfg)
{
    std::vector<std::string> errors;
    const auto num = derive(cfg);
    if (grids.toa_grid.empty() || grids.cfo_grid.empty())
        errors.push_back("search grids must be nonempty");
    for (double d : grids.toa_grid) {
        if (!(d >= 0.0 && d < num.cp_samples)) {
            errors.push_back("toa grid point " + format_double(d) + " outside [0, N_cp)");
            break;
        }
    }
    if (grids.block_size < 1 || cfg.preamble_groups % grids.block_size != 0)
        errors.push_back("block size Q = " + std::to_string(grids.block_size) + " does not divide L = " +
                         std::to_string(cfg.preamble_groups));
    return errors;
}

std::string to_json(const DetectionResult& result)
{
    nlohmann::ordered_json j;
    j["detected"] = result.detected;
    j["toa_us"] = result.toa_seconds * 1e6;
    j["cfo_hz"] = result.cfo_hz;
    j["metric"] = result.metric;
    j["normalized_metric"] = result.normalized_metric;
    return j.dump();
}

ReceiveGrid demodulate(const RxBuffers& rx, const NprachConfig& cfg, const HoppingPattern& pattern)
{
    const auto num = derive(cfg);
    const int n_fft = cfg.fft_size;
    const int groups = cfg.preamble_groups;
    const int repeats = cfg.repeats_per_group;
    if (static_cast<int>(pattern.size()) != groups)
        throw ValidationError("pattern length does not match L");
    for (const auto& ant : rx.antennas) {
        if (ant.size() != num.preamble_samples)
            throw ValidationError("received buffer has " + std::to_string(ant.size()) + " samples, expected " +
                                  std::to_string(num.preamble_samples));
    }

    std::vector<cdouble> twiddle(n_fft);
    for (int r = 0; r < n_fft; ++r)
        twiddle[r] = std::polar(1.0, -kTwoPi * r / n_fft);

    // Only the tone bin of each N-point DFT is needed, so it is evaluated directly.
    ReceiveGrid grid(static_cast<int>(rx.n_rx()), groups, repeats);
    for (int a = 0; a < static_cast<int>(rx.n_rx()); ++a) {
        const auto& x = rx.antennas[a].samples;
        for (int m = 0; m < groups; ++m) {
            const int bin = cfg.band_offset + pattern[m];
            for (int i = 0; i < repeats; ++i) {
                const std::size_t offset = static_cast<std::size_t>(m) * num.group_samples + num.cp_samples +
                                           static_cast<std::size_t>(i) * n_fft;
                cdouble acc{};
                for (int n = 0; n < n_fft; ++n)
                    acc += x[offset + n] * twiddle[(bin * n) % n_fft];
                grid.at(a, m, i) = acc;
            }
        }
    }
    return grid;
}

cdouble dirichlet_gain(double delta_f_norm, double delay_samples, int fft_size, double energy)
{
    const double n = fft_size;
    const double x = std::numbers::pi * delta_f_norm;
    // Near integer delta_f the ratio is 0/0; its limit is cos(N x) / cos(x).
    const double amplitude =
        std::abs(std::sin(x)) < 1e-12 ? std::cos(n * x) / std::cos(x) : std::sin(n * x) / (n * std::sin(x));
    return std::sqrt(energy) * amplitude * std::polar(1.0, kTwoPi * delta_f_norm * ((n - 1.0) / 2.0 - delay_samples));
}

double metric(const ReceiveGrid& grid, const PreambleSequence& seq, const HoppingPattern& pattern,
              double delay_samples, double cfo_hz, int block_size, const NprachConfig& cfg)
{
    if (block_size < 1 || cfg.preamble_groups % block_size != 0)
        throw ValidationError("block size Q must divide L");
    check_inputs(grid, seq, pattern, cfg);
    const auto num = derive(cfg);
    const double df = cfo_hz / num.sample_rate_hz;
    const int n_fft = cfg.fft_size;

    double total = 0.0;
    for (int a = 0; a < grid.n_rx(); ++a) {
        for (int g = 0; g < cfg.preamble_groups / block_size; ++g) {
            cdouble jg{};
            for (int m = g * block_size; m < (g + 1) * block_size; ++m) {
                const cdouble toa_phase = std::polar(1.0, kTwoPi * pattern[m] * delay_samples / n_fft);
                for (int i = 0; i < grid.repeats(); ++i) {
                    const double t = static_cast<double>(m) * num.group_samples + static_cast<double>(i) * n_fft;
                    jg += grid.at(a, m, i) * std::conj(seq.symbols[m]) * std::polar(1.0, -kTwoPi * df * t) *
                          toa_phase;
                }
            }
            total += std::norm(jg);
        }
    }
    return total;
}

Estimator::Estimator(const NprachConfig& cfg, SearchGrids grids)
    : cfg_(cfg), num_(derive(cfg)), grids_(std::move(grids)), max_delta_(cfg.band_subcarriers - 1)
{
    require_valid(cfg);
    const auto errors = validate(grids_, cfg);
    if (!errors.empty())
        throw ValidationError("invalid search grids: " + errors.front());

    const int groups = cfg.preamble_groups;
    const int repeats = cfg.repeats_per_group;
    cfo_phase_.resize(grids_.cfo_grid.size() * groups * repeats);
    for (std::size_t c = 0; c < grids_.cfo_grid.size(); ++c) {
        const double df = grids_.cfo_grid[c] / num_.sample_rate_hz;
        for (int m = 0; m < groups; ++m) {
            for (int i = 0; i < repeats; ++i) {
                const double t = static_cast<double>(m) * num_.group_samples + static_cast<double>(i) * cfg.fft_size;
                cfo_phase_[(c * groups + m) * repeats + i] = std::polar(1.0, -kTwoPi * df * t);
            }
        }
    }

    const std::size_t n_toa = grids_.toa_grid.size();
    toa_cos_.resize(static_cast<std::size_t>(max_delta_) * n_toa);
    toa_sin_.resize(toa_cos_.size());
    for (int delta = 1; delta <= max_delta_; ++delta) {
        for (std::size_t d = 0; d < n_toa; ++d) {
            const double phase = kTwoPi * delta * grids_.toa_grid[d] / cfg.fft_size;
            toa_cos_[(delta - 1) * n_toa + d] = std::cos(phase);
            toa_sin_[(delta - 1) * n_toa + d] = std::sin(phase);
        }
    }
}

MetricSurface Estimator::surface(const ReceiveGrid& grid, const PreambleSequence& seq,
                                 const HoppingPattern& pattern) const
{
    check_inputs(grid, seq, pattern, cfg_);
    const int groups = cfg_.preamble_groups;
    const int repeats = cfg_.repeats_per_group;
    const int n_rx = grid.n_rx();
    const auto pairs = block_pairs(pattern, grids_.block_size);

    MetricSurface s;
    s.n_toa = grids_.toa_grid.size();
    s.n_cfo = grids_.cfo_grid.size();
    s.values.resize(s.n_toa * s.n_cfo);
    s.grid_energy = grid.energy();

    std::vector<cdouble> z(static_cast<std::size_t>(n_rx) * groups);
    std::vector<cdouble> coef(static_cast<std::size_t>(max_delta_) + 1);
    for (std::size_t c = 0; c < s.n_cfo; ++c) {
        const cdouble* phase = &cfo_phase_[c * groups * repeats];
        for (int a = 0; a < n_rx; ++a) {
            for (int m = 0; m < groups; ++m) {
                cdouble acc{};
                for (int i = 0; i < repeats; ++i)
                    acc += grid.at(a, m, i) * phase[m * repeats + i];
                z[a * groups + m] = acc * std::conj(seq.symbols[m]);
            }
        }

        std::fill(coef.begin(), coef.end(), cdouble{});
        double diagonal = 0.0;
        for (const auto& v : z)
            diagonal += std::norm(v);
        for (int a = 0; a < n_rx; ++a) {
            const cdouble* za = &z[a * groups];
            for (const auto& pr : pairs)
                coef[pr.delta] += za[pr.p] * std::conj(za[pr.q]);
        }
        const double base = diagonal + 2.0 * coef[0].real();

        double* row = &s.values[c * s.n_toa];
        std::fill(row, row + s.n_toa, base);
        for (int delta = 1; delta <= max_delta_; ++delta) {
            const double re = 2.0 * coef[delta].real();
            const double im = 2.0 * coef[delta].imag();
            if (re == 0.0 && im == 0.0)
                continue;
            const double* cs = &toa_cos_[(delta - 1) * s.n_toa];
            const double* sn = &toa_sin_[(delta - 1) * s.n_toa];
            for (std::size_t d = 0; d < s.n_toa; ++d)
                row[d] += re * cs[d] - im * sn[d];
        }
    }
    return s;
}

DetectionResult Estimator::estimate(const ReceiveGrid& grid, const PreambleSequence& seq,
                                    const HoppingPattern& pattern) const
{
    const auto s = surface(grid, seq, pattern);
    DetectionResult best;
    best.metric = -INFINITY;
    for (std::size_t c = 0; c < s.n_cfo; ++c) {
        for (std::size_t d = 0; d < s.n_toa; ++d) {
            const double j = s.value(c, d);
            if (better(j, grids_.toa_grid[d], grids_.cfo_grid[c], best)) {
                best.metric = j;
                best.toa_samples = grids_.toa_grid[d];
                best.cfo_hz = grids_.cfo_grid[c];
            }
        }
    }
    // Rounding in the difference expansion can leave a noiseless zero slightly negative.
    best.metric = std::max(best.metric, 0.0);
    best.toa_seconds = best.toa_samples / num_.sample_rate_hz;
    best.normalized_metric = s.grid_energy > 0.0 ? best.metric / s.grid_energy : 0.0;
    return best;
}

DetectionResult estimate(const ReceiveGrid& grid, const PreambleSequence& seq, const HoppingPattern& pattern,
                         const SearchGrids& grids, const NprachConfig& cfg)
{
    return Estimator(cfg, grids).estimate(grid, seq, pattern);
}

DetectionResult exhaustive_estimate(const ReceiveGrid& grid, const PreambleSequence& seq,
                                    const HoppingPattern& pattern, const SearchGrids& grids,
                                    const NprachConfig& cfg)
{
    const auto errors = validate(grids, cfg);
    if (!errors.empty())
        throw ValidationError("invalid search grids: " + errors.front());
    DetectionResult best;
    best.metric = -INFINITY;
    for (double cfo : grids.cfo_grid) {
        for (double toa : grids.toa_grid) {
            const double j = metric(grid, seq, pattern, toa, cfo, grids.block_size, cfg);
            if (better(j, toa, cfo, best)) {
                best.metric = j;
                best.toa_samples = toa;
                best.cfo_hz = cfo;
            }
        }
    }
    const double energy = grid.energy();
    best.toa_seconds = best.toa_samples / derive(cfg).sample_rate_hz;
    best.normalized_metric = energy > 0.0 ? best.metric / energy : 0.0;
    return best;
}

DetectionResult detect(DetectionResult result, double threshold)
{
    result.detected = result.normalized_metric > threshold;
    return result;
}

RxBuffers noise_only_rx(const NprachConfig& cfg, int n_rx, double noise_var, std::uint64_t seed)
{
    const auto num = derive(cfg);
    RxBuffers rx;
    const ComplexBuffer silent{std::vector<cdouble>(num.preamble_samples), num.sample_rate_hz};
    for (int a = 0; a < n_rx; ++a) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(StreamRole::Noise)}));
        // add_awgn with tx_power = noise_var and 0 dB SNR yields variance noise_var.
        rx.antennas.push_back(add_awgn(silent, 0.0, noise_var, rng));
        rx.fading.emplace_back();
    }
    return rx;
}

std::vector<double> noise_metrics(const Estimator& estimator, const NprachConfig& cfg, std::size_t n_trials,
                                  std::uint64_t seed, const CalibrationOptions& opts)
{
    if (opts.n_rx < 1)
        throw ValidationError("n_rx must be >= 1");
    std::array<HoppingPattern, kHopBand> patterns;
    for (int n0 = 0; n0 < kHopBand; ++n0)
        patterns[n0] = full_pattern(cfg, n0);
    const auto seq = default_sequence(static_cast<std::size_t>(cfg.preamble_groups));

    std::vector<double> out(n_trials);
    parallel_for(n_trials, opts.threads, [&](std::size_t t) {
        const std::uint64_t trial_seed = derive_seed(seed, {t});
        Rng draw(derive_seed(trial_seed, {0}));
        const int n0 = std::uniform_int_distribution<int>(0, kHopBand - 1)(draw);
        const auto rx = noise_only_rx(cfg, opts.n_rx, opts.noise_variance, trial_seed);
        const auto grid = demodulate(rx, cfg, patterns[n0]);
        out[t] = estimator.estimate(grid, seq, patterns[n0]).normalized_metric;
    });
    return out;
}

double calibrate_threshold(const NprachConfig& cfg, const SearchGrids& grids, double target_fa,
                           std::size_t n_trials, std::uint64_t seed, const CalibrationOptions& opts)
{
    if (!(target_fa > 0.0 && target_fa < 1.0))
        throw ValidationError("target false-alarm rate must lie in (0, 1)");
    if (n_trials < 100)
        throw ValidationError("calibration needs at least 100 noise trials (got " + std::to_string(n_trials) + ")");
    const Estimator estimator(cfg, grids);
    return empirical_quantile(noise_metrics(estimator, cfg, n_trials, seed, opts), 1.0 - target_fa);
}

}  // namespace nprach
