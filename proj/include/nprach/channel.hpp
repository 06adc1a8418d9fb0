#pragma once

#include "nprach/numerology.hpp"
#include "nprach/rng.hpp"
#include "nprach/waveform.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nprach {

enum class FadingModel { None, FlatRayleigh, TypicalUrban };

std::string to_string(FadingModel model);
FadingModel parse_fading_model(const std::string& text);

struct TapProfile {
    std::vector<double> delays_us;
    std::vector<double> powers_db;
};

// 12-tap Typical Urban profile (same numbers as data/typical_urban_12tap.txt).
const TapProfile& typical_urban_profile();

// "delay_us, relative_power_db" per line; '#' starts a comment line.
TapProfile load_tap_profile(const std::string& path);

struct ChannelConfig {
    double delay_samples = 0.0;
    double cfo_hz = 0.0;
    double drift_hz_per_s = 0.0;
    double snr_db = INFINITY;  // per sample and antenna; +inf disables noise
    FadingModel fading = FadingModel::None;
    double doppler_hz = 0.0;
    int n_rx = 1;
    std::uint64_t seed = 0;
    TapProfile tu_profile = typical_urban_profile();
};

struct RxBuffers {
    std::vector<ComplexBuffer> antennas;
    std::vector<std::vector<cdouble>> fading;

    std::size_t n_rx() const { return antennas.size(); }
    bool operator==(const RxBuffers&) const = default;
};

inline constexpr int kJakesScatterers = 64;

std::vector<std::string> validate(const ChannelConfig& ch, const DerivedNumerology& num);

// Delays by D samples. Integer D shifts with zero fill; fractional D applies a
// linear phase to the DFT of the whole buffer (circular band-limited shift)
// and zeroes the samples that precede the arrival time.
ComplexBuffer apply_delay(const ComplexBuffer& buf, double delay_samples);

// Unit-power complex gain per sample for one antenna.
std::vector<cdouble> fading_trace(FadingModel model, double doppler_hz, std::size_t n_samples,
                                  double sample_rate_hz, Rng& rng,
                                  const TapProfile& profile = typical_urban_profile());

// exp(j 2 pi (cfo t + drift t^2 / 2)) for t = n / fs.
std::vector<cdouble> cfo_rotation(std::size_t n_samples, double sample_rate_hz, double cfo_hz,
                                  double drift_hz_per_s);

// Multiplies sample n by exp(j 2 pi (cfo t + drift t^2 / 2)), t = n / fs.
ComplexBuffer apply_cfo(const ComplexBuffer& buf, double cfo_hz, double drift_hz_per_s);

// N0 = tx_power / 10^(snr/10), tx_power = E / N^2 from the waveform.
double noise_variance(double snr_db, double tx_power_per_sample);
ComplexBuffer add_awgn(const ComplexBuffer& buf, double snr_db, double tx_power_per_sample, Rng& rng);

// Stream labels for derive_seed(seed, {antenna, role}).
enum class StreamRole : std::uint64_t { Fading = 1, Noise = 2 };

// delay -> fading -> CFO -> AWGN per antenna.
RxBuffers propagate(const ComplexBuffer& tx, const ChannelConfig& ch, const NprachConfig& cfg);

}  // namespace nprach
