#include "nprach/channel.hpp"

#include "nprach/errors.hpp"
#include "nprach/fft.hpp"

#include <boost/random/normal_distribution.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace nprach {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Knot spacing for the interpolated fading trace: keeps the Doppler phase
// advance between knots at or below 0.01 rad.
std::size_t knot_step(double doppler_hz, double sample_rate_hz)
{
    if (doppler_hz <= 0.0)
        return 256;
    const double step = 0.01 * sample_rate_hz / (kTwoPi * doppler_hz);
    return static_cast<std::size_t>(std::clamp(std::floor(step), 1.0, 256.0));
}

struct Oscillator {
    double omega;  // rad per sample
    double phase;
    double amplitude;
};

void add_jakes_scatterers(std::vector<Oscillator>& osc, double doppler_hz, double sample_rate_hz,
                          double tap_amplitude, Rng& rng)
{
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    const double amp = tap_amplitude / std::sqrt(static_cast<double>(kJakesScatterers));
    for (int k = 0; k < kJakesScatterers; ++k) {
        const double arrival = angle(rng);
        const double phase = angle(rng);
        osc.push_back({kTwoPi * doppler_hz * std::cos(arrival) / sample_rate_hz, phase, amp});
    }
}

std::vector<cdouble> evaluate_oscillators(const std::vector<Oscillator>& osc, std::size_t n_samples,
                                          std::size_t step)
{
    std::vector<cdouble> out(n_samples);
    if (n_samples == 0)
        return out;
    const std::size_t n_knots = (n_samples - 1) / step + 2;
    std::vector<cdouble> knots(n_knots);
    for (std::size_t j = 0; j < n_knots; ++j) {
        const double t = static_cast<double>(j * step);
        cdouble g{};
        for (const auto& o : osc)
            g += std::polar(o.amplitude, o.omega * t + o.phase);
        knots[j] = g;
    }
    for (std::size_t n = 0; n < n_samples; ++n) {
        const std::size_t j = n / step;
        const double frac = static_cast<double>(n - j * step) / static_cast<double>(step);
        out[n] = knots[j] + frac * (knots[j + 1] - knots[j]);
    }
    return out;
}

}  // namespace

std::string to_string(FadingModel model)
{
    switch (model) {
    case FadingModel::None:
        return "none";
    case FadingModel::FlatRayleigh:
        return "flat_rayleigh";
    case FadingModel::TypicalUrban:
        return "typical_urban";
    }
    return "?";
}

FadingModel parse_fading_model(const std::string& text)
{
    if (text == "none")
        return FadingModel::None;
    if (text == "flat_rayleigh")
        return FadingModel::FlatRayleigh;
    if (text == "typical_urban")
        return FadingModel::TypicalUrban;
    throw ValidationError("fading must be one of none, flat_rayleigh, typical_urban (got '" + text + "')");
}

const TapProfile& typical_urban_profile()
{
    static const TapProfile tu{
        {0.0, 0.1, 0.3, 0.5, 0.8, 1.1, 1.3, 1.7, 2.3, 3.1, 3.2, 5.0},
        {-4.0, -3.0, 0.0, -2.6, -3.0, -5.0, -7.0, -5.0, -6.5, -8.6, -11.0, -10.0},
    };
    return tu;
}

TapProfile load_tap_profile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open tap profile '" + path + "'");
    TapProfile profile;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double delay = 0.0;
        double power = 0.0;
        std::string rest;
        if (!(ss >> delay >> power) || (ss >> rest))
            throw ValidationError(path + ":" + std::to_string(line_no) + ": expected 'delay_us, power_db'");
        profile.delays_us.push_back(delay);
        profile.powers_db.push_back(power);
    }
    if (profile.delays_us.empty())
        throw ValidationError(path + ": tap profile has no taps");
    return profile;
}

std::vector<std::string> validate(const ChannelConfig& ch, const DerivedNumerology& num)
{
    std::vector<std::string> errors;
    if (!(ch.delay_samples >= 0.0 && ch.delay_samples < num.cp_samples))
        errors.push_back("delay_samples must lie in [0, " + std::to_string(num.cp_samples) + ")");
    if (ch.n_rx < 1)
        errors.push_back("n_rx must be >= 1");
    if (!(ch.doppler_hz >= 0.0))
        errors.push_back("doppler_hz must be >= 0");
    if (std::isnan(ch.snr_db))
        errors.push_back("snr_db is NaN");
    if (ch.fading == FadingModel::TypicalUrban && ch.tu_profile.delays_us.empty())
        errors.push_back("typical_urban fading needs a tap profile");
    return errors;
}

ComplexBuffer apply_delay(const ComplexBuffer& buf, double delay_samples)
{
    const std::size_t len = buf.samples.size();
    if (!(delay_samples >= 0.0) || delay_samples >= static_cast<double>(len == 0 ? 1 : len))
        throw ValidationError("delay " + format_double(delay_samples) + " outside buffer");

    ComplexBuffer out;
    out.sample_rate_hz = buf.sample_rate_hz;
    if (delay_samples == 0.0 || len == 0) {
        out.samples = buf.samples;
        return out;
    }
    const double whole = std::floor(delay_samples);
    if (whole == delay_samples) {
        const auto shift = static_cast<std::size_t>(whole);
        out.samples.assign(len, cdouble{});
        std::copy(buf.samples.begin(), buf.samples.end() - static_cast<std::ptrdiff_t>(shift),
                  out.samples.begin() + static_cast<std::ptrdiff_t>(shift));
        return out;
    }

    auto spectrum = fft(buf.samples);
    const double n = static_cast<double>(len);
    for (std::size_t k = 0; k < len; ++k) {
        if (2 * k == len) {
            // Nyquist bin: keep the result conjugate-symmetric.
            spectrum[k] *= std::cos(std::numbers::pi * delay_samples);
            continue;
        }
        const double f = 2 * k < len ? static_cast<double>(k) : static_cast<double>(k) - n;
        spectrum[k] *= std::polar(1.0, -kTwoPi * f * delay_samples / n);
    }
    out.samples = fft(spectrum, true);
    const auto arrival = static_cast<std::size_t>(std::ceil(delay_samples));
    for (std::size_t i = 0; i < len; ++i)
        out.samples[i] = i < arrival ? cdouble{} : out.samples[i] / n;
    return out;
}

std::vector<cdouble> fading_trace(FadingModel model, double doppler_hz, std::size_t n_samples,
                                  double sample_rate_hz, Rng& rng, const TapProfile& profile)
{
    if (!(doppler_hz >= 0.0))
        throw ValidationError("doppler_hz must be >= 0");
    if (model == FadingModel::None)
        return std::vector<cdouble>(n_samples, cdouble{1.0, 0.0});

    std::vector<Oscillator> osc;
    if (model == FadingModel::FlatRayleigh) {
        add_jakes_scatterers(osc, doppler_hz, sample_rate_hz, 1.0, rng);
    } else {
        // Tap delays are far below the inverse of the 45 kHz hopping span, so
        // the taps collapse into one composite gain.
        double total = 0.0;
        for (double p : profile.powers_db)
            total += std::pow(10.0, p / 10.0);
        for (double p : profile.powers_db)
            add_jakes_scatterers(osc, doppler_hz, sample_rate_hz, std::sqrt(std::pow(10.0, p / 10.0) / total),
                                 rng);
    }
    return evaluate_oscillators(osc, n_samples, knot_step(doppler_hz, sample_rate_hz));
}

std::vector<cdouble> cfo_rotation(std::size_t n_samples, double sample_rate_hz, double cfo_hz,
                                  double drift_hz_per_s)
{
    std::vector<cdouble> rot(n_samples);
    for (std::size_t n = 0; n < n_samples; ++n) {
        const double t = static_cast<double>(n) / sample_rate_hz;
        const double cycles = cfo_hz * t + 0.5 * drift_hz_per_s * t * t;
        // Drop whole cycles before scaling by 2 pi.
        rot[n] = std::polar(1.0, kTwoPi * (cycles - std::round(cycles)));
    }
    return rot;
}

ComplexBuffer apply_cfo(const ComplexBuffer& buf, double cfo_hz, double drift_hz_per_s)
{
    ComplexBuffer out = buf;
    if (cfo_hz == 0.0 && drift_hz_per_s == 0.0)
        return out;
    const auto rot = cfo_rotation(buf.size(), buf.sample_rate_hz, cfo_hz, drift_hz_per_s);
    for (std::size_t n = 0; n < out.samples.size(); ++n)
        out.samples[n] *= rot[n];
    return out;
}

double noise_variance(double snr_db, double tx_power_per_sample)
{
    if (std::isinf(snr_db) && snr_db > 0)
        return 0.0;
    return tx_power_per_sample / std::pow(10.0, snr_db / 10.0);
}

ComplexBuffer add_awgn(const ComplexBuffer& buf, double snr_db, double tx_power_per_sample, Rng& rng)
{
    ComplexBuffer out = buf;
    const double n0 = noise_variance(snr_db, tx_power_per_sample);
    if (n0 == 0.0)
        return out;
    boost::random::normal_distribution<double> gauss(0.0, std::sqrt(n0 / 2.0));
    for (auto& s : out.samples) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        s += cdouble{re, im};
    }
    return out;
}

RxBuffers propagate(const ComplexBuffer& tx, const ChannelConfig& ch, const NprachConfig& cfg)
{
    const auto num = derive(cfg);
    const auto errors = validate(ch, num);
    if (!errors.empty())
        throw ValidationError("invalid channel configuration: " + errors.front());

    const double tx_power = cfg.tx_energy_per_sample / (static_cast<double>(cfg.fft_size) * cfg.fft_size);
    const ComplexBuffer delayed = apply_delay(tx, ch.delay_samples);

    // Fading and CFO are both per-sample gains, so one rotation table serves every antenna.
    const bool rotate = ch.cfo_hz != 0.0 || ch.drift_hz_per_s != 0.0;
    const auto rot = rotate ? cfo_rotation(delayed.size(), delayed.sample_rate_hz, ch.cfo_hz, ch.drift_hz_per_s)
                            : std::vector<cdouble>{};

    RxBuffers rx;
    for (int a = 0; a < ch.n_rx; ++a) {
        const auto ant = static_cast<std::uint64_t>(a);
        Rng fading_rng(derive_seed(ch.seed, {ant, static_cast<std::uint64_t>(StreamRole::Fading)}));
        Rng noise_rng(derive_seed(ch.seed, {ant, static_cast<std::uint64_t>(StreamRole::Noise)}));

        auto gains = fading_trace(ch.fading, ch.doppler_hz, delayed.size(), delayed.sample_rate_hz, fading_rng,
                                  ch.tu_profile);
        ComplexBuffer faded = delayed;
        for (std::size_t n = 0; n < faded.samples.size(); ++n)
            faded.samples[n] *= rotate ? gains[n] * rot[n] : gains[n];
        rx.antennas.push_back(add_awgn(faded, ch.snr_db, tx_power, noise_rng));
        rx.fading.push_back(std::move(gains));
    }
    return rx;
}

}  // namespace nprach
