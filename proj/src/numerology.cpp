#include "nprach/numerology.hpp"

#include "nprach/errors.hpp"

#include <cmath>

namespace nprach {

std::string to_string(CpKind kind)
{
    return kind == CpKind::Long ? "long" : "short";
}

CpKind parse_cp_kind(const std::string& text)
{
    if (text == "long" || text == "Long")
        return CpKind::Long;
    if (text == "short" || text == "Short")
        return CpKind::Short;
    throw ValidationError("cp_kind must be 'long' or 'short', got '" + text + "'");
}

std::vector<std::string> validate(const NprachConfig& cfg)
{
    std::vector<std::string> errors;
    const int n = cfg.fft_size;
    if (n < 4 || (n & (n - 1)) != 0)
        errors.push_back("fft_size must be a power of two >= 4 (got " + std::to_string(n) + ")");
    if (!(cfg.subcarrier_spacing_hz > 0.0))
        errors.push_back("subcarrier_spacing_hz must be positive");
    if (!(cfg.system_bandwidth_hz > 0.0))
        errors.push_back("system_bandwidth_hz must be positive");
    if (cfg.subcarrier_spacing_hz > 0.0 && n < cfg.system_bandwidth_hz / cfg.subcarrier_spacing_hz)
        errors.push_back("fft_size " + std::to_string(n) + " is smaller than W/B = " +
                         format_double(cfg.system_bandwidth_hz / cfg.subcarrier_spacing_hz));
    if (cfg.repeats_per_group < 1)
        errors.push_back("repeats_per_group must be >= 1");
    if (cfg.preamble_groups < 4 || cfg.preamble_groups % 4 != 0)
        errors.push_back("preamble_groups L mod 4 != 0 (got L = " + std::to_string(cfg.preamble_groups) + ")");
    if (cfg.band_subcarriers < 1)
        errors.push_back("band_subcarriers must be >= 1");
    if (cfg.band_offset < 0)
        errors.push_back("band_offset must be >= 0");
    if (cfg.band_offset + cfg.band_subcarriers > n)
        errors.push_back("band exceeds grid: band_offset + band_subcarriers = " +
                         std::to_string(cfg.band_offset + cfg.band_subcarriers) + " > fft_size " +
                         std::to_string(n));
    if (cfg.cp_kind == CpKind::Short && n % 4 != 0)
        errors.push_back("short CP needs fft_size divisible by 4");
    if (!(cfg.tx_energy_per_sample > 0.0) || !std::isfinite(cfg.tx_energy_per_sample))
        errors.push_back("tx_energy_per_sample must be positive and finite");
    if (cfg.cell_id > 0x7fffffffu)
        errors.push_back("cell_id must fit in 31 bits");
    return errors;
}

void require_valid(const NprachConfig& cfg)
{
    const auto errors = validate(cfg);
    if (errors.empty())
        return;
    std::string msg = "invalid NPRACH configuration:";
    for (const auto& e : errors)
        msg += "\n  - " + e;
    throw ValidationError(msg);
}

DerivedNumerology derive(const NprachConfig& cfg)
{
    DerivedNumerology d;
    d.sample_rate_hz = cfg.fft_size * cfg.subcarrier_spacing_hz;
    d.cp_samples = cfg.cp_kind == CpKind::Long ? cfg.fft_size : cfg.fft_size / 4;
    d.group_samples = d.cp_samples + cfg.repeats_per_group * cfg.fft_size;
    d.preamble_samples = static_cast<std::size_t>(cfg.preamble_groups) * d.group_samples;
    d.preamble_duration_s = static_cast<double>(d.preamble_samples) / d.sample_rate_hz;
    return d;
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{
        "fft_size",          "subcarrier_spacing_hz", "system_bandwidth_hz", "cp_kind",
        "repeats_per_group", "preamble_groups",       "band_subcarriers",    "band_offset",
        "cell_id",           "tx_energy_per_sample",
    };
    return keys;
}

NprachConfig config_from_keyvalue(const KeyValueFile& kv, NprachConfig cfg)
{
    const auto unknown = kv.unknown_keys(config_keys());
    if (!unknown.empty())
        throw ValidationError(kv.origin() + ": unknown configuration key '" + unknown.front() + "'");

    auto get_int = [&](const char* key, int& field) {
        if (kv.contains(key))
            field = static_cast<int>(kv.get_int(key));
    };
    get_int("fft_size", cfg.fft_size);
    get_int("repeats_per_group", cfg.repeats_per_group);
    get_int("preamble_groups", cfg.preamble_groups);
    get_int("band_subcarriers", cfg.band_subcarriers);
    get_int("band_offset", cfg.band_offset);
    if (kv.contains("subcarrier_spacing_hz"))
        cfg.subcarrier_spacing_hz = kv.get_double("subcarrier_spacing_hz");
    if (kv.contains("system_bandwidth_hz"))
        cfg.system_bandwidth_hz = kv.get_double("system_bandwidth_hz");
    if (kv.contains("tx_energy_per_sample"))
        cfg.tx_energy_per_sample = kv.get_double("tx_energy_per_sample");
    if (kv.contains("cp_kind"))
        cfg.cp_kind = parse_cp_kind(kv.at("cp_kind"));
    if (kv.contains("cell_id")) {
        const long long id = kv.get_int("cell_id");
        if (id < 0 || id > 0x7fffffff)
            throw ValidationError(kv.origin() + ": cell_id must fit in 31 bits");
        cfg.cell_id = static_cast<std::uint32_t>(id);
    }
    return cfg;
}

NprachConfig load_config(const std::string& path)
{
    if (path == "defaults")
        return {};
    return config_from_keyvalue(KeyValueFile::load(path));
}

KeyValueFile config_to_keyvalue(const NprachConfig& cfg)
{
    KeyValueFile kv;
    kv.set("fft_size", std::to_string(cfg.fft_size));
    kv.set("subcarrier_spacing_hz", format_double(cfg.subcarrier_spacing_hz));
    kv.set("system_bandwidth_hz", format_double(cfg.system_bandwidth_hz));
    kv.set("cp_kind", to_string(cfg.cp_kind));
    kv.set("repeats_per_group", std::to_string(cfg.repeats_per_group));
    kv.set("preamble_groups", std::to_string(cfg.preamble_groups));
    kv.set("band_subcarriers", std::to_string(cfg.band_subcarriers));
    kv.set("band_offset", std::to_string(cfg.band_offset));
    kv.set("cell_id", std::to_string(cfg.cell_id));
    kv.set("tx_energy_per_sample", format_double(cfg.tx_energy_per_sample));
    return kv;
}

}  // namespace nprach
