#include "nprach/hopping.hpp"

#include "nprach/errors.hpp"

#include <cstdlib>

namespace nprach {

namespace {

constexpr int kGoldWarmup = 1600;

// 31-bit Fibonacci LFSRs stored LSB-first: bit k holds x(n + k).
class GoldGenerator {
public:
    explicit GoldGenerator(std::uint32_t cell_id)
        : x1_(1u), x2_(cell_id & 0x7fffffffu)
    {
        for (int i = 0; i < kGoldWarmup; ++i)
            step();
    }

    std::uint8_t next()
    {
        const std::uint8_t bit = static_cast<std::uint8_t>((x1_ ^ x2_) & 1u);
        step();
        return bit;
    }

private:
    void step()
    {
        const std::uint32_t f1 = ((x1_ >> 3) ^ x1_) & 1u;
        const std::uint32_t f2 = ((x2_ >> 3) ^ (x2_ >> 2) ^ (x2_ >> 1) ^ x2_) & 1u;
        x1_ = (x1_ >> 1) | (f1 << 30);
        x2_ = (x2_ >> 1) | (f2 << 30);
    }

    std::uint32_t x1_;
    std::uint32_t x2_;
};

}  // namespace

std::vector<std::uint8_t> gold_bits(std::uint32_t cell_id, std::size_t count)
{
    GoldGenerator gen(cell_id);
    std::vector<std::uint8_t> bits(count);
    for (auto& b : bits)
        b = gen.next();
    return bits;
}

std::vector<int> block_offsets(std::uint32_t cell_id, std::size_t count)
{
    std::vector<int> offsets(count, 0);
    if (count == 0)
        return offsets;
    const auto bits = gold_bits(cell_id, 4 * count);
    for (std::size_t t = 1; t < count; ++t) {
        int word = 0;
        for (int k = 0; k < 4; ++k)
            word |= bits[4 * t + k] << k;
        offsets[t] = (offsets[t - 1] + 1 + word % 11) % kHopBand;
    }
    return offsets;
}

int block_offset(std::size_t t, std::uint32_t cell_id)
{
    return block_offsets(cell_id, t + 1).back();
}

std::array<int, 4> unit_indices(int base)
{
    std::array<int, 4> idx{};
    idx[0] = base;
    idx[1] = base % 2 == 0 ? base + 1 : base - 1;
    idx[2] = idx[1] < 6 ? idx[1] + 6 : idx[1] - 6;
    idx[3] = idx[2] - (idx[1] - idx[0]);
    return idx;
}

int subcarrier_index(std::size_t m, int n0, std::uint32_t cell_id)
{
    const int base = (n0 + block_offset(m / 4, cell_id)) % kHopBand;
    return unit_indices(base)[m % 4];
}

HoppingPattern pattern_from_offsets(int n0, const std::vector<int>& offsets)
{
    HoppingPattern p;
    p.start_subcarrier = n0;
    p.indices.reserve(offsets.size() * 4);
    for (int f : offsets) {
        for (int idx : unit_indices(((n0 + f) % kHopBand + kHopBand) % kHopBand))
            p.indices.push_back(idx);
    }
    return p;
}

HoppingPattern full_pattern(const NprachConfig& cfg, int n0)
{
    require_valid(cfg);
    if (cfg.band_subcarriers != kHopBand)
        throw ValidationError("hopping requires band_subcarriers = 12 (got " +
                              std::to_string(cfg.band_subcarriers) + ")");
    if (n0 < 0 || n0 >= kHopBand)
        throw ValidationError("start subcarrier n0 must be in [0, 12) (got " + std::to_string(n0) + ")");
    auto p = pattern_from_offsets(n0, block_offsets(cfg.cell_id, cfg.preamble_groups / 4));
    p.cell_id = cfg.cell_id;
    return p;
}

std::vector<std::string> check_pattern(const HoppingPattern& pattern)
{
    std::vector<std::string> errors;
    const auto& x = pattern.indices;
    if (x.size() % 4 != 0)
        errors.push_back("pattern length not a multiple of 4");
    for (std::size_t m = 0; m < x.size(); ++m) {
        if (x[m] < 0 || x[m] >= kHopBand)
            errors.push_back("index out of band at m = " + std::to_string(m));
    }
    for (std::size_t t = 0; t + 3 < x.size(); t += 4) {
        const int h1 = x[t + 1] - x[t];
        const int h2 = x[t + 2] - x[t + 1];
        const int h3 = x[t + 3] - x[t + 2];
        const std::string where = " in unit " + std::to_string(t / 4);
        if (std::abs(h1) != 1)
            errors.push_back("first hop is not +-1" + where);
        if (std::abs(h2) != 6)
            errors.push_back("second hop is not +-6" + where);
        if (h3 != -h1)
            errors.push_back("third hop does not mirror the first" + where);
    }
    return errors;
}

std::string pattern_to_text(const HoppingPattern& pattern)
{
    std::string out;
    for (std::size_t m = 0; m < pattern.indices.size(); ++m)
        out += std::to_string(m) + ", " + std::to_string(pattern.indices[m]) + "\n";
    return out;
}

}  // namespace nprach
