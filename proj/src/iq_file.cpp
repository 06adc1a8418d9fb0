#include "nprach/iq_file.hpp"

#include "nprach/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace nprach {

namespace {

void put_f32_le(unsigned char* out, float value)
{
    const auto u = std::bit_cast<std::uint32_t>(value);
    for (int b = 0; b < 4; ++b)
        out[b] = static_cast<unsigned char>(u >> (8 * b));
}

float get_f32_le(const unsigned char* in)
{
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b)
        u |= static_cast<std::uint32_t>(in[b]) << (8 * b);
    return std::bit_cast<float>(u);
}

}  // namespace

void dump_iq(const std::string& path, const ComplexBuffer& buf, const KeyValueFile& metadata)
{
    std::vector<unsigned char> bytes(buf.samples.size() * 8);
    for (std::size_t i = 0; i < buf.samples.size(); ++i) {
        put_f32_le(&bytes[8 * i], static_cast<float>(buf.samples[i].real()));
        put_f32_le(&bytes[8 * i + 4], static_cast<float>(buf.samples[i].imag()));
    }
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open '" + path + "' for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw IoError("write failed on '" + path + "'");
    }

    KeyValueFile header = metadata;
    header.set("format", "cf32_le");
    header.set("sample_rate_hz", format_double(buf.sample_rate_hz));
    header.set("length", std::to_string(buf.samples.size()));
    const std::string hdr_path = path + ".hdr";
    std::ofstream hdr(hdr_path, std::ios::binary | std::ios::trunc);
    if (!hdr)
        throw IoError("cannot open '" + hdr_path + "' for writing");
    hdr << header.to_string();
    if (!hdr)
        throw IoError("write failed on '" + hdr_path + "'");
}

LoadedIq load_iq(const std::string& path)
{
    LoadedIq result;
    result.header = KeyValueFile::load(path + ".hdr");
    if (result.header.contains("format") && result.header.at("format") != "cf32_le")
        throw ValidationError(path + ".hdr: unsupported format '" + result.header.at("format") + "'");
    const auto length = static_cast<std::size_t>(result.header.get_int("length"));
    result.buffer.sample_rate_hz = result.header.get_double("sample_rate_hz");

    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::vector<unsigned char> bytes(length * 8);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size())
        throw IoError("'" + path + "' is shorter than the " + std::to_string(length) + " samples in its header");
    if (in.peek() != std::ifstream::traits_type::eof())
        throw IoError("'" + path + "' is longer than the " + std::to_string(length) + " samples in its header");

    result.buffer.samples.resize(length);
    for (std::size_t i = 0; i < length; ++i)
        result.buffer.samples[i] = {get_f32_le(&bytes[8 * i]), get_f32_le(&bytes[8 * i + 4])};
    return result;
}

}  // namespace nprach
