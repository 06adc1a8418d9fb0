#pragma once

#include "nprach/keyvalue.hpp"
#include "nprach/waveform.hpp"

#include <string>

namespace nprach {

// Interleaved little-endian float32 I/Q at `path`, plus a key/value sidecar
// at `path + ".hdr"` holding sample_rate_hz, length and any extra metadata.
void dump_iq(const std::string& path, const ComplexBuffer& buf, const KeyValueFile& metadata = {});

struct LoadedIq {
    ComplexBuffer buffer;
    KeyValueFile header;
};

LoadedIq load_iq(const std::string& path);

}  // namespace nprach
