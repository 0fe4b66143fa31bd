#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "psd/core/region.hpp"
#include "psd/core/wavefunction.hpp"

namespace psd {

nlohmann::json to_json(const Grid& grid);
Grid grid_from_json(const nlohmann::json& j);

/// {grid, internal, amplitudes: [re, im, re, im, ...]} in storage order.
nlohmann::json to_json(const WaveFunction& psi);
WaveFunction wavefunction_from_json(const nlohmann::json& j);

/// Binary record: magic "PSDW", u32 version, u32 dims, u64 cells[2], f64 extent[2],
/// f64 lower[2], u64 internal, then interleaved f64 (re, im). Little-endian host order.
void write_binary(std::ostream& out, const WaveFunction& psi);
WaveFunction read_binary(std::istream& in);

/// Run-length encoding of partition labels as [[label, count], ...].
nlohmann::json rle_labels(const std::vector<int>& labels);
std::vector<int> rle_decode(const nlohmann::json& runs);

}  // namespace psd
