#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gqed/scattering.hpp"
#include "gqed/vertex.hpp"

namespace gqed {

// Binary cache: "GQEDCACH", format version, payload kind and FNV-1a hash of the
// parameter description, then little-endian doubles.
std::uint64_t fnv1a(const std::string& s);

std::string vertex_key(const ModelParams& p, const MomentumGrid& grid, Mode mode, double energy);
std::string three_photon_key(const ModelParams& p, const MomentumGrid& grid, Mode mode,
                             const F12Options& f12);

void save_vertex_table(const std::string& path, std::uint64_t hash, const VertexTable& t);
// nullopt on a missing file, wrong version or hash mismatch
std::optional<VertexTable> load_vertex_table(const std::string& path, std::uint64_t hash);

void save_three_photon(const std::string& path, std::uint64_t hash, const ThreePhotonAmplitude& q);
std::optional<ThreePhotonAmplitude> load_three_photon(const std::string& path, std::uint64_t hash);

}  // namespace gqed
