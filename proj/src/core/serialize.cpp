#include "psd/core/serialize.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "psd/core/errors.hpp"

namespace psd {
namespace {

constexpr char kMagic[4] = {'P', 'S', 'D', 'W'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw InvalidArgument("truncated wave function record");
  return v;
}

}  // namespace

nlohmann::json to_json(const Grid& grid) {
  nlohmann::json j;
  j["dims"] = grid.dims();
  j["cells"] = nlohmann::json::array();
  j["extent"] = nlohmann::json::array();
  j["lower"] = nlohmann::json::array();
  for (int a = 0; a < grid.dims(); ++a) {
    j["cells"].push_back(grid.cells(a));
    j["extent"].push_back(grid.extent(a));
    j["lower"].push_back(grid.lower(a));
  }
  return j;
}

Grid grid_from_json(const nlohmann::json& j) {
  const int dims = j.at("dims").get<int>();
  const auto& c = j.at("cells");
  const auto& e = j.at("extent");
  const auto& l = j.at("lower");
  if (dims == 1) return Grid::line(c.at(0).get<std::size_t>(), e.at(0).get<double>(), l.at(0).get<double>());
  if (dims == 2)
    return Grid::plane({c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>()},
                       {e.at(0).get<double>(), e.at(1).get<double>()}, {l.at(0).get<double>(), l.at(1).get<double>()});
  throw InvalidArgument("grid dimension must be 1 or 2");
}

nlohmann::json to_json(const WaveFunction& psi) {
  nlohmann::json j;
  j["grid"] = to_json(psi.grid());
  j["internal"] = psi.internal();
  std::vector<double> flat;
  flat.reserve(2 * psi.amplitudes().size());
  for (const Complex& a : psi.amplitudes()) {
    flat.push_back(a.real());
    flat.push_back(a.imag());
  }
  j["amplitudes"] = std::move(flat);
  return j;
}

WaveFunction wavefunction_from_json(const nlohmann::json& j) {
  const Grid g = grid_from_json(j.at("grid"));
  const auto internal = j.value("internal", std::size_t{1});
  const auto flat = j.at("amplitudes").get<std::vector<double>>();
  if (flat.size() % 2 != 0) throw InvalidArgument("amplitude list must hold (re, im) pairs");
  std::vector<Complex> amps(flat.size() / 2);
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = {flat[2 * i], flat[2 * i + 1]};
  return WaveFunction(g, std::move(amps), internal);
}

void write_binary(std::ostream& out, const WaveFunction& psi) {
  const Grid& g = psi.grid();
  out.write(kMagic, 4);
  put(out, kVersion);
  put(out, static_cast<std::uint32_t>(g.dims()));
  for (int a = 0; a < 2; ++a) put(out, static_cast<std::uint64_t>(g.cells(a)));
  for (int a = 0; a < 2; ++a) put(out, g.extent(a));
  for (int a = 0; a < 2; ++a) put(out, g.lower(a));
  put(out, static_cast<std::uint64_t>(psi.internal()));
  for (const Complex& a : psi.amplitudes()) {
    put(out, a.real());
    put(out, a.imag());
  }
}

WaveFunction read_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw InvalidArgument("not a wave function record");
  if (get<std::uint32_t>(in) != kVersion) throw InvalidArgument("unsupported wave function record version");
  const auto dims = get<std::uint32_t>(in);
  std::array<std::uint64_t, 2> cells{get<std::uint64_t>(in), get<std::uint64_t>(in)};
  std::array<double, 2> extent{get<double>(in), get<double>(in)};
  std::array<double, 2> lower{get<double>(in), get<double>(in)};
  const auto internal = get<std::uint64_t>(in);
  const Grid g = dims == 1 ? Grid::line(cells[0], extent[0], lower[0])
                           : Grid::plane({cells[0], cells[1]}, extent, lower);
  std::vector<Complex> amps(g.size() * internal);
  for (Complex& a : amps) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    a = {re, im};
  }
  return WaveFunction(g, std::move(amps), internal);
}

nlohmann::json rle_labels(const std::vector<int>& labels) {
  nlohmann::json runs = nlohmann::json::array();
  std::size_t i = 0;
  while (i < labels.size()) {
    std::size_t k = i;
    while (k < labels.size() && labels[k] == labels[i]) ++k;
    runs.push_back({labels[i], k - i});
    i = k;
  }
  return runs;
}

std::vector<int> rle_decode(const nlohmann::json& runs) {
  std::vector<int> out;
  for (const auto& r : runs) out.insert(out.end(), r.at(1).get<std::size_t>(), r.at(0).get<int>());
  return out;
}

}  // namespace psd
