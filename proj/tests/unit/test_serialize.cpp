#include <doctest.h>

#include <sstream>

#include "psd/core/packets.hpp"
#include "psd/core/serialize.hpp"

using namespace psd;

TEST_CASE("json round trip") {
  const Grid g = Grid::plane({8, 4}, {8.0, 4.0}, {-1.0, 2.0});
  WaveFunction psi(g, 2);
  for (std::size_t i = 0; i < psi.amplitudes().size(); ++i) psi.amplitudes()[i] = {0.1 * i, -0.3 * i};
  const auto j = to_json(psi);
  CHECK(j["amplitudes"].size() == 2 * 8 * 4 * 2);
  CHECK(wavefunction_from_json(nlohmann::json::parse(j.dump())) == psi);
}

TEST_CASE("binary round trip") {
  const Grid g = Grid::line(128, 32.0);
  const auto psi = gaussian_packet(g, 1.0, 0.7, 2.0);
  std::stringstream ss;
  write_binary(ss, psi);
  CHECK(ss.str().substr(0, 4) == "PSDW");
  CHECK(read_binary(ss) == psi);
  std::stringstream bad("nope");
  CHECK_THROWS(read_binary(bad));
}

TEST_CASE("run-length labels") {
  const std::vector<int> labels{0, 0, 0, 1, 1, 0, 2};
  const auto r = rle_labels(labels);
  CHECK(r.size() == 4);
  CHECK(r[0] == nlohmann::json({0, 3}));
  CHECK(rle_decode(r) == labels);
}
