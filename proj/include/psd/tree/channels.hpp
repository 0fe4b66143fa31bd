#pragma once

#include "psd/core/region.hpp"
#include "psd/core/wavefunction.hpp"

namespace psd {

struct ChannelOptions {
  double theta = 0.01;       // density threshold as a fraction of the peak density
  double d_min = 1.0;        // components closer than this (cell-center distance) merge
  double mass_floor = 1e-3;  // channels carrying less norm² are folded into their neighbors
};

/// Thresholded connected-component channel detector.
///
/// Cells with |ψ|² ≥ θ·max|ψ|² are grouped by 4-connectivity (no wrap-around),
/// groups closer than d_min merge, and every remaining cell joins the group
/// whose nearest super-threshold cell is closest (ties to the lower id). Ids
/// follow the first cell of each group in storage order.
Partition detect_channels(const WaveFunction& psi, const ChannelOptions& options = {});

}  // namespace psd
