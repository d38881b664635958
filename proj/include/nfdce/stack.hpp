// stack.hpp - planar layered system: body 1 / vacuum gap / modulated layer / body 2.
//
// z-axis convention: z = 0 at the top surface of the modulated layer, increasing
// upward into the gap.  Body 1 occupies z >= d, the gap is [0, d], the modulated
// layer [-h, 0], body 2 z <= -h.  Interface boundaries belong to the lower region.

#pragma once

#include <vector>

#include "nfdce/materials.hpp"

namespace nfdce {

struct Layer {
  Material material;
  double thickness_nm = 0.0;
};

enum class RegionId { Body1, Gap, ModLayer, Body2 };

struct LayerStack {
  Material top_half_space;          // body 1
  std::vector<Layer> inner_layers;  // top to bottom: vacuum gap, modulated layer
  Material bottom_half_space;       // body 2

  double gap_nm() const { return inner_layers.at(0).thickness_nm; }
  double mod_thickness_nm() const { return inner_layers.at(1).thickness_nm; }
  const ModulatedLayerSpec& mod_spec() const;

  const Material& body(int alpha) const { return alpha == 1 ? top_half_space : bottom_half_space; }
};

// Default paper stack: quartz / vacuum d / modulated(eps_s, delta_eps, 22nm) / InP.
LayerStack default_stack(double gap_nm = 10.0, double delta_eps = 0.4, double mod_freq_mev = 0.0);

// Checks the v1 invariants: two lossy half-spaces, a positive vacuum gap on top
// of exactly one lossless modulated layer.  Throws std::invalid_argument with a
// description of every violation found.
void validate_stack(const LayerStack& s);

RegionId region_of(const LayerStack& s, double z_nm);

// Lossless electrostatic gap-mode dispersion: roots of
//   1 - r1(w) r2(w) exp(-2 k d) = 0,  r_i = (eps_i - 1)/(eps_i + 1),
// with gamma = 0 permittivities (p-polarized nonretarded surface modes; the
// finite inner layers do not enter this reduced condition).  Returns, per kpar,
// the mode energies found inside the bodies' (omega_T, omega_L) reststrahlen
// windows; an empty list if none.
std::vector<std::vector<double>> gap_mode_dispersion(const LayerStack& s,
                                                     const std::vector<double>& kpar_grid_invnm);

} // namespace nfdce
