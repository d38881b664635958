// born.hpp - first Born approximation of the modulation-induced conversion.
//
// Built entirely from static (delta_eps = 0) stratified-media solutions via
// textbook Fresnel recursions; independent of the coupled-harmonic solver so
// it can serve as its cross-check at small modulation strength.

#pragma once

#include "nfdce/floquet.hpp"

namespace nfdce {

struct FirstOrderAmplitudes {
  cplx to_body1; // outgoing amplitude at harmonic 0 into body 1
  cplx to_body2; // outgoing amplitude at harmonic 0 into body 2
};

// Conversion amplitude for unit tangential incidence at harmonic l (|l| = 1)
// from the given side, to first order in delta_eps.  Amplitude normalization
// matches StackScattering::s_amplitude exactly.
FirstOrderAmplitudes perturbative_first_order(const LayerStack& stack,
                                              const PlaneWaveContext& ctx,
                                              const HarmonicBasis& basis, SourceSide side, int l);

} // namespace nfdce
