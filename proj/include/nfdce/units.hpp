// units.hpp - physical constants and unit conventions.
//
// Internal unit system: energies (and frequencies, via E = hbar*omega) in meV,
// lengths in nm, temperatures in K.  Wavevectors are 1/nm; omega/c in 1/nm is
// obtained by dividing an energy by hbar*c in meV*nm.  Energy fluxes are
// accumulated in meV^2/nm^2 and converted to W/m^2 on output.

#pragma once

namespace nfdce::units {

// CODATA 2018 exact values where applicable.
inline constexpr double hbar_joule_s = 1.054571817e-34;
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double boltzmann_mev_per_k = 0.08617333262;   // k_B
inline constexpr double hbar_c_mev_nm = 197326.9804;           // hbar*c
inline constexpr double hbar_mev_s = 6.582119569e-13;          // hbar

// integral dE[meV] E[meV] F[1/nm^2]  ->  W/m^2   (divide by hbar once: dω = dE/ħ)
inline constexpr double mev2_per_nm2_to_w_per_m2 =
    (elementary_charge * 1e-3) * (elementary_charge * 1e-3) * 1e18 / hbar_joule_s;

} // namespace nfdce::units
