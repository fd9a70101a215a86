#pragma once

#include <cmath>

// Unit conversions between atomic units and laboratory units.
// Internally everything runs in atomic units: hbar = m_e = |e| = 1, with the
// electron charge e = -1.

namespace sfa {

inline constexpr double hartree_ev = 27.211386245988;

// One atomic unit of intensity expressed in W/cm^2. Field amplitude in a.u.
// is sqrt(I / au_intensity_wcm2).
inline constexpr double au_intensity_wcm2 = 3.50944506e16;

// omega[a.u.] = 2*pi*c / lambda with c and lambda in a.u.; collapsing the
// constants gives omega = au_omega_nm / lambda[nm].
inline constexpr double au_omega_nm = 45.5633525316;

// Closed-form ponderomotive-energy constant: Up[eV] = up_ev_constant * I0[W/cm^2] * lambda0[nm]^2.
inline constexpr double up_ev_constant = 9.337e-20;

inline constexpr double electron_charge = -1.0;

inline double field_au_from_intensity(double intensity_wcm2) {
  return intensity_wcm2 > 0.0
             ? std::sqrt(intensity_wcm2 / au_intensity_wcm2)
             : 0.0;
}

inline double omega_au_from_lambda_nm(double lambda_nm) {
  return au_omega_nm / lambda_nm;
}

}  // namespace sfa
