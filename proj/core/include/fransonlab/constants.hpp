#pragma once

namespace fransonlab::constants {

inline constexpr double speed_of_light_mps = 299792458.0;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double ln2 = 0.69314718055994530942;

// FWHM convention for a Gaussian spectrum: tau_c = k * lambda^2 / (c * dlambda).
inline constexpr double gaussian_coherence_k = 2.0 * ln2 / pi;

// All delays are snapped to this grid so that outcome slots merge exactly.
inline constexpr double slot_quantum_ps = 1.0;

}  // namespace fransonlab::constants
