#pragma once

#include "fransonlab/units.hpp"

namespace fransonlab {

enum class FilterKind { bragg_reflective };

/// Narrow reflective filter cut out of a broadband source spectrum.
/// The reflected band and the transmitted band are complementary.
struct SpectralFilter {
  Wavelength center = Wavelength::from_nm(1546.0);
  double fwhm_m = 0.8e-9;
  FilterKind kind = FilterKind::bragg_reflective;

  static SpectralFilter bragg(Wavelength center, double fwhm_m);

  bool reflects(Wavelength lambda) const;
  bool transmits(Wavelength lambda) const { return !reflects(lambda); }
};

/// Propagation media shared by the delay/coherence arithmetic.
/// group_index is for standard single-mode fiber near 1550 nm; the stripe
/// waveguide group velocity is chosen so a 1 cm guide has a 50 ps transit.
struct MediumParams {
  double group_index = 1.468;
  double psw_group_velocity_mps = 2.0e8;

  void validate() const;
};

/// Idler wavelength paired with `signal` by energy conservation against the
/// pump: 1/ls + 1/li = 1/lp. Requires signal > pump (the signal photon carries
/// less energy than the pump photon); throws std::domain_error otherwise.
Wavelength complementary_wavelength(Wavelength signal, Wavelength pump);

/// Coherence time of a Gaussian spectrum of the given FWHM:
/// tau_c = (2 ln2 / pi) * lambda^2 / (c * dlambda).
Duration coherence_time(Wavelength center, double fwhm_m);

/// Coherence length for a wavepacket of coherence time tau travelling in the
/// given medium: L_c = c * tau / n_g.
double coherence_length_in_medium(Duration tau, const MediumParams& medium);

/// Round-trip group delay of a fiber spool: 2 * L * n_g / c.
/// With the default group index this is close to 10 us per km of fiber.
Duration spool_round_trip_delay(double length_km, const MediumParams& medium);

/// Transit time of a surface plasmon across a stripe waveguide of the given
/// length -- the lifetime of the plasmonic excitation.
Duration sp_lifetime(double psw_length_m, const MediumParams& medium);

}  // namespace fransonlab
