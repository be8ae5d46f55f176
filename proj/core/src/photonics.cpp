#include "fransonlab/photonics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fransonlab/constants.hpp"

namespace fransonlab {

namespace {
constexpr double c0 = constants::speed_of_light_mps;
}

SpectralFilter SpectralFilter::bragg(Wavelength center, double fwhm_m) {
  if (!(fwhm_m > 0.0) || fwhm_m >= center.m()) {
    throw std::domain_error("filter fwhm must satisfy 0 < fwhm < center wavelength");
  }
  return SpectralFilter{center, fwhm_m, FilterKind::bragg_reflective};
}

bool SpectralFilter::reflects(Wavelength lambda) const {
  return std::abs(lambda.m() - center.m()) <= 0.5 * fwhm_m;
}

void MediumParams::validate() const {
  if (!(group_index >= 1.0)) {
    throw std::domain_error("group index must be >= 1");
  }
  if (!(psw_group_velocity_mps > 0.0)) {
    throw std::domain_error("PSW group velocity must be positive");
  }
}

Wavelength complementary_wavelength(Wavelength signal, Wavelength pump) {
  if (!(signal.m() > pump.m())) {
    throw std::domain_error("no physical idler: signal wavelength must exceed the pump (" +
                            std::to_string(signal.nm()) + " nm <= " +
                            std::to_string(pump.nm()) + " nm)");
  }
  // 1/li = 1/lp - 1/ls, rearranged to avoid cancellation.
  const double idler_m = signal.m() * pump.m() / (signal.m() - pump.m());
  return Wavelength::from_m(idler_m);
}

Duration coherence_time(Wavelength center, double fwhm_m) {
  if (!(fwhm_m > 0.0)) {
    throw std::domain_error("spectral fwhm must be positive");
  }
  const double lambda = center.m();
  return Duration::from_s(constants::gaussian_coherence_k * lambda * lambda / (c0 * fwhm_m));
}

double coherence_length_in_medium(Duration tau, const MediumParams& medium) {
  if (!(tau.s() > 0.0)) {
    throw std::domain_error("coherence time must be positive");
  }
  medium.validate();
  return c0 * tau.s() / medium.group_index;
}

Duration spool_round_trip_delay(double length_km, const MediumParams& medium) {
  if (length_km < 0.0) {
    throw std::domain_error("spool length must be non-negative");
  }
  medium.validate();
  return Duration::from_s(2.0 * length_km * 1000.0 * medium.group_index / c0);
}

Duration sp_lifetime(double psw_length_m, const MediumParams& medium) {
  if (!(psw_length_m > 0.0)) {
    throw std::domain_error("PSW length must be positive");
  }
  medium.validate();
  return Duration::from_s(psw_length_m / medium.psw_group_velocity_mps);
}

}  // namespace fransonlab
