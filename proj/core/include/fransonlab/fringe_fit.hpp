#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fransonlab {

/// One row of a phase scan: counts collected in the analysis window at one
/// phase setting.
struct FringeRecord {
  double phase_rad = 0.0;
  double counts = 0.0;  // integer for sampled data, expectation for the analytic engine
  long long starts = 0;
  double integration_s = 0.0;
};

/// Result of the sinusoidal fit N(phi) = a (1 + V cos(phi + phi0)).
struct FringeFit {
  double offset = 0.0;     // a
  double amplitude = 0.0;  // a * V
  double phase0_rad = 0.0;
  double visibility = 0.0;
  double sigma_visibility = 0.0;
  double chi2_reduced = 0.0;
  int n_points = 0;
};

/// Weighted least squares of N(phi) = a (1 + V cos(phi + phi0)), linearized on
/// the basis {1, cos phi, sin phi} so the normal equations solve exactly.
/// Weights are Poissonian, 1/max(counts, 1). Requires at least 4 records and
/// at least 3 distinct phases spanning more than pi; throws on a degenerate
/// design or a non-positive fitted offset.
FringeFit fit_fringe(std::span<const FringeRecord> records);

/// Fringe contrast (nmax - nmin) / (nmax + nmin).
double visibility_from_extrema(double nmax, double nmin);

struct CorrectedVisibility {
  double visibility = 0.0;
  bool clamped = false;  // raw estimate exceeded 1 and was clamped
};

/// Removes the dilution of a fitted visibility by a flat accidental floor:
/// V_intrinsic = V_fit * (1 + accidental_rate / signal_rate).
CorrectedVisibility accidental_corrected_visibility(double v_fit, double signal_rate_hz,
                                                    double accidental_rate_hz);

struct ReferenceComparison {
  double distance_sigma = 0.0;
  double k = 2.0;
  bool compatible = false;
};

/// Distance between a fitted visibility and a reference value in units of the
/// combined 1-sigma uncertainty, with a compatibility verdict at k sigma.
ReferenceComparison compare_to_reference(const FringeFit& fit, double reference_v,
                                         double reference_sigma, double k = 2.0);

}  // namespace fransonlab
