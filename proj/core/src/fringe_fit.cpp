#include "fransonlab/fringe_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fransonlab/constants.hpp"

namespace fransonlab {

namespace {

// Inverse of a symmetric positive-definite 3x3 matrix via the adjugate.
// Returns false when the determinant is numerically degenerate.
bool invert3(const double m[3][3], double inv[3][3], double scale) {
  const double c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const double c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  const double c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  const double det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
  if (!(std::abs(det) > 1e-12 * std::max(scale, 1e-300))) {
    return false;
  }
  inv[0][0] = c00 / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = c01 / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = c02 / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return true;
}

}  // namespace

FringeFit fit_fringe(std::span<const FringeRecord> records) {
  if (records.size() < 4) {
    throw std::invalid_argument("fit needs at least 4 records");
  }
  std::vector<double> distinct;
  for (const auto& r : records) {
    const double reduced = std::remainder(r.phase_rad, 2.0 * constants::pi);
    const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](double d) {
      return std::abs(std::remainder(d - reduced, 2.0 * constants::pi)) < 1e-9;
    });
    if (!seen) {
      distinct.push_back(reduced);
    }
  }
  const auto [min_it, max_it] = std::minmax_element(
      records.begin(), records.end(),
      [](const FringeRecord& x, const FringeRecord& y) { return x.phase_rad < y.phase_rad; });
  if (distinct.size() < 3 || !(max_it->phase_rad - min_it->phase_rad > constants::pi)) {
    throw std::invalid_argument("fit needs >= 3 distinct phases spanning more than pi");
  }

  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double v[3] = {0, 0, 0};
  for (const auto& r : records) {
    const double w = 1.0 / std::max(r.counts, 1.0);
    const double x[3] = {1.0, std::cos(r.phase_rad), std::sin(r.phase_rad)};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        m[i][j] += w * x[i] * x[j];
      }
      v[i] += w * x[i] * r.counts;
    }
  }

  double cov[3][3];
  if (!invert3(m, cov, m[0][0] * m[0][0] * m[0][0])) {
    throw std::runtime_error("degenerate phase design matrix");
  }
  double beta[3] = {0, 0, 0};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      beta[i] += cov[i][j] * v[j];
    }
  }
  const double a = beta[0];
  const double bc = beta[1];
  const double bs = beta[2];
  if (!(a > 0.0)) {
    throw std::runtime_error("fitted offset is not positive: pathological data");
  }

  FringeFit fit;
  fit.n_points = static_cast<int>(records.size());
  fit.offset = a;
  fit.amplitude = std::hypot(bc, bs);
  fit.visibility = fit.amplitude / a;
  fit.phase0_rad = std::atan2(-bs, bc);

  // Delta-method propagation of V = sqrt(bc^2 + bs^2) / a.
  const double s = fit.amplitude;
  double grad[3];
  if (s > 0.0) {
    grad[0] = -s / (a * a);
    grad[1] = bc / (s * a);
    grad[2] = bs / (s * a);
  } else {
    // Flat fringe: bound sigma_V by the amplitude uncertainties.
    grad[0] = 0.0;
    grad[1] = 1.0 / a;
    grad[2] = 1.0 / a;
  }
  double var = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      var += grad[i] * cov[i][j] * grad[j];
    }
  }
  fit.sigma_visibility = std::sqrt(std::max(var, 0.0));

  double chi2 = 0.0;
  for (const auto& r : records) {
    const double w = 1.0 / std::max(r.counts, 1.0);
    const double model = a + bc * std::cos(r.phase_rad) + bs * std::sin(r.phase_rad);
    chi2 += w * (r.counts - model) * (r.counts - model);
  }
  fit.chi2_reduced = chi2 / static_cast<double>(records.size() - 3);
  return fit;
}

double visibility_from_extrema(double nmax, double nmin) {
  if (!(nmax >= nmin) || nmin < 0.0 || !(nmax > 0.0)) {
    throw std::domain_error("extrema must satisfy nmax >= nmin >= 0 and nmax > 0");
  }
  return (nmax - nmin) / (nmax + nmin);
}

CorrectedVisibility accidental_corrected_visibility(double v_fit, double signal_rate_hz,
                                                    double accidental_rate_hz) {
  if (!(signal_rate_hz > 0.0) || accidental_rate_hz < 0.0) {
    throw std::domain_error("rates must satisfy signal > 0 and accidental >= 0");
  }
  const double raw = v_fit * (1.0 + accidental_rate_hz / signal_rate_hz);
  CorrectedVisibility out;
  out.clamped = raw > 1.0;
  out.visibility = out.clamped ? 1.0 : raw;
  return out;
}

ReferenceComparison compare_to_reference(const FringeFit& fit, double reference_v,
                                         double reference_sigma, double k) {
  ReferenceComparison out;
  out.k = k;
  const double sigma = std::sqrt(fit.sigma_visibility * fit.sigma_visibility +
                                 reference_sigma * reference_sigma);
  out.distance_sigma = sigma > 0.0 ? std::abs(fit.visibility - reference_v) / sigma
                                   : (fit.visibility == reference_v ? 0.0 : INFINITY);
  out.compatible = out.distance_sigma <= k;
  return out;
}

}  // namespace fransonlab
