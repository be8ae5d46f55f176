#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fransonlab/photonics.hpp"
#include "fransonlab/units.hpp"

namespace fransonlab {

class CircuitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fiber-coupled plasmonic stripe waveguide: the photon is converted to a
/// surface plasmon at the input, propagates, and is recollected at the output.
struct PswChannel {
  double length_m = 0.0;
  double transmission = 1.0;
  Duration delay;  // group delay across the stripe

  static PswChannel from_length(double length_m, double transmission,
                                const MediumParams& medium);
};

struct SpdcSource {
  Wavelength pump = Wavelength::from_nm(773.0);
  Duration pump_coherence_time;  // s() <= 0 means ideally monochromatic
  double pair_rate_hz = 0.0;
};

/// Pair-level spectral selection: reflecting one narrow band and the
/// energy-matched complement selects whole pairs, so the in-band probability
/// applies once per pair, not once per photon.
struct BraggFilterPair {
  SpectralFilter filter;
  double source_bandwidth_m = 0.0;

  double pair_transmission() const;
  Wavelength idler_center(Wavelength pump) const;
};

struct PulsedSource {
  double repetition_rate_hz = 5.0e6;
  Duration pulse_length = Duration::from_ns(1.2);
  double mean_photon_number = 1.0;
};

// --- chain components -------------------------------------------------------

struct LossElement {
  double transmission = 1.0;
  std::string name = "loss";
};

struct DelayElement {
  Duration delay;
  std::string name = "delay";
};

struct PswElement {
  PswChannel psw;
  std::string name = "psw";
};

struct SpoolElement {
  Duration one_way_delay;
  double transmission = 1.0;
  std::string name = "spool";
};

struct MirrorElement {
  double reflectivity = 1.0;
  std::string name = "mirror";
};

/// Tap coupler: the followed branch keeps sqrt(split_ratio) of the amplitude,
/// the other branch is not observed further.
struct CouplerElement {
  double split_ratio = 0.5;
  std::string name = "coupler";
};

/// One traversal of an unbalanced two-arm interferometer (Michelson or
/// Mach-Zehnder) towards a fixed continuing port. Each arm contributes
/// amplitude 1/2 to the continuing port; the complementary port is kept as an
/// unobserved exit so that probability is conserved exactly. The phase is
/// applied in the long arm, and an optional stripe waveguide can sit inside
/// either arm.
struct InterferometerElement {
  Duration imbalance;  // long-arm delay in excess of the short arm
  double phase_rad = 0.0;
  double short_transmission = 1.0;
  double long_transmission = 1.0;
  std::optional<PswChannel> short_arm_psw;
  std::optional<PswChannel> long_arm_psw;
  std::string name = "if";
};

using Component = std::variant<LossElement, DelayElement, PswElement, SpoolElement,
                               MirrorElement, CouplerElement, InterferometerElement>;

struct OpticalCircuit {
  std::variant<SpdcSource, PulsedSource> source;
  std::optional<BraggFilterPair> pair_filter;  // SPDC only
  std::vector<Component> photon_a;
  std::vector<Component> photon_b;  // empty for single-photon circuits
  std::string detector_a = "D";
  std::string detector_b = "D2";

  int photon_count() const { return photon_b.empty() ? 1 : 2; }
};

/// Rejects malformed circuits: out-of-range transmissions, negative delays,
/// a second photon chain on a single-photon source, and so on. Errors name
/// the offending component.
void validate_circuit(const OpticalCircuit& circuit);

std::string component_name(const Component& component);

// --- preset builders ---------------------------------------------------------

/// Two-photon arrangement: SPDC source, pair-selecting Bragg filters, one
/// stripe waveguide and one unbalanced Michelson per photon.
struct FransonParams {
  SpdcSource source;
  BraggFilterPair filter;
  double trigger_channel_transmission = 0.2;
  double gated_channel_transmission = 0.02;
  PswChannel trigger_psw;
  PswChannel gated_psw;
  Duration trigger_channel_delay;
  Duration gated_channel_delay;
  Duration imbalance = Duration::from_ps(1200.0);
  double phase_a_rad = 0.0;
  double phase_b_rad = 0.0;
  double imbalance_mismatch_m = 0.0;     // residual length mismatch between the analyzers
  double source_path_mismatch_m = 0.0;   // source-to-PSW path length inequality
  MediumParams medium;
};

OpticalCircuit build_franson_circuit(const FransonParams& params);

/// Auto-compensating single-photon arrangement: unbalanced Mach-Zehnder with a
/// stripe waveguide in one arm, fiber spool, Faraday mirror, second pass with
/// the scan phase applied to the returning pulse.
struct TemporalParams {
  PulsedSource source;
  Duration mz_imbalance = Duration::from_ps(2400.0);
  PswChannel psw;
  bool psw_in_long_arm = true;
  Duration spool_one_way_delay;
  double spool_round_trip_transmission = 1.0;
  double phase_rad = 0.0;
  double path_mismatch_m = 0.0;
  MediumParams medium;
};

OpticalCircuit build_temporal_circuit(const TemporalParams& params);

/// Slot positions of the three arrival bins of the temporal circuit, in ps
/// relative to the pulse emission.
struct TemporalSlots {
  std::int64_t early_ps = 0;
  std::int64_t central_ps = 0;
  std::int64_t late_ps = 0;
};

TemporalSlots temporal_slots(const TemporalParams& params);

}  // namespace fransonlab
