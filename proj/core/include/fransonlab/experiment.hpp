#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fransonlab/circuit.hpp"
#include "fransonlab/constants.hpp"
#include "fransonlab/detection.hpp"
#include "fransonlab/fringe_fit.hpp"
#include "fransonlab/histogram.hpp"
#include "fransonlab/path_sum.hpp"

namespace fransonlab {

enum class EngineKind { analytic, montecarlo, both };

struct ScanSettings {
  double start_rad = 0.0;
  double stop_rad = 4.0 * constants::pi;
  int steps = 20;

  std::vector<double> phases() const;
};

struct TacSettings {
  Duration bin_width = Duration::from_ps(100.0);
  Duration range = Duration::from_ns(3.0);
  Duration window_half_width = Duration::from_ps(300.0);
  std::optional<Duration> window_center;  // defaults to the central-peak position
};

/// Two-photon experiment: pair source, stripe waveguides, matched analyzers,
/// passive trigger detector gating the stop detector, TAC and window counting.
/// The scanned phase is applied to the second analyzer; the first stays fixed.
struct FransonExperiment {
  FransonParams circuit;
  DetectorParams trigger_detector;
  DetectorParams gated_detector;
  Duration system_dead_time = Duration::from_us(10.0);  // on the trigger/TAC start channel
  std::optional<Duration> gate_delay;                   // defaults to centering the gate
  TacSettings tac;
  double target_trigger_singles_hz = 20000.0;
  double pair_rate_hz = 0.0;  // 0 derives the source rate from the singles target
  ScanSettings scan;
  double integration_time_s = 10.0;
  int shards = 4;
  std::uint64_t seed = 1;
};

/// Analytic rate budget of the two-photon experiment, fringe-averaged where a
/// quantity depends on the scanned phase. Also the calibration helper that
/// back-solves the source pair rate from the trigger singles target.
struct RateReport {
  double source_pair_rate_hz = 0.0;
  double filtered_pair_rate_hz = 0.0;
  double trigger_arrival_hz = 0.0;
  double trigger_signal_hz = 0.0;
  double trigger_dark_hz = 0.0;
  double trigger_click_hz = 0.0;
  double start_rate_hz = 0.0;
  double dead_time_throughput = 1.0;
  double stop_arrival_uncorrelated_hz = 0.0;
  double stop_click_uncorrelated_hz = 0.0;
  double coincidence_hz_mean = 0.0;
  double true_window_hz_mean = 0.0;
  double accidental_window_hz = 0.0;
  double accidental_to_true = 0.0;
};

RateReport derive_rates(const FransonExperiment& experiment);

struct FransonRunStats {
  long long trigger_signal_clicks = 0;
  long long trigger_dark_clicks = 0;
  long long starts = 0;
  long long coincidences = 0;
  double simulated_seconds = 0.0;
};

struct ScanResult {
  std::vector<FringeRecord> analytic;
  std::vector<FringeRecord> montecarlo;
  RateReport rates;
  FransonRunStats stats;
};

/// Rejects inconsistent configurations (wrong detector modes, windows outside
/// the TAC range, missing trigger chain for a gated stop).
void validate_experiment(const FransonExperiment& experiment);

/// One physical criterion of the modeled experiment, reported by the validate
/// command and asserted before any run.
struct PhysicsCheck {
  std::string name;
  std::string detail;
  bool pass = false;
};

std::vector<PhysicsCheck> physics_checks(const FransonExperiment& experiment);

/// Hard form of the coherence criterion: the filtered coherence length must be
/// smaller than the shortest stripe waveguide. Throws when violated; called
/// when a run or rate derivation is built.
void require_coherence_criterion(const FransonExperiment& experiment);

ScanResult run_franson_scan(const FransonExperiment& experiment, EngineKind engine);

/// Single-photon temporal-superposition experiment: pulsed source, two-pass
/// auto-compensating interferometer, gated detector on the interfering slot.
struct TemporalExperiment {
  TemporalParams circuit;
  DetectorParams detector;
  double mu_at_interferometer = 1.0;  // short + long arm mean photon number
  double pre_interferometer_transmission = 1.0;
  double spool_length_km = 0.0;  // informational; delay/transmission live in circuit
  double spool_attenuation_db_per_km = 0.2;
  ScanSettings scan;
  long long pulses_per_point = 10'000'000;
  int shards = 4;
  std::uint64_t seed = 1;
};

struct TemporalRates {
  double launched_mu = 0.0;
  double mu_at_interferometer = 0.0;
  double central_flux_bright = 0.0;       // per input photon, at phase 0
  double click_probability_bright = 0.0;  // per pulse, before dead time
  double click_probability_dark = 0.0;    // darkest point of the fringe
  double mean_click_rate_hz = 0.0;
  TemporalSlots slots;
  Duration spool_round_trip;
  Duration sp_transit;
  double delay_lifetime_ratio = 0.0;
};

TemporalRates derive_temporal_rates(const TemporalExperiment& experiment);

void validate_experiment(const TemporalExperiment& experiment);

std::vector<PhysicsCheck> physics_checks(const TemporalExperiment& experiment);

ScanResult run_temporal_superposition_scan(const TemporalExperiment& experiment,
                                           EngineKind engine);

/// Worker threads used to execute shards, capped by FRANSONLAB_THREADS.
int worker_thread_limit();

}  // namespace fransonlab
