#include "fransonlab/circuit.hpp"

#include <cmath>

#include "fransonlab/constants.hpp"

namespace fransonlab {

PswChannel PswChannel::from_length(double length_m, double transmission,
                                   const MediumParams& medium) {
  medium.validate();
  if (!(length_m > 0.0)) {
    throw CircuitError("PSW length must be positive");
  }
  PswChannel psw;
  psw.length_m = length_m;
  psw.transmission = transmission;
  psw.delay = sp_lifetime(length_m, medium);
  return psw;
}

double BraggFilterPair::pair_transmission() const {
  if (!(source_bandwidth_m > 0.0)) {
    throw CircuitError("source bandwidth must be positive");
  }
  const double t = filter.fwhm_m / source_bandwidth_m;
  return t > 1.0 ? 1.0 : t;
}

Wavelength BraggFilterPair::idler_center(Wavelength pump) const {
  return complementary_wavelength(filter.center, pump);
}

namespace {

void require_transmission(double t, const std::string& where) {
  if (!(t >= 0.0) || !(t <= 1.0)) {
    throw CircuitError(where + ": transmission must lie in [0, 1], got " + std::to_string(t));
  }
}

void require_nonneg_delay(Duration d, const std::string& where) {
  if (d.s() < 0.0) {
    throw CircuitError(where + ": delay must be non-negative");
  }
}

void validate_chain(const std::vector<Component>& chain, const std::string& chain_name) {
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const std::string where = chain_name + "[" + std::to_string(i) + "] " +
                              component_name(chain[i]);
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, LossElement>) {
            require_transmission(c.transmission, where);
          } else if constexpr (std::is_same_v<T, DelayElement>) {
            require_nonneg_delay(c.delay, where);
          } else if constexpr (std::is_same_v<T, PswElement>) {
            require_transmission(c.psw.transmission, where);
            require_nonneg_delay(c.psw.delay, where);
          } else if constexpr (std::is_same_v<T, SpoolElement>) {
            require_transmission(c.transmission, where);
            require_nonneg_delay(c.one_way_delay, where);
          } else if constexpr (std::is_same_v<T, MirrorElement>) {
            require_transmission(c.reflectivity, where);
          } else if constexpr (std::is_same_v<T, CouplerElement>) {
            require_transmission(c.split_ratio, where);
          } else if constexpr (std::is_same_v<T, InterferometerElement>) {
            require_nonneg_delay(c.imbalance, where);
            require_transmission(c.short_transmission, where + " short arm");
            require_transmission(c.long_transmission, where + " long arm");
            if (c.short_arm_psw) {
              require_transmission(c.short_arm_psw->transmission, where + " short-arm psw");
            }
            if (c.long_arm_psw) {
              require_transmission(c.long_arm_psw->transmission, where + " long-arm psw");
            }
          }
        },
        chain[i]);
  }
}

}  // namespace

std::string component_name(const Component& component) {
  return std::visit([](const auto& c) { return c.name; }, component);
}

void validate_circuit(const OpticalCircuit& circuit) {
  const bool is_pair = std::holds_alternative<SpdcSource>(circuit.source);
  if (!is_pair && !circuit.photon_b.empty()) {
    throw CircuitError("single-photon source cannot feed a second photon chain");
  }
  if (is_pair && circuit.photon_b.empty()) {
    throw CircuitError("pair source requires two photon chains");
  }
  if (is_pair && !circuit.pair_filter) {
    throw CircuitError("pair source requires the pair-selecting filter stage");
  }
  if (circuit.pair_filter) {
    require_transmission(circuit.pair_filter->pair_transmission(), "pair filter");
  }
  if (circuit.photon_a.empty()) {
    throw CircuitError("photon chain photon_a is empty (dangling source output)");
  }
  validate_chain(circuit.photon_a, "photon_a");
  validate_chain(circuit.photon_b, "photon_b");
}

OpticalCircuit build_franson_circuit(const FransonParams& params) {
  params.medium.validate();
  OpticalCircuit circuit;
  circuit.source = params.source;
  circuit.pair_filter = params.filter;
  circuit.detector_a = "D1";
  circuit.detector_b = "D2";

  const double mismatch_delay_s =
      params.source_path_mismatch_m * params.medium.group_index / constants::speed_of_light_mps;

  auto make_arm = [&](double channel_t, Duration channel_delay, const PswChannel& psw,
                      double phase, bool add_mismatch) {
    std::vector<Component> chain;
    chain.push_back(LossElement{channel_t, "channel"});
    Duration delay = channel_delay;
    if (add_mismatch) {
      delay = delay + Duration::from_s(mismatch_delay_s);
    }
    chain.push_back(DelayElement{delay, "fiber"});
    chain.push_back(PswElement{psw, "psw"});
    InterferometerElement analyzer;
    analyzer.imbalance = params.imbalance;
    analyzer.phase_rad = phase;
    analyzer.name = "michelson";
    chain.push_back(analyzer);
    return chain;
  };

  circuit.photon_a = make_arm(params.trigger_channel_transmission, params.trigger_channel_delay,
                              params.trigger_psw, params.phase_a_rad, false);
  circuit.photon_b = make_arm(params.gated_channel_transmission, params.gated_channel_delay,
                              params.gated_psw, params.phase_b_rad, true);
  validate_circuit(circuit);
  return circuit;
}

namespace {

// Per-traversal extra delay of each Mach-Zehnder arm, including an embedded
// stripe waveguide.
void temporal_arm_extras(const TemporalParams& params, std::int64_t& short_extra_ps,
                         std::int64_t& long_extra_ps) {
  const std::int64_t psw_ps = params.psw.delay.round_ps();
  short_extra_ps = params.psw_in_long_arm ? 0 : psw_ps;
  long_extra_ps = params.mz_imbalance.round_ps() + (params.psw_in_long_arm ? psw_ps : 0);
}

}  // namespace

OpticalCircuit build_temporal_circuit(const TemporalParams& params) {
  params.medium.validate();
  std::int64_t short_extra = 0;
  std::int64_t long_extra = 0;
  temporal_arm_extras(params, short_extra, long_extra);
  if (!(params.source.pulse_length.ps() < static_cast<double>(long_extra - short_extra))) {
    throw CircuitError(
        "interferometer imbalance must exceed the pulse length or the arrival bins overlap");
  }
  OpticalCircuit circuit;
  circuit.source = params.source;
  circuit.detector_a = "D";

  auto traversal = [&](double phase, const std::string& name) {
    InterferometerElement mz;
    mz.imbalance = params.mz_imbalance;
    mz.phase_rad = phase;
    if (params.psw_in_long_arm) {
      mz.long_arm_psw = params.psw;
    } else {
      mz.short_arm_psw = params.psw;
    }
    mz.name = name;
    return mz;
  };

  const double spool_pass_t = std::sqrt(params.spool_round_trip_transmission);
  // Outbound pass carries no modulation; the scan phase is applied in
  // synchronization with the returning pulses only.
  circuit.photon_a.push_back(traversal(0.0, "mz.out"));
  circuit.photon_a.push_back(SpoolElement{params.spool_one_way_delay, spool_pass_t, "spool.out"});
  circuit.photon_a.push_back(MirrorElement{1.0, "faraday_mirror"});
  circuit.photon_a.push_back(SpoolElement{params.spool_one_way_delay, spool_pass_t, "spool.back"});
  circuit.photon_a.push_back(traversal(params.phase_rad, "mz.return"));
  validate_circuit(circuit);
  return circuit;
}

TemporalSlots temporal_slots(const TemporalParams& params) {
  std::int64_t short_extra = 0;
  std::int64_t long_extra = 0;
  temporal_arm_extras(params, short_extra, long_extra);
  const std::int64_t spool_rt = 2 * params.spool_one_way_delay.round_ps();
  TemporalSlots slots;
  slots.early_ps = spool_rt + 2 * short_extra;
  slots.central_ps = spool_rt + short_extra + long_extra;
  slots.late_ps = spool_rt + 2 * long_extra;
  return slots;
}

}  // namespace fransonlab
