#include "fransonlab/path_sum.hpp"

#include <algorithm>
#include <cmath>

#include "fransonlab/constants.hpp"

namespace fransonlab {

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;
const Amplitude imag_unit{0.0, 1.0};

struct Walker {
  std::int64_t slot_ps = 0;
  double exact_ps = 0.0;  // unsnapped time, kept for excitation metadata
  Amplitude amp{1.0, 0.0};
  std::string arms;
  std::vector<double> sp_ps;
};

}  // namespace

double gaussian_overlap(double mismatch, double coherence_scale) {
  if (!(coherence_scale > 0.0)) {
    return mismatch == 0.0 ? 1.0 : 0.0;
  }
  const double x = mismatch / coherence_scale;
  return std::exp(-4.0 * constants::ln2 * x * x);
}

PropagationResult propagate_photon(const std::vector<Component>& chain,
                                   const std::string& detector_name) {
  PropagationResult result;
  result.port_names[0] = detector_name;

  int next_loss_port = -1;
  auto new_port = [&](const std::string& name) {
    const int port = next_loss_port--;
    result.port_names[port] = name;
    return port;
  };
  auto spawn = [&](const Walker& w, Amplitude amp, int port) {
    if (std::norm(amp) > 0.0) {
      result.terminals.push_back({port, w.slot_ps, amp, w.arms, w.sp_ps});
    }
  };

  std::vector<Walker> walkers{Walker{}};
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const std::string tag = component_name(chain[i]) + "[" + std::to_string(i) + "]";
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, LossElement>) {
            const int port = new_port("loss:" + tag);
            const double keep = std::sqrt(c.transmission);
            const double lose = std::sqrt(1.0 - c.transmission);
            for (auto& w : walkers) {
              spawn(w, w.amp * lose, port);
              w.amp *= keep;
            }
          } else if constexpr (std::is_same_v<T, DelayElement>) {
            const std::int64_t d = c.delay.round_ps();
            for (auto& w : walkers) {
              w.slot_ps += d;
              w.exact_ps += c.delay.ps();
            }
          } else if constexpr (std::is_same_v<T, PswElement>) {
            const int port = new_port("loss:" + tag);
            const double keep = std::sqrt(c.psw.transmission);
            const double lose = std::sqrt(1.0 - c.psw.transmission);
            const std::int64_t d = c.psw.delay.round_ps();
            for (auto& w : walkers) {
              spawn(w, w.amp * lose, port);
              w.sp_ps.push_back(w.exact_ps);
              w.amp *= keep;
              w.slot_ps += d;
              w.exact_ps += c.psw.delay.ps();
            }
          } else if constexpr (std::is_same_v<T, SpoolElement>) {
            const int port = new_port("loss:" + tag);
            const double keep = std::sqrt(c.transmission);
            const double lose = std::sqrt(1.0 - c.transmission);
            const std::int64_t d = c.one_way_delay.round_ps();
            for (auto& w : walkers) {
              spawn(w, w.amp * lose, port);
              w.amp *= keep;
              w.slot_ps += d;
              w.exact_ps += c.one_way_delay.ps();
            }
          } else if constexpr (std::is_same_v<T, MirrorElement>) {
            const int port = new_port("loss:" + tag);
            const double keep = std::sqrt(c.reflectivity);
            const double lose = std::sqrt(1.0 - c.reflectivity);
            for (auto& w : walkers) {
              spawn(w, w.amp * lose, port);
              w.amp *= keep;
            }
          } else if constexpr (std::is_same_v<T, CouplerElement>) {
            const int port = new_port("tap:" + tag);
            const double keep = std::sqrt(c.split_ratio);
            const double lose = std::sqrt(1.0 - c.split_ratio);
            for (auto& w : walkers) {
              spawn(w, w.amp * lose, port);
              w.amp *= keep;
            }
          } else if constexpr (std::is_same_v<T, InterferometerElement>) {
            const int cmpl_port = new_port("cmpl:" + tag);
            const int short_loss = new_port("armloss:" + tag + ".S");
            const int long_loss = new_port("armloss:" + tag + ".L");
            const int short_psw_loss =
                c.short_arm_psw ? new_port("pswloss:" + tag + ".S") : 0;
            const int long_psw_loss = c.long_arm_psw ? new_port("pswloss:" + tag + ".L") : 0;
            const Amplitude phase = std::polar(1.0, c.phase_rad);
            const std::int64_t imbalance_ps = c.imbalance.round_ps();

            std::vector<Walker> next;
            next.reserve(2 * walkers.size());
            for (const auto& w : walkers) {
              // Short arm: straight at the entry coupler, cross at the exit.
              Walker ws = w;
              ws.arms += 'S';
              Amplitude a = w.amp * inv_sqrt2;
              if (c.short_arm_psw) {
                spawn(ws, a * std::sqrt(1.0 - c.short_arm_psw->transmission), short_psw_loss);
                ws.sp_ps.push_back(ws.exact_ps);
                a *= std::sqrt(c.short_arm_psw->transmission);
                ws.slot_ps += c.short_arm_psw->delay.round_ps();
                ws.exact_ps += c.short_arm_psw->delay.ps();
              }
              spawn(ws, a * std::sqrt(1.0 - c.short_transmission), short_loss);
              a *= std::sqrt(c.short_transmission);
              spawn(ws, a * inv_sqrt2, cmpl_port);
              ws.amp = a * imag_unit * inv_sqrt2;
              next.push_back(ws);

              // Long arm: cross at the entry coupler, straight at the exit;
              // carries the modulator phase and the extra imbalance delay.
              Walker wl = w;
              wl.arms += 'L';
              Amplitude b = w.amp * imag_unit * inv_sqrt2;
              if (c.long_arm_psw) {
                spawn(wl, b * std::sqrt(1.0 - c.long_arm_psw->transmission), long_psw_loss);
                wl.sp_ps.push_back(wl.exact_ps);
                b *= std::sqrt(c.long_arm_psw->transmission);
                wl.slot_ps += c.long_arm_psw->delay.round_ps();
                wl.exact_ps += c.long_arm_psw->delay.ps();
              }
              spawn(wl, b * std::sqrt(1.0 - c.long_transmission), long_loss);
              b *= std::sqrt(c.long_transmission) * phase;
              wl.slot_ps += imbalance_ps;
              wl.exact_ps += c.imbalance.ps();
              spawn(wl, b * imag_unit * inv_sqrt2, cmpl_port);
              wl.amp = b * inv_sqrt2;
              next.push_back(wl);
            }
            walkers = std::move(next);
          }
        },
        chain[i]);
  }

  for (const auto& w : walkers) {
    spawn(w, w.amp, 0);
  }
  return result;
}

std::vector<JointPath> enumerate_paths(const OpticalCircuit& circuit) {
  validate_circuit(circuit);
  const PropagationResult a = propagate_photon(circuit.photon_a, circuit.detector_a);

  std::vector<JointPath> paths;
  auto arm_label = [](const std::string& arms) { return arms.empty() ? std::string("-") : arms; };

  if (circuit.photon_count() == 1) {
    paths.reserve(a.terminals.size());
    for (const auto& t : a.terminals) {
      JointPath p;
      p.label = arm_label(t.arms);
      p.ports = a.port_names.at(t.port);
      p.delays_ps = std::to_string(t.slot_ps);
      p.amplitude = t.amplitude;
      p.probability = std::norm(t.amplitude);
      paths.push_back(std::move(p));
    }
    return paths;
  }

  const PropagationResult b = propagate_photon(circuit.photon_b, circuit.detector_b);
  const double t_pair = circuit.pair_filter->pair_transmission();
  const double pass = std::sqrt(t_pair);
  paths.reserve(a.terminals.size() * b.terminals.size() + 1);
  for (const auto& ta : a.terminals) {
    for (const auto& tb : b.terminals) {
      JointPath p;
      p.label = arm_label(ta.arms) + "|" + arm_label(tb.arms);
      p.ports = a.port_names.at(ta.port) + "|" + b.port_names.at(tb.port);
      p.delays_ps = std::to_string(ta.slot_ps) + "|" + std::to_string(tb.slot_ps);
      p.amplitude = ta.amplitude * tb.amplitude * pass;
      p.probability = std::norm(p.amplitude);
      paths.push_back(std::move(p));
    }
  }
  if (t_pair < 1.0) {
    JointPath p;
    p.label = "(filter-rejected)";
    p.ports = "-|-";
    p.delays_ps = "-|-";
    p.amplitude = std::sqrt(1.0 - t_pair);
    p.probability = 1.0 - t_pair;
    paths.push_back(std::move(p));
  }
  return paths;
}

// --- TimeBinState -------------------------------------------------------------

void TimeBinState::add_term(const Key& key, Amplitude amplitude, double shift_ps) {
  classes_[key].push_back({amplitude, shift_ps});
}

void TimeBinState::set_pump_coherence(Duration tau) {
  pump_coherence_ps_ = tau.s() > 0.0 ? tau.ps() : 0.0;
}

void TimeBinState::scale_cross_terms(double factor) { cross_attenuation_ *= factor; }

double TimeBinState::overlap(double dshift_ps) const {
  if (dshift_ps == 0.0) {
    return 1.0;
  }
  if (pump_coherence_ps_ <= 0.0) {
    return 1.0;
  }
  return gaussian_overlap(dshift_ps, pump_coherence_ps_);
}

Amplitude TimeBinState::amplitude(const Key& key) const {
  const auto it = classes_.find(key);
  if (it == classes_.end()) {
    return {0.0, 0.0};
  }
  Amplitude sum{0.0, 0.0};
  for (const auto& term : it->second) {
    sum += term.amplitude;
  }
  return sum;
}

double TimeBinState::probability(const Key& key) const {
  const auto it = classes_.find(key);
  if (it == classes_.end()) {
    return 0.0;
  }
  const auto& terms = it->second;
  double p = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    p += std::norm(terms[i].amplitude);
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      const double w =
          cross_attenuation_ * overlap(std::abs(terms[i].shift_ps - terms[j].shift_ps));
      p += 2.0 * w * (terms[i].amplitude * std::conj(terms[j].amplitude)).real();
    }
  }
  return p;
}

double TimeBinState::total_probability() const {
  double total = 0.0;
  for (const auto& [key, terms] : classes_) {
    total += probability(key);
  }
  return total;
}

double TimeBinState::lost_probability() const {
  double lost = 0.0;
  for (const auto& [key, terms] : classes_) {
    const bool unobserved = std::any_of(key.begin(), key.end(),
                                        [](const auto& photon) { return photon.second < 0; });
    if (unobserved) {
      lost += probability(key);
    }
  }
  return lost;
}

TimeBinState evaluate_single(const OpticalCircuit& circuit) {
  validate_circuit(circuit);
  if (circuit.photon_count() != 1) {
    throw CircuitError("evaluate_single requires a single-photon circuit");
  }
  const PropagationResult a = propagate_photon(circuit.photon_a, circuit.detector_a);
  TimeBinState state;
  for (const auto& t : a.terminals) {
    state.add_term({{t.slot_ps, t.port}}, t.amplitude, 0.0);
  }
  return state;
}

TimeBinState evaluate_pair_cw(const OpticalCircuit& circuit) {
  validate_circuit(circuit);
  if (circuit.photon_count() != 2) {
    throw CircuitError("evaluate_pair_cw requires a two-photon circuit");
  }
  const PropagationResult a = propagate_photon(circuit.photon_a, circuit.detector_a);
  const PropagationResult b = propagate_photon(circuit.photon_b, circuit.detector_b);
  const double t_pair = circuit.pair_filter->pair_transmission();
  const double pass = std::sqrt(t_pair);

  TimeBinState state;
  state.set_pump_coherence(std::get<SpdcSource>(circuit.source).pump_coherence_time);
  for (const auto& ta : a.terminals) {
    for (const auto& tb : b.terminals) {
      // The pair emission time is unobservable under cw pumping: key on the
      // arrival-slot difference and remember the absolute offset as the shift.
      const TimeBinState::Key key{{0, ta.port}, {tb.slot_ps - ta.slot_ps, tb.port}};
      state.add_term(key, ta.amplitude * tb.amplitude * pass,
                     static_cast<double>(ta.slot_ps));
    }
  }
  if (t_pair < 1.0) {
    state.add_term({{0, kPairFilteredPort}, {0, kPairFilteredPort}},
                   Amplitude{std::sqrt(1.0 - t_pair), 0.0}, 0.0);
  }
  return state;
}

TimeBinState apply_path_mismatch(const TimeBinState& state, double mismatch_m,
                                 double coherence_length_m) {
  if (!(coherence_length_m > 0.0)) {
    throw std::domain_error("coherence length must be positive");
  }
  TimeBinState out = state;
  out.scale_cross_terms(gaussian_overlap(mismatch_m, coherence_length_m));
  return out;
}

// --- closed forms -------------------------------------------------------------

namespace {

struct AnalyzedChain {
  double common_transmission = 1.0;  // everything outside the interferometer arms
  double short_transmission = 1.0;   // includes an embedded stripe waveguide
  double long_transmission = 1.0;
  Duration imbalance;
};

AnalyzedChain analyze_single_if_chain(const std::vector<Component>& chain,
                                      const std::string& chain_name) {
  AnalyzedChain out;
  int interferometers = 0;
  for (const auto& component : chain) {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, LossElement>) {
            out.common_transmission *= c.transmission;
          } else if constexpr (std::is_same_v<T, PswElement>) {
            out.common_transmission *= c.psw.transmission;
          } else if constexpr (std::is_same_v<T, SpoolElement>) {
            out.common_transmission *= c.transmission;
          } else if constexpr (std::is_same_v<T, MirrorElement>) {
            out.common_transmission *= c.reflectivity;
          } else if constexpr (std::is_same_v<T, CouplerElement>) {
            out.common_transmission *= c.split_ratio;
          } else if constexpr (std::is_same_v<T, InterferometerElement>) {
            ++interferometers;
            out.imbalance = c.imbalance;
            out.short_transmission = c.short_transmission;
            out.long_transmission = c.long_transmission;
            if (c.short_arm_psw) {
              out.short_transmission *= c.short_arm_psw->transmission;
            }
            if (c.long_arm_psw) {
              out.long_transmission *= c.long_arm_psw->transmission;
            }
          }
        },
        component);
  }
  if (interferometers != 1) {
    throw CircuitError(chain_name + ": expected exactly one analyzing interferometer, found " +
                       std::to_string(interferometers));
  }
  return out;
}

}  // namespace

double franson_joint_probability(double phi_a_rad, double phi_b_rad, FransonPeak peak,
                                 const OpticalCircuit& circuit, double cross_attenuation) {
  validate_circuit(circuit);
  if (circuit.photon_count() != 2 || !std::holds_alternative<SpdcSource>(circuit.source)) {
    throw CircuitError("franson_joint_probability requires the two-photon topology");
  }
  const AnalyzedChain a = analyze_single_if_chain(circuit.photon_a, "photon_a");
  const AnalyzedChain b = analyze_single_if_chain(circuit.photon_b, "photon_b");
  if (a.imbalance.round_ps() != b.imbalance.round_ps()) {
    throw CircuitError("analyzing interferometers must share the same imbalance");
  }
  const auto& source = std::get<SpdcSource>(circuit.source);
  const double v0 = source.pump_coherence_time.s() > 0.0
                        ? gaussian_overlap(a.imbalance.ps(), source.pump_coherence_time.ps())
                        : 1.0;
  const double common =
      circuit.pair_filter->pair_transmission() * a.common_transmission * b.common_transmission;

  // Per-photon arm amplitudes carry 1/2 each; the joint short-short and
  // long-long alternatives interfere in the central peak.
  const double amp_ss = 0.25 * std::sqrt(a.short_transmission * b.short_transmission);
  const double amp_ll = 0.25 * std::sqrt(a.long_transmission * b.long_transmission);
  switch (peak) {
    case FransonPeak::early:
      // Photon 1 long, photon 2 short: the pair's detection-time difference
      // sits one imbalance early.
      return common * 0.0625 * a.long_transmission * b.short_transmission;
    case FransonPeak::late:
      return common * 0.0625 * a.short_transmission * b.long_transmission;
    case FransonPeak::central:
      return common * (amp_ss * amp_ss + amp_ll * amp_ll +
                       2.0 * amp_ss * amp_ll * v0 * cross_attenuation *
                           std::cos(phi_a_rad + phi_b_rad));
  }
  throw std::logic_error("unreachable");
}

namespace {

struct PlugAndPlayTopology {
  double round_trip_common = 1.0;   // spools, mirror, couplers, plain losses
  double short_out = 1.0;           // per-traversal arm factors, excluding the waveguide
  double long_out = 1.0;
  double short_back = 1.0;
  double long_back = 1.0;
  double psw_transmission = 1.0;
  double mu = 0.0;
};

PlugAndPlayTopology analyze_plugandplay(const OpticalCircuit& circuit) {
  if (circuit.photon_count() != 1 || !std::holds_alternative<PulsedSource>(circuit.source)) {
    throw CircuitError("plug-and-play analysis requires the single-photon pulsed topology");
  }
  PlugAndPlayTopology out;
  out.mu = std::get<PulsedSource>(circuit.source).mean_photon_number;
  std::vector<const InterferometerElement*> traversals;
  for (const auto& component : circuit.photon_a) {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, LossElement>) {
            out.round_trip_common *= c.transmission;
          } else if constexpr (std::is_same_v<T, SpoolElement>) {
            out.round_trip_common *= c.transmission;
          } else if constexpr (std::is_same_v<T, MirrorElement>) {
            out.round_trip_common *= c.reflectivity;
          } else if constexpr (std::is_same_v<T, CouplerElement>) {
            out.round_trip_common *= c.split_ratio;
          } else if constexpr (std::is_same_v<T, PswElement>) {
            throw CircuitError("auto-compensating topology keeps the waveguide inside an arm");
          } else if constexpr (std::is_same_v<T, InterferometerElement>) {
            traversals.push_back(&c);
          }
        },
        component);
  }
  if (traversals.size() != 2) {
    throw CircuitError("auto-compensating topology requires two interferometer traversals");
  }
  const auto* out_pass = traversals[0];
  const auto* back_pass = traversals[1];
  if (out_pass->imbalance.round_ps() != back_pass->imbalance.round_ps()) {
    throw CircuitError("the two traversals must see the same imbalance");
  }
  for (const auto* t : {out_pass, back_pass}) {
    const bool psw_long = t->long_arm_psw.has_value();
    const bool psw_short = t->short_arm_psw.has_value();
    if (psw_long == psw_short) {
      throw CircuitError("the stripe waveguide must sit in exactly one arm");
    }
  }
  if (out_pass->long_arm_psw.has_value() != back_pass->long_arm_psw.has_value()) {
    throw CircuitError("the two traversals cross the same physical device: the waveguide "
                       "must sit in the same arm on both passes");
  }
  out.short_out = out_pass->short_transmission;
  out.long_out = out_pass->long_transmission;
  out.short_back = back_pass->short_transmission;
  out.long_back = back_pass->long_transmission;
  const PswChannel& psw = out_pass->long_arm_psw ? *out_pass->long_arm_psw
                                                 : *out_pass->short_arm_psw;
  out.psw_transmission = psw.transmission;
  return out;
}

}  // namespace

double plugandplay_central_flux(double phi_rad, const OpticalCircuit& circuit,
                                double cross_attenuation) {
  validate_circuit(circuit);
  const PlugAndPlayTopology topo = analyze_plugandplay(circuit);
  // Interfering alternatives: short-then-long and long-then-short, each with
  // amplitude 1/4 before transmissions and exactly one waveguide crossing.
  // The zero- and double-crossing alternatives land in the side bins.
  const double common = 0.0625 * topo.round_trip_common * topo.psw_transmission;
  const double p_sl = topo.short_out * topo.long_back;
  const double p_ls = topo.long_out * topo.short_back;
  return common * (p_sl + p_ls +
                   2.0 * std::sqrt(p_sl * p_ls) * cross_attenuation * std::cos(phi_rad));
}

double plugandplay_detection_probability(double phi_rad, const OpticalCircuit& circuit,
                                         double detector_efficiency, double cross_attenuation) {
  const PlugAndPlayTopology topo = analyze_plugandplay(circuit);
  const double mu_slot = topo.mu * plugandplay_central_flux(phi_rad, circuit, cross_attenuation);
  return 1.0 - std::exp(-detector_efficiency * mu_slot);
}

}  // namespace fransonlab
