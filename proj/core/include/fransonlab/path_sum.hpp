#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fransonlab/circuit.hpp"

namespace fransonlab {

using Amplitude = std::complex<double>;

/// One fully-resolved path alternative of a single photon through its chain:
/// the arm choices taken, the accumulated delay snapped to the slot grid, the
/// exit port and the exact amplitude. Detector ports are >= 0, unobserved
/// exits (scattering, complementary interferometer ports, taps) are < 0.
struct PhotonTerminal {
  int port = 0;
  std::int64_t slot_ps = 0;
  Amplitude amplitude;
  std::string arms;                       // 'S'/'L' per interferometer traversal
  std::vector<double> sp_excitations_ps;  // times the path excited a stripe waveguide
};

struct PropagationResult {
  std::vector<PhotonTerminal> terminals;
  std::map<int, std::string> port_names;
};

/// Exhaustive per-photon path enumeration with exact amplitudes. Every step is
/// an isometry (each 1/2 per interferometer arm is matched by the
/// complementary port, each sqrt(T) by an unobserved sqrt(1-T) branch), so the
/// squared terminal amplitudes sum to one.
PropagationResult propagate_photon(const std::vector<Component>& chain,
                                   const std::string& detector_name);

struct JointPath {
  std::string label;      // per-photon arm strings joined with '|'
  std::string ports;      // per-photon port names joined with '|'
  std::string delays_ps;  // per-photon slots joined with '|'
  Amplitude amplitude;
  double probability = 0.0;
};

/// Joint path table for the oracle output: the cartesian product of the
/// per-photon enumerations (plus the pair-filter reject branch for pair
/// sources). Probabilities sum to one.
std::vector<JointPath> enumerate_paths(const OpticalCircuit& circuit);

// --- time-bin state ----------------------------------------------------------

constexpr int kPairFilteredPort = -1000000;

/// Amplitudes over observable outcome classes.
///
/// A class key lists (arrival slot, port) per photon. For pulsed sources the
/// slots are absolute (relative to the pulse); for a cw-pumped pair the pair
/// emission time is unobservable, so photon slots are recorded relative to the
/// first photon and each coherent term keeps the absolute offset ("shift") it
/// would need to coincide with the others. Cross terms between alternatives
/// with different shifts are weighted by the pump-coherence overlap
/// exp(-4 ln2 (dt/tau_pump)^2); a scalar cross attenuation models residual
/// path-length mismatch between the analyzers.
class TimeBinState {
 public:
  using Key = std::vector<std::pair<std::int64_t, int>>;  // (slot_ps, port) per photon

  struct Term {
    Amplitude amplitude;
    double shift_ps = 0.0;
  };

  void add_term(const Key& key, Amplitude amplitude, double shift_ps);
  void set_pump_coherence(Duration tau);  // s() <= 0 keeps full coherence
  void scale_cross_terms(double factor);

  /// Fully-coherent amplitude of a class (sum of terms).
  Amplitude amplitude(const Key& key) const;
  /// Physical probability of the class, including overlap weights.
  double probability(const Key& key) const;
  double total_probability() const;
  /// Probability routed to classes touching any unobserved port.
  double lost_probability() const;
  double cross_attenuation() const { return cross_attenuation_; }

  const std::map<Key, std::vector<Term>>& classes() const { return classes_; }

 private:
  double overlap(double dshift_ps) const;

  std::map<Key, std::vector<Term>> classes_;
  double cross_attenuation_ = 1.0;
  double pump_coherence_ps_ = 0.0;  // 0 = ideally coherent
};

/// State of a single photon (or weak pulse) after its chain; slots are
/// absolute relative to the emission.
TimeBinState evaluate_single(const OpticalCircuit& circuit);

/// Joint state of a cw-pumped photon pair; classes are keyed on the
/// arrival-slot difference, and the pump-coherence overlap weights cross terms
/// between alternatives requiring different emission times.
TimeBinState evaluate_pair_cw(const OpticalCircuit& circuit);

/// Multiplies every interference cross term by the Gaussian wavepacket overlap
/// exp(-4 ln2 (mismatch/L_c)^2). Diagonal terms are untouched and the total
/// probability is preserved.
TimeBinState apply_path_mismatch(const TimeBinState& state, double mismatch_m,
                                 double coherence_length_m);

double gaussian_overlap(double mismatch, double coherence_scale);

// --- closed forms ------------------------------------------------------------

enum class FransonPeak { early, central, late };

/// Closed-form joint detection probability of the two-photon arrangement,
/// independent of the path enumeration. Central peak:
///   T_pair T_1 T_2 (1/8)(1 + V0 M cos(phi_a + phi_b))
/// with V0 the pump-coherence overlap across the imbalance and M an optional
/// analyzer-mismatch attenuation of the cross term; side peaks are
/// phase-independent at T_pair T_1 T_2 / 16. Rejects circuits that are not
/// the two-photon topology.
double franson_joint_probability(double phi_a_rad, double phi_b_rad, FransonPeak peak,
                                 const OpticalCircuit& circuit,
                                 double cross_attenuation = 1.0);

/// Mean photon number reaching the interfering slot per pulse and per unit
/// mean photon number at the interferometer input.
double plugandplay_central_flux(double phi_rad, const OpticalCircuit& circuit,
                                double cross_attenuation = 1.0);

/// Closed-form click probability per pulse in the interfering slot of the
/// auto-compensating circuit: 1 - exp(-mu_det (1 + V cos phi)/2), where
/// mu_det = mu * (path transmissions) * detector_efficiency. Both interfering
/// alternatives traverse the stripe waveguide exactly once, so V does not
/// depend on its transmission. Rejects circuits that are not the
/// auto-compensating topology.
double plugandplay_detection_probability(double phi_rad, const OpticalCircuit& circuit,
                                         double detector_efficiency = 1.0,
                                         double cross_attenuation = 1.0);

}  // namespace fransonlab
