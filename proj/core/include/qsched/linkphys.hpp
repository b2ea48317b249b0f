#pragma once

// Photon-pair source, channel loss and detection model for a dual
// downlink.

#include <utility>
#include <vector>

namespace qsched {

struct SourceParams {
  double mean_photon_number = 0.0078;  // per mode
  double repetition_rate = 1e9;        // attempts per second
  int sign = -1;                       // branch of the emitted Bell state

  bool operator==(const SourceParams&) const = default;
};

struct ArmChannel {
  double transmissivity = 0.0;
  double dark_click_prob = 0.0;  // per detector, per gate
};

struct PairOutcome {
  double success_prob = 0.0;
  double fidelity = 0.0;
  double edr = 0.0;  // ebits per second
};

struct OpticsParams {
  double tx_radius = 0.1;
  double rx_radius = 1.0;
  double wavelength = 737e-9;
  double tx_efficiency = 0.7;
  double rx_efficiency = 0.7;
  // Collecting aperture of a reflecting satellite.
  double relay_radius = 1.0;

  bool operator==(const OpticsParams&) const = default;
};

// Background-light detection window at the receivers.
struct DetectorParams {
  double gate_s = 1e-9;
  double bandwidth_nm = 1.0;
  double fov_sr = 1e-10;

  bool operator==(const DetectorParams&) const = default;
};

inline constexpr double kPlanck = 6.62607015e-34;
inline constexpr double kSpeedOfLight = 299792458.0;

// Probability of n pairs from a thermal pair source with mean photon
// number N_s per mode: (n+1) N_s^n / (N_s+1)^(n+2).
double emission_prob(double mean_photon_number, int n);

// Sum of emission_prob over all n > max_n, in closed form.
double emission_tail(double mean_photon_number, int max_n);

// Far-field aperture-to-aperture coupling, clamped to 1.
double aperture_coupling(double radius_a, double radius_b, double wavelength,
                         double distance);

// Satellite-to-ground diffraction-limited transmissivity.
double free_space_transmissivity(const OpticsParams& optics, double slant_range);

// Source satellite to reflecting satellite.
double inter_satellite_transmissivity(const OpticsParams& optics, double distance);

double arm_transmissivity(double free_space, double atmospheric,
                          double tx_efficiency, double rx_efficiency);

// Background photons per gate, read as a dark-click probability (clamped
// to 1). Irradiance in uW cm^-2 sr^-1 nm^-1.
double dark_click_prob(double irradiance, double gate_s, double bandwidth_nm,
                       double fov_sr, double rx_radius, double wavelength);

double dark_click_prob(double irradiance, const DetectorParams& detector,
                       const OpticsParams& optics);

// Dual-rail post-selected pair delivered through two lossy, noisy arms.
//
// The source emits up to two pairs (normalised over n <= 2). Every photon
// survives its arm independently with the arm transmissivity; each station
// has one threshold detector per rail, and an empty detector fires with the
// arm's dark-click probability. A round is accepted when each station sees
// exactly one of its two detectors fire. The fidelity is the share of
// accepted rounds produced by a single pair with both photons arriving and
// no spurious click on the empty rails.
PairOutcome end_to_end_outcome(const SourceParams& source, const ArmChannel& arm1,
                               const ArmChannel& arm2);

// Arms of a reflection-relayed pair: arm 1 is the source's own downlink,
// arm 2 goes source -> mirror satellite -> second station.
std::pair<ArmChannel, ArmChannel> reflection_arms(const ArmChannel& src_to_gs1,
                                                  double src_to_relay_free_space,
                                                  double mirror_efficiency,
                                                  const ArmChannel& relay_to_gs2);

struct RatePoint {
  double mean_photon_number = 0.0;
  double edr = 0.0;
  double fidelity = 0.0;
};

std::vector<RatePoint> rate_fidelity_curve(const std::vector<double>& mean_photon_numbers,
                                           const ArmChannel& arm1, const ArmChannel& arm2,
                                           double repetition_rate = 1e9);

}  // namespace qsched
