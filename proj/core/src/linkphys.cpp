#include "qsched/linkphys.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qsched/error.hpp"
#include "qsched/orbital.hpp"

namespace qsched {
namespace {

// Probability that a station with `photons` surviving photons on each rail
// registers exactly one click across its two threshold detectors.
double single_click_prob(int rail0, int rail1, double eta, double dark) {
  const double miss = 1.0 - eta;
  const double fire0 = 1.0 - (1.0 - dark) * std::pow(miss, rail0);
  const double fire1 = 1.0 - (1.0 - dark) * std::pow(miss, rail1);
  return fire0 * (1.0 - fire1) + fire1 * (1.0 - fire0);
}

// One Fock component of the truncated source state: photon counts on
// (a0, a1; b0, b1) and its weight within its pair-number sector.
struct Component {
  int pairs;
  std::array<int, 4> rails;
  double share;
};

constexpr std::array<Component, 6> kComponents{{
    {0, {0, 0, 0, 0}, 1.0},
    {1, {1, 0, 0, 1}, 0.5},
    {1, {0, 1, 1, 0}, 0.5},
    {2, {2, 0, 0, 2}, 1.0 / 3.0},
    {2, {1, 1, 1, 1}, 1.0 / 3.0},
    {2, {0, 2, 2, 0}, 1.0 / 3.0},
}};

}  // namespace

double emission_prob(double mean_photon_number, int n) {
  if (n < 0) return 0.0;
  const double ns = mean_photon_number;
  if (ns == 0.0) return n == 0 ? 1.0 : 0.0;
  return (n + 1) * std::pow(ns, n) / std::pow(ns + 1.0, n + 2);
}

double emission_tail(double mean_photon_number, int max_n) {
  if (max_n < 0) return 1.0;
  const double ns = mean_photon_number;
  if (ns == 0.0) return 0.0;
  const double x = ns / (ns + 1.0);
  // sum_{n > K} (n+1) x^n (1-x)^2 = (K+2) x^(K+1) - (K+1) x^(K+2)
  const double xk1 = std::pow(x, max_n + 1);
  return (max_n + 2) * xk1 - (max_n + 1) * xk1 * x;
}

double aperture_coupling(double radius_a, double radius_b, double wavelength,
                         double distance) {
  if (!(distance > 0.0)) return 1.0;
  const double area_a = kPi * radius_a * radius_a;
  const double area_b = kPi * radius_b * radius_b;
  const double spread = wavelength * distance;
  return std::min(1.0, area_a * area_b / (spread * spread));
}

double free_space_transmissivity(const OpticsParams& optics, double slant_range) {
  return aperture_coupling(optics.tx_radius, optics.rx_radius, optics.wavelength, slant_range);
}

double inter_satellite_transmissivity(const OpticsParams& optics, double distance) {
  return aperture_coupling(optics.tx_radius, optics.relay_radius, optics.wavelength, distance);
}

double arm_transmissivity(double free_space, double atmospheric,
                          double tx_efficiency, double rx_efficiency) {
  return free_space * atmospheric * tx_efficiency * rx_efficiency;
}

double dark_click_prob(double irradiance, double gate_s, double bandwidth_nm,
                       double fov_sr, double rx_radius, double wavelength) {
  // uW cm^-2 -> W m^-2
  const double radiance = irradiance * 1e-6 / 1e-4;
  const double energy = radiance * gate_s * bandwidth_nm * fov_sr * (kPi * rx_radius * rx_radius);
  const double photon_energy = kPlanck * kSpeedOfLight / wavelength;
  return std::clamp(energy / photon_energy, 0.0, 1.0);
}

double dark_click_prob(double irradiance, const DetectorParams& detector,
                       const OpticsParams& optics) {
  return dark_click_prob(irradiance, detector.gate_s, detector.bandwidth_nm, detector.fov_sr,
                         optics.rx_radius, optics.wavelength);
}

PairOutcome end_to_end_outcome(const SourceParams& source, const ArmChannel& arm1,
                               const ArmChannel& arm2) {
  const double ns = source.mean_photon_number;
  const std::array<double, 3> sector{emission_prob(ns, 0), emission_prob(ns, 1),
                                     emission_prob(ns, 2)};
  const double norm = sector[0] + sector[1] + sector[2];

  const double eta1 = std::clamp(arm1.transmissivity, 0.0, 1.0);
  const double eta2 = std::clamp(arm2.transmissivity, 0.0, 1.0);
  const double dark1 = std::clamp(arm1.dark_click_prob, 0.0, 1.0);
  const double dark2 = std::clamp(arm2.dark_click_prob, 0.0, 1.0);

  double accepted = 0.0;
  for (const auto& c : kComponents) {
    const double weight = sector[c.pairs] * c.share;
    accepted += weight * single_click_prob(c.rails[0], c.rails[1], eta1, dark1) *
                single_click_prob(c.rails[2], c.rails[3], eta2, dark2);
  }
  accepted /= norm;

  const double bell = sector[1] / norm * eta1 * eta2 * (1.0 - dark1) * (1.0 - dark2);

  PairOutcome out;
  out.success_prob = std::clamp(accepted, 0.0, 1.0);
  out.fidelity = accepted > 0.0 ? std::clamp(bell / accepted, 0.0, 1.0) : 0.0;
  out.edr = source.repetition_rate * out.success_prob;
  return out;
}

std::pair<ArmChannel, ArmChannel> reflection_arms(const ArmChannel& src_to_gs1,
                                                  double src_to_relay_free_space,
                                                  double mirror_efficiency,
                                                  const ArmChannel& relay_to_gs2) {
  ArmChannel relayed{src_to_relay_free_space * mirror_efficiency * relay_to_gs2.transmissivity,
                     relay_to_gs2.dark_click_prob};
  return {src_to_gs1, relayed};
}

std::vector<RatePoint> rate_fidelity_curve(const std::vector<double>& mean_photon_numbers,
                                           const ArmChannel& arm1, const ArmChannel& arm2,
                                           double repetition_rate) {
  std::vector<RatePoint> curve;
  curve.reserve(mean_photon_numbers.size());
  for (double ns : mean_photon_numbers) {
    if (!(ns >= 0.0)) throw ParameterError("linkphys", "mean photon number must be nonnegative");
    const auto out = end_to_end_outcome({ns, repetition_rate, -1}, arm1, arm2);
    curve.push_back({ns, out.edr, out.fidelity});
  }
  return curve;
}

}  // namespace qsched
