#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <thread>

#include "qsched/error.hpp"
#include "qsched/simharness.hpp"

namespace qsched {

namespace {

struct Plane {
  const CaseStudyParams& p;
  Vec3 g1;
  Vec3 g2;
  double orbit_radius;

  Vec3 at(double angle) const {
    return {orbit_radius * std::cos(angle), orbit_radius * std::sin(angle), 0.0};
  }

  std::optional<ArmChannel> arm(const Vec3& sat, const Vec3& gs) const {
    const auto geo = link_geometry(sat, gs, p.atmosphere_height_m);
    if (geo.elevation_deg < p.min_elevation_deg) return std::nullopt;
    const double fs = free_space_transmissivity(p.optics, geo.slant_range_m);
    const double atm = atmospheric_transmissivity(p.zenith_transmissivity, geo.elevation_deg);
    return ArmChannel{
        arm_transmissivity(fs, atm, p.optics.tx_efficiency, p.optics.rx_efficiency), 0.0};
  }

  double rate(const ArmChannel& a, const ArmChannel& b) const {
    const auto out = end_to_end_outcome(p.source, a, b);
    return out.fidelity >= p.fidelity_threshold ? out.edr : 0.0;
  }
};

}  // namespace

CaseStudyPoint case_study(double baseline_m, const CaseStudyParams& p) {
  if (!(baseline_m >= 0.0)) throw ParameterError("simharness", "baseline must be nonnegative");
  if (!(p.altitude_m > 0.0)) throw ParameterError("simharness", "altitude must be positive");
  if (!(p.min_elevation_deg >= 0.0 && p.min_elevation_deg < 90.0)) {
    throw ParameterError("simharness", "minimum elevation must lie in [0, 90)");
  }
  if (p.phase_samples < 1) throw ParameterError("simharness", "phase_samples must be positive");
  if (!(p.time_step_s > 0.0)) throw ParameterError("simharness", "time step must be positive");

  const double half = baseline_m / p.earth_radius_m / 2.0;
  const double r = p.earth_radius_m + p.altitude_m;
  const Plane plane{p,
                    {p.earth_radius_m * std::cos(-half), p.earth_radius_m * std::sin(-half), 0.0},
                    {p.earth_radius_m * std::cos(half), p.earth_radius_m * std::sin(half), 0.0},
                    r};
  const double period = 2.0 * kPi * std::sqrt(r * r * r / p.gravitational_parameter);
  const double w = 2.0 * kPi / period;
  const double min_radius = p.earth_radius_m + p.isl_clearance_m;

  struct Step {
    double angle;
    Vec3 pos;
    std::optional<ArmChannel> a1;
    std::optional<ArmChannel> a2;
    double direct;
  };
  std::vector<Step> steps;
  CaseStudyPoint out;
  out.baseline_m = baseline_m;
  for (long k = 0;; ++k) {
    const double t = k * p.time_step_s;
    if (t >= period) break;
    const double angle = -kPi + w * t;
    Step s{angle, plane.at(angle), std::nullopt, std::nullopt, 0.0};
    s.a1 = plane.arm(s.pos, plane.g1);
    s.a2 = plane.arm(s.pos, plane.g2);
    if (!s.a1 && !s.a2) continue;
    if (s.a1 && s.a2) s.direct = plane.rate(*s.a1, *s.a2);
    out.primary_edr += s.direct * p.time_step_s;
    steps.push_back(s);
  }

  out.reflection_edr = out.primary_edr;
  for (int q = 0; q < p.phase_samples; ++q) {
    const double delta =
        p.phase_samples == 1 ? 0.0 : 2.0 * kPi * q / static_cast<double>(p.phase_samples - 1);
    double total = 0.0;
    for (const auto& s : steps) {
      double best = s.direct;
      const Vec3 relay = plane.at(s.angle + delta);
      if (segment_clears_earth(s.pos, relay, min_radius)) {
        const double isl = inter_satellite_transmissivity(p.optics, (s.pos - relay).norm());
        if (s.a1) {
          if (const auto b2 = plane.arm(relay, plane.g2)) {
            const auto arms = reflection_arms(*s.a1, isl, p.mirror_efficiency, *b2);
            best = std::max(best, plane.rate(arms.first, arms.second));
          }
        }
        if (s.a2) {
          if (const auto b1 = plane.arm(relay, plane.g1)) {
            const auto arms = reflection_arms(*s.a2, isl, p.mirror_efficiency, *b1);
            best = std::max(best, plane.rate(arms.second, arms.first));
          }
        }
      }
      total += best * p.time_step_s;
    }
    if (total > out.reflection_edr) {
      out.reflection_edr = total;
      out.best_phase_rad = delta;
    }
  }
  if (out.primary_edr > 0.0) {
    out.ratio = out.reflection_edr / out.primary_edr;
  } else {
    out.ratio = out.reflection_edr > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return out;
}

std::vector<CaseStudyPoint> case_study_sweep(const std::vector<double>& baselines_m,
                                             const CaseStudyParams& params, int threads) {
  std::vector<CaseStudyPoint> points(baselines_m.size());
  if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<int>(threads, static_cast<int>(baselines_m.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(baselines_m.size());
  auto work = [&] {
    for (std::size_t b; (b = next++) < baselines_m.size();) {
      try {
        points[b] = case_study(baselines_m[b], params);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  if (threads > 0) work();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return points;
}

void write_case_study_csv(const std::vector<CaseStudyPoint>& points, std::ostream& out) {
  auto fmt = [](double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  };
  out << "baseline_km,primary_edr,reflection_edr,ratio\n";
  for (const auto& p : points) {
    out << fmt(p.baseline_m / 1e3) << ',' << fmt(p.primary_edr) << ',' << fmt(p.reflection_edr)
        << ',' << fmt(p.ratio) << '\n';
  }
}

}  // namespace qsched
