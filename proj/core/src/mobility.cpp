#include <cmath>
#include <numbers>

#include "ranslice/channel.hpp"
#include "ranslice/rng.hpp"

namespace ranslice {

double UETrajectory::distance(int step) const {
  return std::hypot(x[step], y[step]);
}

namespace {

bool inside_annulus(double x, double y) {
  const double d = std::hypot(x, y);
  return d >= kAnnulusInnerM && d <= kAnnulusOuterM;
}

}  // namespace

std::vector<UETrajectory> simulate_mobility(const NetworkScenario& scenario,
                                            std::uint64_t seed, int steps) {
  if (steps < 1) throw ChannelError("mobility needs at least one step");
  std::vector<UETrajectory> out;
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int ue_global = 0;
  for (const auto& s : scenario.slices) {
    for (int u = 0; u < s.ue_count; ++u, ++ue_global) {
      auto rng = make_stream(seed, StreamTag::kChannel, 0x4d4f42ULL,
                             static_cast<std::uint64_t>(ue_global));
      UETrajectory traj;
      traj.speed_kmh = s.spec.speed_kmh;
      traj.x.resize(steps);
      traj.y.resize(steps);

      // Area-uniform start position in the annulus.
      const double r = std::sqrt(unit(rng) * (kAnnulusOuterM * kAnnulusOuterM -
                                              kAnnulusInnerM * kAnnulusInnerM) +
                                 kAnnulusInnerM * kAnnulusInnerM);
      const double theta = angle(rng);
      double px = r * std::cos(theta);
      double py = r * std::sin(theta);
      double heading = angle(rng);
      const double step_m = s.spec.speed_kmh / 3.6 * kTtiSec;

      for (int n = 0; n < steps; ++n) {
        traj.x[n] = px;
        traj.y[n] = py;
        if (step_m == 0.0) continue;
        if (n > 0 && n % kTurnEpochSteps == 0 && unit(rng) < kTurnProbability) {
          heading = angle(rng);
        }
        double nx = px + step_m * std::cos(heading);
        double ny = py + step_m * std::sin(heading);
        // On hitting either annulus bound, redraw the heading until the move
        // stays inside; fall back to heading straight at the ring's middle.
        int tries = 0;
        while (!inside_annulus(nx, ny)) {
          if (++tries > 64) {
            const double mid = 0.5 * (kAnnulusInnerM + kAnnulusOuterM);
            const double d = std::hypot(px, py);
            heading = std::atan2(py, px) + (d < mid ? 0.0 : std::numbers::pi);
          } else {
            heading = angle(rng);
          }
          nx = px + step_m * std::cos(heading);
          ny = py + step_m * std::sin(heading);
        }
        px = nx;
        py = ny;
      }
      out.push_back(std::move(traj));
    }
  }
  return out;
}

}  // namespace ranslice
