// Per-step, per-UE, per-RB spectral efficiency: UE mobility plus a synthetic
// correlated-fading generator, with a trace-file path so externally produced
// grids can be dropped in.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranslice/scenario.hpp"
#include "ranslice/types.hpp"

namespace ranslice {

struct SEGrid {
  int ue_count = 0;
  int rb_count = 0;
  int step_count = 0;
  std::vector<float> values;  // [step][ue][rb]

  float at(int step, int ue, int rb) const {
    return values[(static_cast<std::size_t>(step) * ue_count + ue) * rb_count + rb];
  }
  float& at(int step, int ue, int rb) {
    return values[(static_cast<std::size_t>(step) * ue_count + ue) * rb_count + rb];
  }
  // Mean SE across the RB axis for one UE at one step.
  double ue_mean(int step, int ue) const;
};

struct ChannelParams {
  double carrier_freq_ghz = 2.6;
  double bandwidth_mhz = 100.0;
  double total_tx_power_w = 100.0;
  double noise_figure_db = 7.0;
  double thermal_noise_dbm_hz = -174.0;

  // Dual-slope log-distance path loss, referenced to 1 m. The reference
  // absorbs antenna and feeder assumptions the source material leaves open;
  // defaults are calibrated so light scenarios fit easily in 135 RBs while
  // heavy ones exceed them.
  double ref_pathloss_db = 56.0;
  double breakpoint_m = 100.0;
  double pl_exp_los_near = 2.0;
  double pl_exp_los_far = 3.0;
  double pl_exp_nlos_near = 2.8;
  double pl_exp_nlos_far = 3.6;

  double shadow_sigma_los_db = 4.0;
  double shadow_sigma_nlos_db = 6.0;
  double shadow_decorr_m = 25.0;  // exponential decorrelation over travel

  double rician_k_los_db = 9.0;
  double doppler_c0 = 1.0;   // shape constant in rho = exp(-2*pi*fD*Ts*c0)
  double freq_corr = 0.9;    // AR(1) coefficient across the RB axis

  double se_max = kSeMaxDefault;  // observation normalizer

  // Test hooks.
  bool disable_fading = false;
  bool disable_shadowing = false;

  double rb_bandwidth_hz() const { return bandwidth_mhz * 1e6 / kNumRbs; }
  double tx_power_per_rb_w() const { return total_tx_power_w / kNumRbs; }
  double noise_power_per_rb_w() const;
};

struct UETrajectory {
  std::vector<double> x;  // meters, one entry per step
  std::vector<double> y;
  double speed_kmh = 0.0;

  double distance(int step) const;
};

inline constexpr double kAnnulusInnerM = 35.0;
inline constexpr double kAnnulusOuterM = 250.0;
inline constexpr int kTurnEpochSteps = 200;  // heading reconsidered every 0.2 s
inline constexpr double kTurnProbability = 0.5;

class ChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One trajectory per UE, ordered slice-by-slice as in the scenario.
std::vector<UETrajectory> simulate_mobility(const NetworkScenario& scenario,
                                            std::uint64_t seed, int steps = 1000);

// Linear SNR and Shannon spectral efficiency.
double snr(double alpha, double tx_power_per_rb_w, double h_squared, double noise_power_w);
double spectral_efficiency(double snr_linear);

// Synthetic generator; a pure function of (trajectories, params, seed).
SEGrid generate_se_grid(const std::vector<UETrajectory>& trajectories,
                        const ChannelParams& params, std::uint64_t seed);

// Convenience: mobility + fading for one (scenario, episode) pair.
SEGrid generate_episode_grid(const NetworkScenario& scenario, const ChannelParams& params,
                             int episode, int steps = 1000);

// Binary trace file: magic "SEGRID01", little-endian u32 counts (UEs, RBs,
// steps), then little-endian f32 payload ordered [step][ue][rb].
void save_se_grid(const SEGrid& grid, const std::string& path);
SEGrid load_se_grid(const std::string& path);

}  // namespace ranslice
