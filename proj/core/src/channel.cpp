#include <cmath>
#include <complex>
#include <numbers>

#include "ranslice/channel.hpp"
#include "ranslice/rng.hpp"

namespace ranslice {

double SEGrid::ue_mean(int step, int ue) const {
  const float* row = &values[(static_cast<std::size_t>(step) * ue_count + ue) * rb_count];
  double sum = 0.0;
  for (int g = 0; g < rb_count; ++g) sum += row[g];
  return sum / rb_count;
}

double ChannelParams::noise_power_per_rb_w() const {
  const double dbm =
      thermal_noise_dbm_hz + 10.0 * std::log10(rb_bandwidth_hz()) + noise_figure_db;
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double snr(double alpha, double tx_power_per_rb_w, double h_squared, double noise_power_w) {
  if (!(noise_power_w > 0.0)) throw ChannelError("noise power must be positive");
  return alpha * tx_power_per_rb_w * h_squared / noise_power_w;
}

double spectral_efficiency(double snr_linear) {
  if (snr_linear < 0.0) throw ChannelError("SNR must be nonnegative");
  return std::log2(1.0 + snr_linear);
}

namespace {

// Line-of-sight probability, decaying with the UE's initial distance
// (UMa-flavored: certain LOS up close, mostly NLOS at the outer ring).
double los_probability(double d) {
  if (d <= 18.0) return 1.0;
  return 18.0 / d + std::exp(-d / 63.0) * (1.0 - 18.0 / d);
}

double dual_slope_pathloss_db(const ChannelParams& p, double d, bool los) {
  const double n_near = los ? p.pl_exp_los_near : p.pl_exp_nlos_near;
  const double n_far = los ? p.pl_exp_los_far : p.pl_exp_nlos_far;
  const double d_clamped = std::max(d, 1.0);
  if (d_clamped <= p.breakpoint_m) {
    return p.ref_pathloss_db + 10.0 * n_near * std::log10(d_clamped);
  }
  return p.ref_pathloss_db + 10.0 * n_near * std::log10(p.breakpoint_m) +
         10.0 * n_far * std::log10(d_clamped / p.breakpoint_m);
}

}  // namespace

SEGrid generate_se_grid(const std::vector<UETrajectory>& trajectories,
                        const ChannelParams& params, std::uint64_t seed) {
  if (trajectories.empty()) throw ChannelError("no trajectories given");
  const int ue_count = static_cast<int>(trajectories.size());
  const int steps = static_cast<int>(trajectories[0].x.size());
  const int rbs = kNumRbs;

  SEGrid grid;
  grid.ue_count = ue_count;
  grid.rb_count = rbs;
  grid.step_count = steps;
  grid.values.resize(static_cast<std::size_t>(steps) * ue_count * rbs);

  const double p_rb = params.tx_power_per_rb_w();
  const double noise_w = params.noise_power_per_rb_w();
  const double rho_f = params.freq_corr;
  const double freq_innov = std::sqrt(std::max(0.0, 1.0 - rho_f * rho_f));

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

  std::vector<std::complex<double>> scatter(rbs), innov(rbs);

  for (int ue = 0; ue < ue_count; ++ue) {
    const auto& traj = trajectories[ue];
    auto rng = make_stream(seed, StreamTag::kChannel, 0x464144ULL,
                           static_cast<std::uint64_t>(ue));

    const bool los = unit(rng) < los_probability(traj.distance(0));
    const double sigma_db =
        los ? params.shadow_sigma_los_db : params.shadow_sigma_nlos_db;
    double shadow_db = params.disable_shadowing ? 0.0 : sigma_db * gauss(rng);

    // Rician split between a fixed specular ray and the scattered field.
    const double k_lin = std::pow(10.0, params.rician_k_los_db / 10.0);
    const double spec_amp = los ? std::sqrt(k_lin / (k_lin + 1.0)) : 0.0;
    const double scatter_amp = los ? std::sqrt(1.0 / (k_lin + 1.0)) : 1.0;
    const std::complex<double> specular =
        spec_amp * std::polar(1.0, angle(rng));

    // Frequency-correlated AR(1) chain seeds the scattered field per RB.
    auto draw_freq_chain = [&](std::vector<std::complex<double>>& dst) {
      std::complex<double> prev(gauss(rng) / std::numbers::sqrt2,
                                gauss(rng) / std::numbers::sqrt2);
      dst[0] = prev;
      for (int g = 1; g < rbs; ++g) {
        const std::complex<double> fresh(gauss(rng) / std::numbers::sqrt2,
                                         gauss(rng) / std::numbers::sqrt2);
        prev = rho_f * prev + freq_innov * fresh;
        dst[g] = prev;
      }
    };
    draw_freq_chain(scatter);

    // Doppler-driven temporal correlation of the scattered field.
    const double speed_ms = traj.speed_kmh / 3.6;
    const double doppler_hz = speed_ms * params.carrier_freq_ghz * 1e9 / 299792458.0;
    const double rho_t =
        std::exp(-2.0 * std::numbers::pi * doppler_hz * kTtiSec * params.doppler_c0);
    const double time_innov = std::sqrt(std::max(0.0, 1.0 - rho_t * rho_t));

    for (int n = 0; n < steps; ++n) {
      if (n > 0) {
        const double moved = std::hypot(traj.x[n] - traj.x[n - 1], traj.y[n] - traj.y[n - 1]);
        if (!params.disable_shadowing && moved > 0.0) {
          const double rho_s = std::exp(-moved / params.shadow_decorr_m);
          shadow_db = rho_s * shadow_db +
                      std::sqrt(std::max(0.0, 1.0 - rho_s * rho_s)) * sigma_db * gauss(rng);
        }
        if (!params.disable_fading && time_innov > 0.0) {
          draw_freq_chain(innov);
          for (int g = 0; g < rbs; ++g) {
            scatter[g] = rho_t * scatter[g] + time_innov * innov[g];
          }
        }
      }
      const double pl_db = dual_slope_pathloss_db(params, traj.distance(n), los);
      const double alpha = std::pow(10.0, -(pl_db + shadow_db) / 10.0);
      float* row = &grid.values[(static_cast<std::size_t>(n) * ue_count + ue) * rbs];
      for (int g = 0; g < rbs; ++g) {
        const double h2 =
            params.disable_fading ? 1.0 : std::norm(specular + scatter_amp * scatter[g]);
        row[g] = static_cast<float>(spectral_efficiency(snr(alpha, p_rb, h2, noise_w)));
      }
    }
  }
  return grid;
}

SEGrid generate_episode_grid(const NetworkScenario& scenario, const ChannelParams& params,
                             int episode, int steps) {
  const std::uint64_t episode_seed =
      combine_seed(scenario.seed, static_cast<std::uint64_t>(episode), 0x45504953ULL);
  const auto trajectories = simulate_mobility(scenario, episode_seed, steps);
  return generate_se_grid(trajectories, params, episode_seed);
}

}  // namespace ranslice
