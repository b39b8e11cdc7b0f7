#include "ranslice/controllers.hpp"

#include <algorithm>

#include "ranslice/rng.hpp"

namespace ranslice {

namespace {

std::array<std::uint8_t, kMaxSlices> to_mask(const std::array<bool, kMaxSlices>& active) {
  std::array<std::uint8_t, kMaxSlices> m{};
  for (int s = 0; s < kMaxSlices; ++s) m[static_cast<size_t>(s)] = active[static_cast<size_t>(s)] ? 1 : 0;
  return m;
}

ActionFactors factors_from(const std::array<bool, kMaxSlices>& active,
                           std::span<const double> values) {
  ActionFactors f;
  f.active = active;
  for (int s = 0; s < kMaxSlices; ++s) {
    if (active[static_cast<size_t>(s)]) f.value[static_cast<size_t>(s)] = values[static_cast<size_t>(s)];
  }
  return f;
}

// Round-robin intra allocation for every active slice.
void fill_intra_rr(NetworkEnv& env, Allocation& alloc) {
  for (const auto& slice : env.scenario().slices) {
    const int slot = slice.slice_index;
    alloc.intra[static_cast<size_t>(slot)] =
        intra_rr(alloc.inter[static_cast<size_t>(slot)], slice.ue_count, env.step_index());
  }
}

ObsNormalizers normalizers_for(const NetworkEnv& env) {
  ObsNormalizers norm;
  norm.se_max = env.channel_params().se_max;
  return norm;
}

std::vector<double> proposed_inter_obs(NetworkEnv& env) {
  const auto drifts = env.current_drifts();
  std::array<double, kMaxSlices> mean_se{};
  for (const auto& slice : env.scenario().slices)
    mean_se[static_cast<size_t>(slice.slice_index)] = env.slice_mean_se(slice.slice_index);
  return build_inter_obs(env.scenario(), drifts, mean_se, normalizers_for(env));
}

}  // namespace

void Controller::begin_episode(NetworkEnv&, bool training) { training_ = training; }

void Controller::post_step(NetworkEnv&, const StepResult&, bool) {
  // Only training steps count toward budgets; evaluation sweeps are free.
  if (training_) steps_seen_ += 1;
}

double Controller::score(NetworkEnv&, const StepResult& result) { return result.reward_inter; }

Allocation MarrController::decide(NetworkEnv& env) {
  Allocation alloc;
  alloc.inter = inter_marr(env.active_slots(), kNumRbgs, env.step_index());
  fill_intra_rr(env, alloc);
  return alloc;
}

MapfController::MapfController() : slice_tracker_(kMaxSlices), ue_tracker_(kMaxUes) {}

void MapfController::begin_episode(NetworkEnv& env, bool training) {
  Controller::begin_episode(env, training);
  slice_tracker_ = PFTracker(kMaxSlices);
  ue_tracker_ = PFTracker(kMaxUes);
}

Allocation MapfController::decide(NetworkEnv& env) {
  const auto& scn = env.scenario();
  const auto active = env.active_slots();

  // Slice weight: mean queued packets per UE over the smoothed service rate.
  std::array<double, kMaxSlices> occupied{};
  for (const auto& slice : scn.slices) {
    const int off = scn.ue_offset(slice.slice_index);
    double pkts = 0.0;
    for (int u = 0; u < slice.ue_count; ++u)
      pkts += static_cast<double>(env.ue_buffer_pkts(off + u));
    occupied[static_cast<size_t>(slice.slice_index)] = pkts / slice.ue_count;
  }

  Allocation alloc;
  alloc.inter = chi_allocate(inter_mapf(occupied, active, slice_tracker_));
  for (const auto& slice : scn.slices) {
    const int slot = slice.slice_index;
    const int off = scn.ue_offset(slot);
    std::vector<double> weights(static_cast<size_t>(slice.ue_count), 0.0);
    for (int u = 0; u < slice.ue_count; ++u) {
      weights[static_cast<size_t>(u)] = pf_weight(
          static_cast<double>(env.ue_buffer_pkts(off + u)), ue_tracker_.mean(off + u));
    }
    alloc.intra[static_cast<size_t>(slot)] =
        intra_pf(alloc.inter[static_cast<size_t>(slot)], weights);
  }
  return alloc;
}

void MapfController::post_step(NetworkEnv& env, const StepResult& result, bool last_step) {
  Controller::post_step(env, result, last_step);
  const auto& scn = env.scenario();
  for (const auto& slice : scn.slices) {
    const int slot = slice.slice_index;
    slice_tracker_.update(slot, result.slice_mean[static_cast<size_t>(slot)].effective_mbps);
    const int off = scn.ue_offset(slot);
    for (int u = 0; u < slice.ue_count; ++u)
      ue_tracker_.update(off + u, result.ue[static_cast<size_t>(off + u)].effective_mbps);
  }
}

ProposedController::ProposedController(std::uint64_t seed, const PPOConfig& cfg)
    : inter_(kInterObsDim, kMaxSlices),
      intra_(kIntraObsDim, 3),
      inter_opt_(inter_.param_count(), cfg.learning_rate),
      intra_opt_(intra_.param_count(), cfg.learning_rate),
      inter_buf_(kInterObsDim, kMaxSlices, true),
      intra_buf_(kIntraObsDim, 1, false),
      ue_tracker_(kMaxUes),
      rng_(make_stream(seed, StreamTag::kPolicy, 1)) {
  state_.cfg = cfg;
  inter_.init(rng_);
  intra_.init(rng_);
}

void ProposedController::begin_episode(NetworkEnv& env, bool training) {
  Controller::begin_episode(env, training);
  ue_tracker_ = PFTracker(kMaxUes);
  pending_inter_.valid = false;
  for (auto& p : pending_intra_) p.valid = false;
}

void ProposedController::maybe_update_inter(std::span<const double> next_obs) {
  if (inter_buf_.size() < state_.cfg.buffer_capacity) return;
  const double bootstrap = inter_.value_of(next_obs);
  const UpdateReport rep = ppo_update(inter_, inter_opt_, inter_buf_,
                                      std::span<const double>(&bootstrap, 1), state_.cfg, rng_);
  if (rep.aborted) state_.diverged = true;
  if (rep.ok) state_.updates += 1;
  inter_buf_.clear();
}

void ProposedController::maybe_update_intra(
    const std::array<std::vector<double>, kMaxSlices>& next_obs,
    const std::array<bool, kMaxSlices>& active) {
  if (intra_buf_.size() < state_.cfg.buffer_capacity) return;
  std::array<double, kMaxSlices> boots{};
  for (int s = 0; s < kMaxSlices; ++s) {
    if (active[static_cast<size_t>(s)]) boots[static_cast<size_t>(s)] = intra_.value_of(next_obs[static_cast<size_t>(s)]);
  }
  const UpdateReport rep = ppo_update(intra_, intra_opt_, intra_buf_, boots, state_.cfg, rng_);
  if (rep.aborted) state_.diverged = true;
  if (rep.ok) state_.updates += 1;
  intra_buf_.clear();
}

Allocation ProposedController::decide(NetworkEnv& env) {
  const auto& scn = env.scenario();
  const auto active = env.active_slots();
  const auto drifts = env.current_drifts();

  std::vector<double> obs = proposed_inter_obs(env);
  if (training_ && !state_.diverged) maybe_update_inter(obs);

  const auto mask = to_mask(active);
  const GaussianPolicy::Sample sample =
      inter_.act(obs, mask, training_ ? &rng_ : nullptr);
  Allocation alloc;
  alloc.inter = chi_allocate(factors_from(active, sample.factors));
  const auto rbg_lists = env.assign_rbgs(alloc.inter);

  // Intra observations before any policy update so bootstrap values exist
  // for every live stream.
  const ObsNormalizers norm = normalizers_for(env);
  std::array<std::vector<double>, kMaxSlices> iobs;
  for (const auto& slice : scn.slices) {
    const int slot = slice.slice_index;
    const int off = scn.ue_offset(slot);
    std::vector<double> occ(static_cast<size_t>(slice.ue_count), 0.0);
    std::vector<double> se(static_cast<size_t>(slice.ue_count), 0.0);
    for (int u = 0; u < slice.ue_count; ++u) {
      occ[static_cast<size_t>(u)] = env.ue_buffer_occ(off + u);
      se[static_cast<size_t>(u)] = env.ue_mean_se(off + u);
    }
    iobs[static_cast<size_t>(slot)] = build_intra_obs(
        slice, drifts[static_cast<size_t>(slot)], alloc.inter[static_cast<size_t>(slot)], occ, se, norm);
  }
  if (training_ && !state_.diverged) maybe_update_intra(iobs, active);

  for (const auto& slice : scn.slices) {
    const int slot = slice.slice_index;
    const int off = scn.ue_offset(slot);
    const int grant = alloc.inter[static_cast<size_t>(slot)];
    const CategoricalPolicy::Sample ks =
        intra_.act(iobs[static_cast<size_t>(slot)], training_ ? &rng_ : nullptr);

    std::vector<int> counts;
    if (ks.choice == 0) {
      counts = intra_rr(grant, slice.ue_count, env.step_index());
    } else if (ks.choice == 1) {
      std::vector<double> weights(static_cast<size_t>(slice.ue_count), 0.0);
      for (int u = 0; u < slice.ue_count; ++u) {
        weights[static_cast<size_t>(u)] = pf_weight(
            static_cast<double>(env.ue_buffer_pkts(off + u)), ue_tracker_.mean(off + u));
      }
      counts = intra_pf(grant, weights);
    } else {
      std::vector<double> se(static_cast<size_t>(slice.ue_count), 0.0);
      std::vector<double> bits(static_cast<size_t>(slice.ue_count), 0.0);
      for (int u = 0; u < slice.ue_count; ++u) {
        se[static_cast<size_t>(u)] =
            env.ue_mean_se_rbgs(off + u, rbg_lists[static_cast<size_t>(slot)]);
        bits[static_cast<size_t>(u)] = env.ue_buffer_bits(off + u);
      }
      counts = intra_mt(grant, se, bits, env.total_bandwidth_hz());
    }
    alloc.intra[static_cast<size_t>(slot)] = std::move(counts);

    auto& p = pending_intra_[static_cast<size_t>(slot)];
    p.obs = iobs[static_cast<size_t>(slot)];
    p.choice = ks.choice;
    p.log_prob = ks.log_prob;
    p.value = ks.value;
    p.valid = true;
  }

  pending_inter_.obs = std::move(obs);
  pending_inter_.raw = sample.raw;
  pending_inter_.mask = mask;
  pending_inter_.log_prob = sample.log_prob;
  pending_inter_.value = sample.value;
  pending_inter_.valid = true;
  return alloc;
}

void ProposedController::post_step(NetworkEnv& env, const StepResult& result, bool last_step) {
  Controller::post_step(env, result, last_step);
  const auto& scn = env.scenario();
  for (const auto& slice : scn.slices) {
    const int off = scn.ue_offset(slice.slice_index);
    for (int u = 0; u < slice.ue_count; ++u)
      ue_tracker_.update(off + u, result.ue[static_cast<size_t>(off + u)].effective_mbps);
  }

  if (training_ && !state_.diverged && pending_inter_.valid) {
    inter_buf_.push(pending_inter_.obs, pending_inter_.raw, pending_inter_.mask,
                    pending_inter_.log_prob, pending_inter_.value, result.reward_inter,
                    last_step, 0);
    for (const auto& slice : scn.slices) {
      const int slot = slice.slice_index;
      auto& p = pending_intra_[static_cast<size_t>(slot)];
      if (!p.valid) continue;
      const double action = static_cast<double>(p.choice);
      intra_buf_.push(p.obs, std::span<const double>(&action, 1), {}, p.log_prob, p.value,
                      result.intra_rewards[static_cast<size_t>(slot)], last_step, slot);
    }
  }
  pending_inter_.valid = false;
  for (auto& p : pending_intra_) p.valid = false;
}

PolicyCheckpoint ProposedController::snapshot() const {
  PolicyCheckpoint ckpt;
  PolicySection inter;
  inter.kind = PolicySection::Kind::kGaussian;
  inter.obs_dim = kInterObsDim;
  inter.act_dim = kMaxSlices;
  inter.hidden_dim = static_cast<std::uint32_t>(inter_.hidden_dim());
  inter.params = inter_.get_params();
  inter.adam_m.assign(inter_opt_.moment1().begin(), inter_opt_.moment1().end());
  inter.adam_v.assign(inter_opt_.moment2().begin(), inter_opt_.moment2().end());
  inter.adam_steps = inter_opt_.steps();
  ckpt.sections.push_back(std::move(inter));

  PolicySection intra;
  intra.kind = PolicySection::Kind::kCategorical;
  intra.obs_dim = kIntraObsDim;
  intra.act_dim = 3;
  intra.hidden_dim = static_cast<std::uint32_t>(intra_.hidden_dim());
  intra.params = intra_.get_params();
  intra.adam_m.assign(intra_opt_.moment1().begin(), intra_opt_.moment1().end());
  intra.adam_v.assign(intra_opt_.moment2().begin(), intra_opt_.moment2().end());
  intra.adam_steps = intra_opt_.steps();
  ckpt.sections.push_back(std::move(intra));

  ckpt.env_steps = steps_seen_;
  ckpt.updates = state_.updates;
  return ckpt;
}

void ProposedController::restore(const PolicyCheckpoint& ckpt, RestoreMode mode) {
  if (ckpt.sections.size() != 2)
    throw CheckpointShapeError("expected a two-section checkpoint for the two-level agent");
  const auto& inter = ckpt.sections[0];
  const auto& intra = ckpt.sections[1];
  expect_section(inter, PolicySection::Kind::kGaussian, kInterObsDim, kMaxSlices,
                 inter_.hidden_dim());
  expect_section(intra, PolicySection::Kind::kCategorical, kIntraObsDim, 3,
                 intra_.hidden_dim());
  if (inter.params.size() != inter_.param_count() || intra.params.size() != intra_.param_count())
    throw CheckpointShapeError("checkpoint parameter counts do not match the networks");
  inter_.set_params(inter.params);
  intra_.set_params(intra.params);
  if (mode == RestoreMode::kResume) {
    inter_opt_.restore(inter.adam_m, inter.adam_v, inter.adam_steps);
    intra_opt_.restore(intra.adam_m, intra.adam_v, intra.adam_steps);
  } else {
    // Initial parameters only: fresh optimizer and fresh exploration scale,
    // since the pretrained run's shrunken sigma would pin fine-tuning to the
    // base policy's basin.
    inter_opt_ = Adam(inter_.param_count(), state_.cfg.learning_rate);
    intra_opt_ = Adam(intra_.param_count(), state_.cfg.learning_rate);
    inter_.reset_exploration();
  }
  state_.diverged = false;
}

GaussianBaselineController::GaussianBaselineController(std::uint64_t seed, const PPOConfig& cfg)
    : policy_(kInterObsDim, kMaxSlices),
      opt_(policy_.param_count(), cfg.learning_rate),
      buffer_(kInterObsDim, kMaxSlices, true),
      rng_(make_stream(seed, StreamTag::kPolicy, 2)) {
  state_.cfg = cfg;
  policy_.init(rng_);
}

void GaussianBaselineController::begin_episode(NetworkEnv& env, bool training) {
  Controller::begin_episode(env, training);
  pending_.valid = false;
}

Allocation GaussianBaselineController::decide(NetworkEnv& env) {
  const auto active = env.active_slots();
  std::vector<double> obs = build_obs(env);

  if (training_ && !state_.diverged && buffer_.size() >= state_.cfg.buffer_capacity) {
    const double bootstrap = policy_.value_of(obs);
    const UpdateReport rep = ppo_update(policy_, opt_, buffer_,
                                        std::span<const double>(&bootstrap, 1), state_.cfg, rng_);
    if (rep.aborted) state_.diverged = true;
    if (rep.ok) state_.updates += 1;
    buffer_.clear();
  }

  const auto mask = to_mask(active);
  const GaussianPolicy::Sample sample = policy_.act(obs, mask, training_ ? &rng_ : nullptr);
  Allocation alloc;
  alloc.inter = chi_allocate(factors_from(active, sample.factors));
  fill_intra_rr(env, alloc);

  pending_.obs = std::move(obs);
  pending_.raw = sample.raw;
  pending_.mask = mask;
  pending_.log_prob = sample.log_prob;
  pending_.value = sample.value;
  pending_.valid = true;
  return alloc;
}

void GaussianBaselineController::post_step(NetworkEnv& env, const StepResult& result,
                                           bool last_step) {
  Controller::post_step(env, result, last_step);
  if (training_ && !state_.diverged && pending_.valid) {
    buffer_.push(pending_.obs, pending_.raw, pending_.mask, pending_.log_prob, pending_.value,
                 reward(env, result), last_step, 0);
  }
  pending_.valid = false;
}

double GaussianBaselineController::score(NetworkEnv& env, const StepResult& result) {
  return reward(env, result);
}

PolicyCheckpoint GaussianBaselineController::snapshot() const {
  PolicyCheckpoint ckpt;
  PolicySection s;
  s.kind = PolicySection::Kind::kGaussian;
  s.obs_dim = kInterObsDim;
  s.act_dim = kMaxSlices;
  s.hidden_dim = static_cast<std::uint32_t>(policy_.hidden_dim());
  s.params = policy_.get_params();
  s.adam_m.assign(opt_.moment1().begin(), opt_.moment1().end());
  s.adam_v.assign(opt_.moment2().begin(), opt_.moment2().end());
  s.adam_steps = opt_.steps();
  ckpt.sections.push_back(std::move(s));
  ckpt.env_steps = steps_seen_;
  ckpt.updates = state_.updates;
  return ckpt;
}

void GaussianBaselineController::restore(const PolicyCheckpoint& ckpt, RestoreMode mode) {
  if (ckpt.sections.size() != 1)
    throw CheckpointShapeError("expected a single-section checkpoint for this controller");
  const auto& s = ckpt.sections[0];
  expect_section(s, PolicySection::Kind::kGaussian, kInterObsDim, kMaxSlices,
                 policy_.hidden_dim());
  if (s.params.size() != policy_.param_count())
    throw CheckpointShapeError("checkpoint parameter count does not match the network");
  policy_.set_params(s.params);
  if (mode == RestoreMode::kResume) {
    opt_.restore(s.adam_m, s.adam_v, s.adam_steps);
  } else {
    opt_ = Adam(policy_.param_count(), state_.cfg.learning_rate);
    policy_.reset_exploration();
  }
  state_.diverged = false;
}

IntentAwareController::IntentAwareController(std::uint64_t seed, const PPOConfig& cfg)
    : GaussianBaselineController(seed, cfg) {}

std::vector<double> IntentAwareController::build_obs(NetworkEnv& env) {
  std::array<SliceRawMetrics, kMaxSlices> metrics{};
  if (const StepResult* last = env.last_result()) {
    for (const auto& slice : env.scenario().slices) {
      const int slot = slice.slice_index;
      const auto& agg = last->slice_mean[static_cast<size_t>(slot)];
      auto& m = metrics[static_cast<size_t>(slot)];
      m.mean_se = agg.mean_se;
      m.served_mbps = agg.served_mbps;
      m.effective_mbps = agg.effective_mbps;
      m.buffer_occ = agg.buffer_occ;
      m.latency_ms = agg.latency_ms;
      m.loss_rate = agg.loss_rate;
      m.arrivals_mbps = agg.arrivals_mbps;
    }
  }
  return build_raw_obs(env.scenario(), metrics);
}

double IntentAwareController::reward(NetworkEnv& env, const StepResult& result) {
  const auto active = env.active_slots();
  const auto hp = env.hp_slots();
  return reward_weighted_drift(result.drift, active,
                               std::span<const bool>(hp.data(), kMaxSlices));
}

SchedSlicingController::SchedSlicingController(std::uint64_t seed, const PPOConfig& cfg)
    : GaussianBaselineController(seed, cfg) {}

std::vector<double> SchedSlicingController::build_obs(NetworkEnv& env) {
  return proposed_inter_obs(env);
}

double SchedSlicingController::reward(NetworkEnv& env, const StepResult& result) {
  const auto& scn = env.scenario();
  std::vector<SliceSpec> specs;
  std::vector<double> served, occ;
  for (const auto& slice : scn.slices) {
    const auto& agg = result.slice_mean[static_cast<size_t>(slice.slice_index)];
    specs.push_back(slice.spec);
    served.push_back(agg.served_mbps);
    occ.push_back(agg.buffer_occ);
  }
  return reward_throughput_buffer(specs, served, occ);
}

std::unique_ptr<Controller> make_controller(const std::string& kind, std::uint64_t seed,
                                            const PPOConfig& cfg) {
  if (kind == "proposed") return std::make_unique<ProposedController>(seed, cfg);
  if (kind == "marr") return std::make_unique<MarrController>();
  if (kind == "mapf") return std::make_unique<MapfController>();
  if (kind == "intent_aware") return std::make_unique<IntentAwareController>(seed, cfg);
  if (kind == "sched_slicing") return std::make_unique<SchedSlicingController>(seed, cfg);
  throw std::invalid_argument("unknown controller: " + kind);
}

const std::vector<std::string>& controller_names() {
  static const std::vector<std::string> names = {"proposed", "marr", "mapf", "intent_aware",
                                                 "sched_slicing"};
  return names;
}

}  // namespace ranslice
