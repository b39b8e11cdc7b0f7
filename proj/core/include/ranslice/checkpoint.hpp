// Binary persistence for trained policies: parameters, optimizer moments, and
// training counters.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ranslice {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A file written by a different format revision.
struct CheckpointVersionError : CheckpointError {
  using CheckpointError::CheckpointError;
};
// A file whose network dimensions do not match what the loader expects.
struct CheckpointShapeError : CheckpointError {
  using CheckpointError::CheckpointError;
};

// One policy's persisted state.
struct PolicySection {
  enum class Kind : std::uint32_t { kGaussian = 0, kCategorical = 1 };
  Kind kind = Kind::kGaussian;
  std::uint32_t obs_dim = 0;
  std::uint32_t act_dim = 0;
  std::uint32_t hidden_dim = 0;
  std::vector<double> params;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  std::uint64_t adam_steps = 0;
};

struct PolicyCheckpoint {
  static constexpr std::uint32_t kFormatVersion = 1;
  std::vector<PolicySection> sections;
  std::uint64_t env_steps = 0;
  std::uint64_t updates = 0;
};

void save_checkpoint(const PolicyCheckpoint& ckpt, const std::string& path);
PolicyCheckpoint load_checkpoint(const std::string& path);

// Shape guard used when wiring a section into a live policy.
void expect_section(const PolicySection& section, PolicySection::Kind kind, int obs_dim,
                    int act_dim, int hidden_dim);

}  // namespace ranslice
