// Checkpoint persistence: exact round-trips, corruption diagnostics, and the
// resume-versus-initial-parameters restore modes.
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "ranslice/checkpoint.hpp"
#include "ranslice/controllers.hpp"
#include "ranslice/obs.hpp"
#include "ranslice/types.hpp"

using namespace ranslice;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

PolicyCheckpoint sample_checkpoint() {
  PolicyCheckpoint ckpt;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  PolicySection g;
  g.kind = PolicySection::Kind::kGaussian;
  g.obs_dim = 4;
  g.act_dim = 2;
  g.hidden_dim = 8;
  for (int i = 0; i < 30; ++i) g.params.push_back(d(rng));
  for (int i = 0; i < 30; ++i) g.adam_m.push_back(d(rng));
  for (int i = 0; i < 30; ++i) g.adam_v.push_back(d(rng));
  g.adam_steps = 17;
  ckpt.sections.push_back(g);
  PolicySection c;
  c.kind = PolicySection::Kind::kCategorical;
  c.obs_dim = 19;
  c.act_dim = 3;
  c.hidden_dim = 16;
  for (int i = 0; i < 12; ++i) c.params.push_back(d(rng));
  c.adam_steps = 3;
  ckpt.sections.push_back(c);
  ckpt.env_steps = 123456;
  ckpt.updates = 78;
  return ckpt;
}

}  // namespace

TEST_CASE("checkpoints round-trip bit-exactly") {
  const auto path = temp_file("ranslice_ckpt_roundtrip.bin");
  const auto ckpt = sample_checkpoint();
  save_checkpoint(ckpt, path.string());
  const auto back = load_checkpoint(path.string());

  REQUIRE(back.sections.size() == ckpt.sections.size());
  CHECK(back.env_steps == ckpt.env_steps);
  CHECK(back.updates == ckpt.updates);
  for (size_t s = 0; s < ckpt.sections.size(); ++s) {
    const auto& a = ckpt.sections[s];
    const auto& b = back.sections[s];
    CHECK(a.kind == b.kind);
    CHECK(a.obs_dim == b.obs_dim);
    CHECK(a.act_dim == b.act_dim);
    CHECK(a.hidden_dim == b.hidden_dim);
    CHECK(a.adam_steps == b.adam_steps);
    REQUIRE(a.params.size() == b.params.size());
    for (size_t i = 0; i < a.params.size(); ++i) CHECK(a.params[i] == b.params[i]);
    REQUIRE(a.adam_m.size() == b.adam_m.size());
    for (size_t i = 0; i < a.adam_m.size(); ++i) CHECK(a.adam_m[i] == b.adam_m[i]);
    REQUIRE(a.adam_v.size() == b.adam_v.size());
    for (size_t i = 0; i < a.adam_v.size(); ++i) CHECK(a.adam_v[i] == b.adam_v[i]);
  }
  std::filesystem::remove(path);
}

TEST_CASE("a foreign format version is reported as such") {
  const auto path = temp_file("ranslice_ckpt_version.bin");
  save_checkpoint(sample_checkpoint(), path.string());
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);  // version field follows the 8-byte magic
    const std::uint32_t bogus = 0xFFFFFFFFu;
    f.write(reinterpret_cast<const char*>(&bogus), sizeof bogus);
  }
  CHECK_THROWS_AS(load_checkpoint(path.string()), CheckpointVersionError);
  std::filesystem::remove(path);
}

TEST_CASE("corrupt magic and truncation raise checkpoint errors") {
  const auto path = temp_file("ranslice_ckpt_corrupt.bin");
  save_checkpoint(sample_checkpoint(), path.string());
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.write("XX", 2);
  }
  CHECK_THROWS_AS(load_checkpoint(path.string()), CheckpointError);

  save_checkpoint(sample_checkpoint(), path.string());
  std::filesystem::resize_file(path, 20);
  CHECK_THROWS_AS(load_checkpoint(path.string()), CheckpointError);
  CHECK_THROWS_AS(load_checkpoint((path.string() + ".missing")), CheckpointError);
  std::filesystem::remove(path);
}

TEST_CASE("expect_section guards every dimension") {
  PolicySection s;
  s.kind = PolicySection::Kind::kGaussian;
  s.obs_dim = 10;
  s.act_dim = 5;
  s.hidden_dim = 64;
  CHECK_NOTHROW(expect_section(s, PolicySection::Kind::kGaussian, 10, 5, 64));
  CHECK_THROWS_AS(expect_section(s, PolicySection::Kind::kCategorical, 10, 5, 64),
                  CheckpointShapeError);
  CHECK_THROWS_AS(expect_section(s, PolicySection::Kind::kGaussian, 11, 5, 64),
                  CheckpointShapeError);
  CHECK_THROWS_AS(expect_section(s, PolicySection::Kind::kGaussian, 10, 4, 64),
                  CheckpointShapeError);
  CHECK_THROWS_AS(expect_section(s, PolicySection::Kind::kGaussian, 10, 5, 32),
                  CheckpointShapeError);
}

TEST_CASE("the two-level agent rejects malformed checkpoints") {
  ProposedController agent(42);
  PolicyCheckpoint one_section = agent.snapshot();
  one_section.sections.pop_back();
  CHECK_THROWS_AS(agent.restore(one_section), CheckpointShapeError);

  PolicyCheckpoint bad_params = agent.snapshot();
  bad_params.sections[0].params.pop_back();
  CHECK_THROWS_AS(agent.restore(bad_params), CheckpointShapeError);

  PolicyCheckpoint bad_dims = agent.snapshot();
  bad_dims.sections[1].obs_dim += 1;
  CHECK_THROWS_AS(agent.restore(bad_dims), CheckpointShapeError);
}

TEST_CASE("restore modes split optimizer state from weights") {
  ProposedController agent(7);
  PolicyCheckpoint snap = agent.snapshot();

  // Pretend the checkpoint came from a long run with shrunken exploration.
  const size_t inter_params = snap.sections[0].params.size();
  for (int slot = 0; slot < kMaxSlices; ++slot) {
    snap.sections[0].params[inter_params - 1 - static_cast<size_t>(slot)] = -3.0;
  }
  for (auto& m : snap.sections[0].adam_m) m = 0.5;
  snap.sections[0].adam_steps = 99;
  snap.sections[1].adam_steps = 99;

  ProposedController resumed(7);
  resumed.restore(snap, Controller::RestoreMode::kResume);
  const auto after_resume = resumed.snapshot();
  CHECK(after_resume.sections[0].adam_steps == 99);
  CHECK(after_resume.sections[0].adam_m[0] == 0.5);
  // The shrunken log-stds come back verbatim.
  CHECK(after_resume.sections[0].params[inter_params - 1] == -3.0);

  ProposedController fresh(7);
  fresh.restore(snap, Controller::RestoreMode::kWeightsOnly);
  const auto after_fresh = fresh.snapshot();
  // Weights land, but the optimizer restarts and exploration is reset.
  CHECK(after_fresh.sections[0].adam_steps == 0);
  CHECK(after_fresh.sections[0].adam_m[0] == 0.0);
  CHECK(after_fresh.sections[0].params[inter_params - 1] == 0.0);
  CHECK(after_fresh.sections[0].params[0] == snap.sections[0].params[0]);
  CHECK(after_fresh.sections[1].params == snap.sections[1].params);
}
