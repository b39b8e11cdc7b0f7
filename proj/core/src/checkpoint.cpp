#include "ranslice/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ranslice {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint files are little-endian; big-endian hosts need byte swaps");

constexpr char kMagic[8] = {'R', 'S', 'C', 'K', 'P', 'T', '0', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64s(std::ostream& out, const std::vector<double>& v) {
  put_u64(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw CheckpointError("truncated checkpoint");
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw CheckpointError("truncated checkpoint");
  return v;
}

std::vector<double> get_f64s(std::istream& in) {
  const std::uint64_t n = get_u64(in);
  if (n > (1ull << 30)) throw CheckpointError("checkpoint array too large");
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw CheckpointError("truncated checkpoint");
  return v;
}

}  // namespace

void save_checkpoint(const PolicyCheckpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open checkpoint for writing: " + path);
  out.write(kMagic, sizeof kMagic);
  put_u32(out, PolicyCheckpoint::kFormatVersion);
  put_u64(out, ckpt.env_steps);
  put_u64(out, ckpt.updates);
  put_u32(out, static_cast<std::uint32_t>(ckpt.sections.size()));
  for (const auto& s : ckpt.sections) {
    put_u32(out, static_cast<std::uint32_t>(s.kind));
    put_u32(out, s.obs_dim);
    put_u32(out, s.act_dim);
    put_u32(out, s.hidden_dim);
    put_f64s(out, s.params);
    put_f64s(out, s.adam_m);
    put_f64s(out, s.adam_v);
    put_u64(out, s.adam_steps);
  }
  out.flush();
  if (!out) throw CheckpointError("failed to write checkpoint: " + path);
}

PolicyCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  char magic[sizeof kMagic] = {};
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw CheckpointError("not a checkpoint file: " + path);
  const std::uint32_t version = get_u32(in);
  if (version != PolicyCheckpoint::kFormatVersion)
    throw CheckpointVersionError("unsupported checkpoint version " + std::to_string(version));
  PolicyCheckpoint ckpt;
  ckpt.env_steps = get_u64(in);
  ckpt.updates = get_u64(in);
  const std::uint32_t n = get_u32(in);
  if (n > 16) throw CheckpointError("checkpoint section count out of range");
  for (std::uint32_t i = 0; i < n; ++i) {
    PolicySection s;
    const std::uint32_t kind = get_u32(in);
    if (kind > 1) throw CheckpointError("unknown policy section kind");
    s.kind = static_cast<PolicySection::Kind>(kind);
    s.obs_dim = get_u32(in);
    s.act_dim = get_u32(in);
    s.hidden_dim = get_u32(in);
    s.params = get_f64s(in);
    s.adam_m = get_f64s(in);
    s.adam_v = get_f64s(in);
    s.adam_steps = get_u64(in);
    if (s.adam_m.size() != s.params.size() || s.adam_v.size() != s.params.size())
      throw CheckpointShapeError("optimizer moments do not match the parameter count");
    ckpt.sections.push_back(std::move(s));
  }
  return ckpt;
}

void expect_section(const PolicySection& section, PolicySection::Kind kind, int obs_dim,
                    int act_dim, int hidden_dim) {
  if (section.kind != kind) throw CheckpointShapeError("policy section has the wrong kind");
  if (section.obs_dim != static_cast<std::uint32_t>(obs_dim) ||
      section.act_dim != static_cast<std::uint32_t>(act_dim) ||
      section.hidden_dim != static_cast<std::uint32_t>(hidden_dim)) {
    throw CheckpointShapeError("policy section dimensions do not match the expected network");
  }
}

}  // namespace ranslice
