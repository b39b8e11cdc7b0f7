#include <bit>
#include <cstring>
#include <fstream>

#include "ranslice/channel.hpp"

namespace ranslice {

namespace {

constexpr char kMagic[8] = {'S', 'E', 'G', 'R', 'I', 'D', '0', '1'};
// Caps the header product so a corrupt header cannot drive a giant alloc.
constexpr std::uint64_t kMaxCells = 1ULL << 32;

static_assert(std::endian::native == std::endian::little,
              "trace IO assumes a little-endian host");

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw ChannelError("truncated SE trace header: " + path);
  return v;
}

}  // namespace

void save_se_grid(const SEGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ChannelError("cannot write SE trace: " + path);
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, static_cast<std::uint32_t>(grid.ue_count));
  put_u32(out, static_cast<std::uint32_t>(grid.rb_count));
  put_u32(out, static_cast<std::uint32_t>(grid.step_count));
  out.write(reinterpret_cast<const char*>(grid.values.data()),
            static_cast<std::streamsize>(grid.values.size() * sizeof(float)));
  if (!out) throw ChannelError("write failed for SE trace: " + path);
}

SEGrid load_se_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ChannelError("cannot open SE trace: " + path);
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ChannelError("bad magic in SE trace: " + path);
  }
  SEGrid grid;
  grid.ue_count = static_cast<int>(get_u32(in, path));
  grid.rb_count = static_cast<int>(get_u32(in, path));
  grid.step_count = static_cast<int>(get_u32(in, path));
  const std::uint64_t cells = static_cast<std::uint64_t>(grid.ue_count) * grid.rb_count *
                              static_cast<std::uint64_t>(grid.step_count);
  if (grid.ue_count <= 0 || grid.rb_count <= 0 || grid.step_count <= 0 ||
      cells > kMaxCells) {
    throw ChannelError("dimension overflow in SE trace header: " + path);
  }
  grid.values.resize(cells);
  in.read(reinterpret_cast<char*>(grid.values.data()),
          static_cast<std::streamsize>(cells * sizeof(float)));
  if (static_cast<std::uint64_t>(in.gcount()) != cells * sizeof(float)) {
    throw ChannelError("truncated SE trace payload: " + path);
  }
  return grid;
}

}  // namespace ranslice
