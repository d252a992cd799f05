#include "inkmotion/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace inkmotion::nn {

namespace {

constexpr char kMagic[8] = {'I', 'N', 'K', 'M', 'O', 'D', 'L', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

std::string read_str(std::istream& in) {
  const std::uint32_t len = read_u32(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const std::string& arch_tag,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors,
                     const nlohmann::json& sidecar) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, static_cast<std::uint32_t>(arch_tag.size()));
  out.write(arch_tag.data(), static_cast<std::streamsize>(arch_tag.size()));
  write_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    write_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<std::uint32_t>(t->shape.size()));
    for (std::size_t d : t->shape) write_u64(out, d);
  }
  for (const auto& [name, t] : tensors)
    out.write(reinterpret_cast<const char*>(t->data.data()),
              static_cast<std::streamsize>(t->data.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed for " + path.string());

  std::ofstream side(path.string() + ".json");
  if (!side) throw std::runtime_error("cannot write sidecar for " + path.string());
  side << sidecar.dump(2) << '\n';
}

const Tensor& Checkpoint::get(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return t;
  throw std::runtime_error("checkpoint has no tensor named '" + name + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("bad checkpoint magic in " + path.string());
  Checkpoint ck;
  ck.arch_tag = read_str(in);
  const std::uint32_t count = read_u32(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = read_str(in);
    const std::uint32_t ndim = read_u32(in);
    std::vector<std::size_t> shape(ndim);
    for (auto& d : shape) d = read_u64(in);
    ck.tensors.emplace_back(std::move(name), Tensor(std::move(shape)));
  }
  for (auto& [name, t] : ck.tensors)
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated checkpoint " + path.string());

  std::ifstream side(path.string() + ".json");
  if (side) side >> ck.sidecar;
  return ck;
}

}  // namespace inkmotion::nn
