#include "fedsleep/nn/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <stdexcept>

#include "fedsleep/common/error.hpp"

namespace fedsleep::nn {

namespace {

constexpr std::array<char, 4> kMagic{'F', 'S', 'P', 'V'};
constexpr std::uint32_t kVersion = 1;

template <typename U>
void write_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U read_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw std::runtime_error("unexpected end of ParamVector stream");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_u32(std::ostream& out, std::uint32_t v) { write_le(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { write_le(out, v); }
void write_f64(std::ostream& out, double v) { write_le(out, std::bit_cast<std::uint64_t>(v)); }
std::uint32_t read_u32(std::istream& in) { return read_le<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return read_le<std::uint64_t>(in); }
double read_f64(std::istream& in) { return std::bit_cast<double>(read_le<std::uint64_t>(in)); }

void write_param_vector(std::ostream& out, const ParamVector& v) {
  out.write(kMagic.data(), kMagic.size());
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(v.id()));
  write_u32(out, static_cast<std::uint32_t>(v.shapes().size()));
  for (const auto& s : v.shapes()) {
    write_u32(out, static_cast<std::uint32_t>(s.in_width));
    write_u32(out, static_cast<std::uint32_t>(s.out_width));
    write_u32(out, s.has_bias ? 1u : 0u);
  }
  write_u64(out, v.size());
  for (double x : v.values()) write_f64(out, x);
}

ParamVector read_param_vector(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("not a ParamVector stream (bad magic)");
  const auto version = read_u32(in);
  if (version != kVersion) throw std::runtime_error("unsupported ParamVector version");
  const auto id = static_cast<std::int32_t>(read_u32(in));
  const auto layers = read_u32(in);
  std::vector<LayerShape> shapes(layers);
  for (auto& s : shapes) {
    s.in_width = static_cast<int>(read_u32(in));
    s.out_width = static_cast<int>(read_u32(in));
    s.has_bias = read_u32(in) != 0;
  }
  const auto count = read_u64(in);
  if (count != total_param_count(shapes)) throw ShapeError("ParamVector stream: value count mismatch");
  std::vector<double> values(count);
  for (auto& x : values) x = read_f64(in);
  return ParamVector(std::move(shapes), std::move(values), id);
}

}  // namespace fedsleep::nn
