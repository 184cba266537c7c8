#pragma once

#include <cstdint>
#include <istream>
#include <ostream>

#include "fedsleep/nn/param_vector.hpp"

namespace fedsleep::nn {

/// Binary ParamVector layout, all integers and floats little-endian:
///
///   "FSPV"            4-byte magic
///   u32 version       currently 1
///   i32 id
///   u32 layer_count
///   layer_count x { u32 in_width, u32 out_width, u32 has_bias }
///   u64 value_count
///   value_count x f64
void write_param_vector(std::ostream& out, const ParamVector& v);
ParamVector read_param_vector(std::istream& in);

void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);

}  // namespace fedsleep::nn
