#pragma once

#include <cstdint>
#include <string>

#include "sgbh/malliavin.hpp"
#include "sgbh/noise.hpp"
#include "sgbh/solver.hpp"

namespace sgbh {

// Flat binary layout: 16-byte header (uint64 N, uint64 m, little-endian),
// then row-major float64 payload. Sheets carry N*m increments; fields append
// a uint64 type tag after the header and carry (N+1)*m values.
inline constexpr std::uint64_t kFieldTagSolution = 1;
inline constexpr std::uint64_t kFieldTagDerivative = 2;

void write_sheet_binary(const NoiseSheet& sheet, const std::string& path);
NoiseSheet read_sheet_binary(const std::string& path, double T);

void write_field_binary(const FieldPath& field, const std::string& path,
                        std::uint64_t tag = kFieldTagSolution);
FieldPath read_field_binary(const std::string& path, double T);

// CSV with header row "t,x,u", '.' decimal, %.17g values.
void write_field_csv(const FieldPath& field, const std::string& path);
void write_derivative_csv(const DerivativeField& field, const std::string& path);

void write_text(const std::string& path, const std::string& content);

}  // namespace sgbh
