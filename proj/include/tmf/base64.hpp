#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tmf {

std::string base64_encode(std::string_view bytes);
/// Throws std::invalid_argument on malformed input.
std::string base64_decode(std::string_view text);

/// Little-endian IEEE-754 float64 array as base64.
std::string encode_f64(const std::vector<double>& values);
std::vector<double> decode_f64(std::string_view text);

} // namespace tmf
