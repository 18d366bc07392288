#pragma once

// JSON serialization of GtsParams and small reproducibility helpers.

#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "json.hpp"

#include "gts/error.hpp"
#include "gts/model.hpp"

namespace gts {

/// Flat object with the seven parameter keys plus "units": "percent".
inline nlohmann::json params_to_json(const GtsParams& p) {
  nlohmann::json j;
  j["units"] = "percent";
  const auto v = p.to_array();
  for (std::size_t i = 0; i < kNumParams; ++i) j[std::string(kParamNames[i])] = v[i];
  return j;
}

/// Throws ParseError on a missing or non-numeric key or a units field other
/// than "percent"; DomainError when the values violate the parameter bounds.
inline GtsParams params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("params JSON: expected an object");
  if (j.contains("units") && j["units"] != "percent") {
    throw ParseError("params JSON: unsupported units (expected \"percent\")");
  }
  std::array<double, kNumParams> v{};
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const std::string key(kParamNames[i]);
    if (!j.contains(key) || !j[key].is_number()) throw ParseError("params JSON: missing numeric key '" + key + "'");
    v[i] = j[key].get<double>();
  }
  const GtsParams p = GtsParams::from_array(v);
  validate(p);
  return p;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline GtsParams load_params_json(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("params JSON '" + path + "': " + e.what());
  }
  return params_from_json(j);
}

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace gts
