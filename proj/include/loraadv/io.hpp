#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "loraadv/signal.hpp"

namespace loraadv {

using Json = nlohmann::json;

/// Writes `path` through a sibling temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// Pretty JSON with shortest round-trip decimals and a trailing newline.
std::string dump_json(const Json& doc);

std::string encode_f64le(std::span<const double> values);
std::vector<double> decode_f64le(std::string_view bytes);

/// Throws ConfigError naming the first key of `obj` not in `allowed`.
void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where);

Json to_json(const ChirpConfig& config);
ChirpConfig chirp_from_json(const Json& doc);
Json to_json(const DeviceProfile& profile);
DeviceProfile profile_from_json(const Json& doc);

std::string_view device_name(DeviceId device);   // "Device1" | "Device2"
std::string_view legitimacy_name(Legitimacy l);  // "Legitimate" | "Rogue"

/// Fixed-point decimal formatting, e.g. format_fixed(0.5, 6) == "0.500000".
std::string format_fixed(double value, int decimals);
/// Shortest decimal that parses back to the same double.
std::string format_shortest(double value);

}  // namespace loraadv
