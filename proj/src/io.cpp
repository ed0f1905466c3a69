#include "loraadv/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "loraadv/error.hpp"

namespace loraadv {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw std::runtime_error("failed writing " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

std::string encode_f64le(std::span<const double> values) {
    std::string out(values.size() * 8, '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto bits = std::bit_cast<std::uint64_t>(values[i]);
        for (std::size_t b = 0; b < 8; ++b) out[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    }
    return out;
}

std::vector<double> decode_f64le(std::string_view bytes) {
    if (bytes.size() % 8 != 0) throw InputError("f64le payload length is not a multiple of 8");
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t bits = 0;
        for (std::size_t b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + b])) << (8 * b);
        out[i] = std::bit_cast<double>(bits);
    }
    return out;
}

void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
}

namespace {

// JSON has no infinity; the noiseless sentinel is spelled "inf".
Json encode_snr(double snr_db) {
    if (std::isinf(snr_db) && snr_db > 0) return "inf";
    return snr_db;
}

double decode_snr(const Json& v) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw ConfigError("snr_db must be a number or \"inf\"");
    }
    return v.get<double>();
}

Interval interval_from_json(const Json& v, std::string_view what) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(std::string(what) + " must be a [lo, hi] pair");
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace

Json to_json(const ChirpConfig& c) {
    return Json{{"spreading_factor", c.spreading_factor},
                {"bandwidth_hz", c.bandwidth_hz},
                {"sample_rate_hz", c.sample_rate_hz},
                {"snr_db", encode_snr(c.snr_db)}};
}

ChirpConfig chirp_from_json(const Json& doc) {
    reject_unknown_keys(doc, {"spreading_factor", "bandwidth_hz", "sample_rate_hz", "snr_db"}, "chirp");
    ChirpConfig c;
    if (doc.contains("spreading_factor")) c.spreading_factor = doc.at("spreading_factor").get<int>();
    if (doc.contains("bandwidth_hz")) c.bandwidth_hz = doc.at("bandwidth_hz").get<double>();
    if (doc.contains("sample_rate_hz")) c.sample_rate_hz = doc.at("sample_rate_hz").get<double>();
    if (doc.contains("snr_db")) c.snr_db = decode_snr(doc.at("snr_db"));
    c.validate();
    return c;
}

std::string_view device_name(DeviceId device) { return device == DeviceId::Device1 ? "Device1" : "Device2"; }

std::string_view legitimacy_name(Legitimacy l) { return l == Legitimacy::Legitimate ? "Legitimate" : "Rogue"; }

Json to_json(const DeviceProfile& p) {
    return Json{{"device_id", device_name(p.device)},
                {"legitimacy", legitimacy_name(p.legitimacy)},
                {"cfo_hz", p.cfo_hz},
                {"amp_offset_db_range", {p.amp_offset_db.lo, p.amp_offset_db.hi}},
                {"phase_offset_rad_range", {p.phase_offset_rad.lo, p.phase_offset_rad.hi}},
                {"iq_gain_imbalance", p.iq_gain_imbalance}};
}

DeviceProfile profile_from_json(const Json& doc) {
    reject_unknown_keys(doc,
                        {"device_id", "legitimacy", "cfo_hz", "amp_offset_db_range", "phase_offset_rad_range",
                         "iq_gain_imbalance"},
                        "profile");
    DeviceProfile p;
    const auto device = doc.at("device_id").get<std::string>();
    if (device == "Device1") p.device = DeviceId::Device1;
    else if (device == "Device2") p.device = DeviceId::Device2;
    else throw ConfigError("profile: unknown device_id '" + device + "'");
    const auto legit = doc.at("legitimacy").get<std::string>();
    if (legit == "Legitimate") p.legitimacy = Legitimacy::Legitimate;
    else if (legit == "Rogue") p.legitimacy = Legitimacy::Rogue;
    else throw ConfigError("profile: unknown legitimacy '" + legit + "'");
    p.cfo_hz = doc.value("cfo_hz", 0.0);
    p.iq_gain_imbalance = doc.value("iq_gain_imbalance", 0.0);
    if (doc.contains("amp_offset_db_range"))
        p.amp_offset_db = interval_from_json(doc.at("amp_offset_db_range"), "amp_offset_db_range");
    if (doc.contains("phase_offset_rad_range"))
        p.phase_offset_rad = interval_from_json(doc.at("phase_offset_rad_range"), "phase_offset_rad_range");
    p.validate();
    return p;
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string format_shortest(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

}  // namespace loraadv
