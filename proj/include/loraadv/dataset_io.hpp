#pragma once

#include <cstdint>
#include <filesystem>

#include "loraadv/io.hpp"
#include "loraadv/signal.hpp"

namespace loraadv {

struct DatasetMeta {
    std::uint64_t seed = 0;
    ChirpConfig config;
    /// Producer-specific fields merged into meta.json (e.g. KDE bandwidth).
    Json extra = Json::object();
};

/// Dataset cache directory layout:
///   meta.json      task, config, seed, counts (+ extra fields)
///   samples.f64le  sample-major, I row then Q row, little-endian doubles
///   labels.u8      one byte per sample
///   origins.u8     one byte per sample: bit 0 device, bit 1 rogue
/// The directory is staged next to `dir` and renamed into place.
void save_dataset(const std::filesystem::path& dir, const LabeledDataset& dataset, const DatasetMeta& meta);

struct LoadedDataset {
    LabeledDataset dataset;
    DatasetMeta meta;
};

LoadedDataset load_dataset(const std::filesystem::path& dir);

}  // namespace loraadv
