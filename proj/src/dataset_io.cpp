#include "loraadv/dataset_io.hpp"

#include <array>

#include "loraadv/error.hpp"

namespace loraadv {

namespace fs = std::filesystem;

void save_dataset(const fs::path& dir, const LabeledDataset& dataset, const DatasetMeta& meta) {
    dataset.validate();
    std::vector<double> flat;
    flat.reserve(dataset.size() * kSampleValues);
    for (const auto& s : dataset.samples) flat.insert(flat.end(), s.values.begin(), s.values.end());
    std::string labels(dataset.size(), '\0'), origins(dataset.size(), '\0');
    std::array<std::size_t, 2> per_class{};
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        labels[i] = static_cast<char>(dataset.labels[i]);
        origins[i] = static_cast<char>(dataset.origins[i].encode());
        per_class[static_cast<std::size_t>(dataset.labels[i])]++;
    }

    Json doc = {{"task", task_name(dataset.task)},
                {"seed", meta.seed},
                {"config", to_json(meta.config)},
                {"sample_shape", {2, kWindowLength}},
                {"counts",
                 {{"total", dataset.size()},
                  {"train", dataset.n_train},
                  {"test", dataset.n_test()},
                  {"per_class", {per_class[0], per_class[1]}}}}};
    for (const auto& [key, value] : meta.extra.items()) doc[key] = value;

    fs::path staging = dir;
    staging += ".staging";
    fs::remove_all(staging);
    fs::create_directories(staging);
    write_file_atomic(staging / "meta.json", dump_json(doc));
    write_file_atomic(staging / "samples.f64le", encode_f64le(flat));
    write_file_atomic(staging / "labels.u8", labels);
    write_file_atomic(staging / "origins.u8", origins);
    fs::remove_all(dir);
    fs::rename(staging, dir);
}

LoadedDataset load_dataset(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("dataset cache not found: " + dir.string());
    const Json doc = Json::parse(read_file(dir / "meta.json"));
    LoadedDataset out;
    auto& ds = out.dataset;
    ds.task = parse_task(doc.at("task").get<std::string>());
    out.meta.seed = doc.at("seed").get<std::uint64_t>();
    out.meta.config = chirp_from_json(doc.at("config"));
    for (const auto& [key, value] : doc.items()) {
        if (key != "task" && key != "seed" && key != "config" && key != "sample_shape" && key != "counts")
            out.meta.extra[key] = value;
    }

    const auto flat = decode_f64le(read_file(dir / "samples.f64le"));
    const auto labels = read_file(dir / "labels.u8");
    const auto origins = read_file(dir / "origins.u8");
    const std::size_t total = doc.at("counts").at("total").get<std::size_t>();
    if (flat.size() != total * kSampleValues || labels.size() != total || origins.size() != total)
        throw InputError("dataset files in " + dir.string() + " disagree with meta.json counts");

    ds.samples.resize(total);
    ds.labels.resize(total);
    ds.origins.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(i * kSampleValues), kSampleValues,
                    ds.samples[i].values.begin());
        ds.labels[i] = static_cast<unsigned char>(labels[i]);
        ds.origins[i] = SampleOrigin::decode(static_cast<std::uint8_t>(origins[i]));
    }
    ds.n_train = doc.at("counts").at("train").get<std::size_t>();
    ds.validate();
    return out;
}

}  // namespace loraadv
