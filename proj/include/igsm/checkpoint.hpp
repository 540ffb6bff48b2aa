#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "igsm/model.hpp"
#include "json.hpp"

namespace igsm::nn {

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat binary container, described in docs/checkpoint-format.md:
//   bytes 0..7   magic "IGSMCKPT"
//   bytes 8..15  little-endian u64 length of the JSON header
//   header       UTF-8 JSON: version, dtype, model config, tensor table
//                (name, rows, cols, byte offset into the payload)
//   payload      row-major tensor data, little-endian, in table order
inline constexpr char kCheckpointMagic[8] = {'I', 'G', 'S', 'M', 'C', 'K', 'P', 'T'};

template <class T>
const char* dtype_name() {
    if constexpr (std::is_same_v<T, float>) return "f32";
    else return "f64";
}

template <class T>
void save_checkpoint(const ModelParams<T>& m, const std::string& path) {
    nlohmann::ordered_json header;
    header["version"] = 1;
    header["dtype"] = dtype_name<T>();
    header["config"] = {{"vocab_size", m.config.vocab_size},
                        {"n_layers", m.config.n_layers},
                        {"n_heads", m.config.n_heads},
                        {"d_model", m.config.d_model},
                        {"context", m.config.context}};
    auto& tensors = header["tensors"] = nlohmann::json::array();
    uint64_t offset = 0;
    for (const auto& p : m.params) {
        tensors.push_back({{"name", p.name},
                           {"rows", p.value.rows()},
                           {"cols", p.value.cols()},
                           {"offset", offset}});
        offset += static_cast<uint64_t>(p.value.size()) * sizeof(T);
    }
    const std::string head = header.dump();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + path);
    out.write(kCheckpointMagic, 8);
    uint64_t len = head.size();
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    for (const auto& p : m.params)
        out.write(reinterpret_cast<const char*>(p.value.data()),
                  static_cast<std::streamsize>(p.value.size() * sizeof(T)));
    if (!out) throw CheckpointError("write failed for " + path);
}

template <class T>
ModelParams<T> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot read " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw CheckpointError(path + ": bad magic");
    uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 8);
    std::string head(len, '\0');
    in.read(head.data(), static_cast<std::streamsize>(len));
    if (!in) throw CheckpointError(path + ": truncated header");
    auto header = nlohmann::json::parse(head);
    if (header.at("dtype").get<std::string>() != dtype_name<T>())
        throw CheckpointError(path + ": dtype is " + header.at("dtype").get<std::string>() +
                              ", expected " + dtype_name<T>());
    TransformerConfig cfg;
    const auto& jc = header.at("config");
    cfg.vocab_size = jc.at("vocab_size");
    cfg.n_layers = jc.at("n_layers");
    cfg.n_heads = jc.at("n_heads");
    cfg.d_model = jc.at("d_model");
    cfg.context = jc.at("context");
    ModelParams<T> m;
    m.config = cfg;
    for (const auto& t : header.at("tensors")) {
        Mat<T> value(t.at("rows").get<Eigen::Index>(), t.at("cols").get<Eigen::Index>());
        in.read(reinterpret_cast<char*>(value.data()),
                static_cast<std::streamsize>(value.size() * sizeof(T)));
        if (!in) throw CheckpointError(path + ": truncated payload");
        m.add(t.at("name").get<std::string>(), std::move(value));
    }
    return m;
}

}  // namespace igsm::nn
