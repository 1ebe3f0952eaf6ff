#include "gvm/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <map>
#include <vector>

#include "gvm/errors.hpp"

namespace gvm::model {

namespace {

constexpr char kMagic[4] = {'G', 'V', 'M', 'P'};
constexpr std::uint32_t kVersion = 1;

void write_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

std::string config_to_json(const ModelConfig& c) {
  nlohmann::ordered_json j;
  j["layers"] = c.layers;
  j["heads"] = c.heads;
  j["model_dim"] = c.model_dim;
  j["mlp_hidden"] = c.mlp_hidden;
  j["train_len"] = c.train_len;
  j["rope_base"] = c.rope_base;
  j["fusion_hidden"] = c.fusion_hidden;
  j["head_hidden"] = c.head_hidden;
  j["keypoints"] = c.keypoints;
  j["image_feature_dim"] = c.image_feature_dim;
  j["pose_joints"] = c.pose_joints;
  j["stationary_joints"] = c.stationary_joints;
  return j.dump();
}

ModelConfig config_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model config: ") + e.what());
  }
  ModelConfig c;
  try {
    c.layers = j.at("layers").get<int>();
    c.heads = j.at("heads").get<int>();
    c.model_dim = j.at("model_dim").get<int>();
    c.mlp_hidden = j.at("mlp_hidden").get<int>();
    c.train_len = j.at("train_len").get<int>();
    c.rope_base = j.at("rope_base").get<double>();
    c.fusion_hidden = j.at("fusion_hidden").get<int>();
    c.head_hidden = j.at("head_hidden").get<int>();
    c.keypoints = j.at("keypoints").get<int>();
    c.image_feature_dim = j.at("image_feature_dim").get<int>();
    c.pose_joints = j.at("pose_joints").get<int>();
    c.stationary_joints = j.at("stationary_joints").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model config: missing field: ") + e.what());
  }
  c.validate();
  return c;
}

void save_checkpoint(const std::string& path, const ModelConfig& config,
                     const ModelParams& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw IoError("cannot open checkpoint for writing: " + path);
  }
  os.write(kMagic, sizeof(kMagic));
  std::uint32_t version = kVersion;
  os.write(reinterpret_cast<const char*>(&version), sizeof(version));

  const std::string cfg = config_to_json(config);
  write_u64(os, cfg.size());
  os.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));

  std::uint64_t count = 0;
  visit_tensors(params, [&count](const std::string&, Eigen::Map<const Eigen::VectorXd>) {
    ++count;
  });
  write_u64(os, count);
  visit_tensors_shaped(params, [&os](const std::string& name, Eigen::Index rows,
                                     Eigen::Index cols, const double* data) {
    write_u64(os, name.size());
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(os, static_cast<std::uint64_t>(rows));
    write_u64(os, static_cast<std::uint64_t>(cols));
    os.write(reinterpret_cast<const char*>(data),
             static_cast<std::streamsize>(rows * cols * sizeof(double)));
  });
  if (!os) {
    throw IoError("short write to checkpoint: " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("cannot open checkpoint: " + path);
  }
  char magic[4];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a parameter checkpoint: " + path);
  }
  std::uint32_t version = 0;
  is.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (version != kVersion) {
    throw VersionUnsupported("checkpoint version " + std::to_string(version));
  }

  const std::uint64_t cfg_len = read_u64(is);
  std::string cfg(cfg_len, '\0');
  is.read(cfg.data(), static_cast<std::streamsize>(cfg_len));
  Checkpoint out;
  out.config = config_from_json(cfg);
  out.params = zero_params(out.config);

  struct StoredTensor {
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    std::vector<double> data;
  };
  std::map<std::string, StoredTensor> tensors;
  const std::uint64_t count = read_u64(is);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t name_len = read_u64(is);
    std::string name(name_len, '\0');
    is.read(name.data(), static_cast<std::streamsize>(name_len));
    StoredTensor tensor;
    tensor.rows = read_u64(is);
    tensor.cols = read_u64(is);
    tensor.data.resize(tensor.rows * tensor.cols);
    is.read(reinterpret_cast<char*>(tensor.data.data()),
            static_cast<std::streamsize>(tensor.data.size() * sizeof(double)));
    if (!is) {
      throw ParseError("truncated checkpoint while reading tensor '" + name + "'");
    }
    tensors.emplace(std::move(name), std::move(tensor));
  }

  std::map<std::string, std::pair<Eigen::Index, Eigen::Index>> expected;
  visit_tensors_shaped(out.params, [&expected](const std::string& name, Eigen::Index rows,
                                               Eigen::Index cols, const double*) {
    expected.emplace(name, std::make_pair(rows, cols));
  });
  visit_tensors(out.params, [&tensors, &expected](const std::string& name,
                                                  Eigen::Map<Eigen::VectorXd> data) {
    const auto it = tensors.find(name);
    if (it == tensors.end()) {
      throw ParseError("checkpoint missing tensor '" + name + "'");
    }
    const auto& shape = expected.at(name);
    if (static_cast<Eigen::Index>(it->second.rows) != shape.first ||
        static_cast<Eigen::Index>(it->second.cols) != shape.second) {
      throw ShapeMismatch("checkpoint tensor '" + name + "' is " +
                          std::to_string(it->second.rows) + "x" +
                          std::to_string(it->second.cols) + ", expected " +
                          std::to_string(shape.first) + "x" + std::to_string(shape.second));
    }
    data = Eigen::Map<const Eigen::VectorXd>(it->second.data.data(),
                                             static_cast<Eigen::Index>(it->second.data.size()));
  });
  return out;
}

}  // namespace gvm::model
