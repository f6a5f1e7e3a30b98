#include "hsisr/checkpoint.h"

#include <string>

#include "hsisr/error.h"
#include "hsisr/io.h"

namespace hsisr {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kFormat = "hsisr-srnet";
constexpr int kVersion = 1;

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const fs::path& path) {
  const NetworkParams& params = checkpoint.params;
  const NetworkShape& shape = params.shape();
  const fs::path blob = payload_path(path);

  ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["architecture"] = {{"materials", shape.materials},
                       {"in_channels", shape.in_channels()},
                       {"features", shape.features},
                       {"blocks", shape.blocks},
                       {"kernel", 3}};
  j["scale"] = checkpoint.scale;
  j["hyperparameters"] = {{"epochs", checkpoint.train.epochs},
                          {"batch_size", checkpoint.train.batch_size},
                          {"patch_size", checkpoint.train.patch_size},
                          {"learning_rate", checkpoint.train.learning_rate},
                          {"optimizer", "adam"},
                          {"beta1", 0.9},
                          {"beta2", 0.999},
                          {"epsilon", 1e-8},
                          {"loss", "l1"},
                          {"noise_mode", std::string(to_string(checkpoint.noise.mode))},
                          {"sigma_max", checkpoint.noise.sigma_max},
                          {"lambda", checkpoint.noise.lambda}};
  j["seed"] = checkpoint.train.seed;
  ordered_json layers = ordered_json::array();
  for (const LayerInfo& layer : params.layers()) {
    layers.push_back({{"name", layer.name},
                      {"shape", layer.dims},
                      {"offset", layer.offset},
                      {"count", layer.count}});
  }
  j["layers"] = layers;
  j["dtype"] = "f32";
  j["blob"] = blob.filename().string();
  j["parameter_count"] = params.values().size();

  write_text_file(header_path(path), j.dump(2) + "\n");
  write_f32_file(blob, params.values());
}

Checkpoint load_checkpoint(const fs::path& path) {
  const fs::path manifest_path = header_path(path);
  const std::string text = read_text_file(manifest_path);
  const std::string name = manifest_path.string();
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(name, e.byte, "invalid checkpoint manifest");
  }

  Checkpoint ck;
  NetworkShape shape;
  try {
    if (j.at("format") != kFormat) throw FormatError(name, 0, "not an hsisr-srnet checkpoint");
    if (j.at("dtype") != "f32") throw FormatError(name, 0, "checkpoint dtype must be f32");
    const auto& arch = j.at("architecture");
    shape.materials = arch.at("materials").get<int>();
    shape.features = arch.at("features").get<int>();
    shape.blocks = arch.at("blocks").get<int>();
    ck.scale = j.at("scale").get<int>();
    const auto& hp = j.at("hyperparameters");
    ck.train.epochs = hp.at("epochs").get<int>();
    ck.train.batch_size = hp.at("batch_size").get<int>();
    ck.train.patch_size = hp.at("patch_size").get<int>();
    ck.train.learning_rate = hp.at("learning_rate").get<double>();
    ck.train.features = shape.features;
    ck.train.blocks = shape.blocks;
    ck.train.seed = j.at("seed").get<std::uint64_t>();
    ck.noise.mode = parse_noise_mode(hp.at("noise_mode").get<std::string>());
    ck.noise.sigma_max = hp.at("sigma_max").get<double>();
    ck.noise.lambda = hp.at("lambda").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(name, 0, std::string("bad checkpoint manifest: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(name, 0, e.what());
  }

  ck.params = NetworkParams(shape);
  const auto& layers = j.at("layers");
  if (layers.size() != ck.params.layers().size()) {
    throw FormatError(name, 0, "layer list does not match the architecture");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerInfo& expect = ck.params.layers()[i];
    if (layers[i].value("name", "") != expect.name ||
        layers[i].value("shape", std::vector<int>{}) != expect.dims) {
      throw FormatError(name, 0, "layer " + std::to_string(i) + " (" + expect.name +
                                     ") does not match the architecture");
    }
  }

  fs::path blob = manifest_path.parent_path() / j.value("blob", "");
  const std::vector<double> values = read_f32_file(blob, ck.params.values().size());
  std::copy(values.begin(), values.end(), ck.params.values().begin());
  return ck;
}

void save_training_log(const std::vector<EpochLog>& log, const fs::path& path) {
  std::string text;
  for (const EpochLog& e : log) {
    ordered_json j;
    j["epoch"] = e.epoch;
    j["mean_l1"] = e.mean_l1;
    text += j.dump() + "\n";
  }
  write_text_file(path, text);
}

}  // namespace hsisr
