#include "hsisr/pipeline.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "hsisr/checkpoint.h"
#include "hsisr/degradation.h"
#include "hsisr/error.h"
#include "hsisr/io.h"
#include "hsisr/random.h"

namespace hsisr {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kGeneratorSeedIndex = 1;
constexpr std::uint64_t kTrainSeedIndex = 2;

// Re-raises a failure with the stage name in front, keeping its kind (and so
// the CLI exit code).
template <typename F>
auto run_stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage ") + name + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("stage ") + name + ": " + e.what());
  }
}

void reject_unknown(const ordered_json& j, std::initializer_list<const char*> keys,
                    const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + " must be a JSON object");
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw InvalidArgument("unknown config key \"" + where + item.key() + "\"");
    }
  }
}

template <typename T>
void read_field(const ordered_json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("config key \"") + key + "\" has the wrong type");
  }
}

std::string relative_to(const fs::path& path, const fs::path& base) {
  return path.lexically_relative(base).generic_string();
}

ordered_json artifact(const fs::path& path, const fs::path& base) {
  return {{"path", relative_to(path, base)}, {"sha256", sha256_file(path)}};
}

ordered_json raster_artifact(const fs::path& stem, const fs::path& base) {
  return {{"header", artifact(header_path(stem), base)},
          {"payload", artifact(payload_path(stem), base)}};
}

// Hash of every file under `dir`, keyed by sorted relative path.
ordered_json directory_artifact(const fs::path& dir, const fs::path& base) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::string listing;
  for (const fs::path& f : files) {
    listing += relative_to(f, dir) + " " + sha256_file(f) + "\n";
  }
  return {{"path", relative_to(dir, base)},
          {"files", files.size()},
          {"sha256", sha256_hex(listing)}};
}

}  // namespace

void PipelineConfig::validate() const {
  if (materials < 1) throw InvalidArgument("materials must be >= 1");
  if (dataset_size < 1) throw InvalidArgument("dataset_size must be >= 1");
  degradation().validate();
  noise.validate();
  train.validate();
  if (!std::isfinite(sigma_hint) || sigma_hint < 0.0) {
    throw InvalidArgument("sigma_hint must be a finite value >= 0");
  }
  GeneratorConfig gen;
  gen.height = dl_height;
  gen.width = dl_width;
  gen.materials = materials;
  gen.scale_factor = scale;
  gen.noisy_fraction = noisy_fraction;
  gen.validate();
  if (dl_height / scale < train.patch_size || dl_width / scale < train.patch_size) {
    throw InvalidArgument("training patch (" + std::to_string(train.patch_size) +
                          ") does not fit in the LR leaf maps");
  }
  if (input.empty()) throw InvalidArgument("pipeline needs an input cube");
  // Training samples leaf values from material abundances; PCA coefficients
  // are signed and mean-centered, so that backend stays a standalone command.
  if (backend != UnmixingBackend::kMinVol) {
    throw InvalidArgument("pipeline requires backend \"minvol\"");
  }
}

std::uint64_t PipelineConfig::generator_seed() const {
  return child_seed(seed, kGeneratorSeedIndex);
}

std::uint64_t PipelineConfig::train_seed() const {
  return child_seed(seed, kTrainSeedIndex);
}

ordered_json to_json(const PipelineConfig& c) {
  ordered_json j;
  j["scale"] = c.scale;
  j["materials"] = c.materials;
  j["dataset_size"] = c.dataset_size;
  j["seed"] = c.seed;
  j["backend"] = std::string(to_string(c.backend));
  j["generator"] = {{"height", c.dl_height},
                    {"width", c.dl_width},
                    {"noisy_fraction", c.noisy_fraction}};
  j["degradation"] = {{"blur_sigma", c.degradation().blur_sigma}};
  j["noise"] = {{"mode", std::string(to_string(c.noise.mode))},
                {"sigma_max", c.noise.sigma_max},
                {"lambda", c.noise.lambda}};
  j["training"] = {{"epochs", c.train.epochs},
                   {"batch_size", c.train.batch_size},
                   {"patch_size", c.train.patch_size},
                   {"learning_rate", c.train.learning_rate},
                   {"features", c.train.features},
                   {"blocks", c.train.blocks}};
  j["inference"] = {{"sigma_hint", c.sigma_hint}};
  j["paths"] = {{"input", c.input.generic_string()},
                {"reference", c.reference.generic_string()},
                {"out", c.out.generic_string()}};
  return j;
}

PipelineConfig pipeline_config_from_json(const ordered_json& j, PipelineConfig c) {
  reject_unknown(j, {"scale", "materials", "dataset_size", "seed", "backend",
                     "generator", "degradation", "noise", "training", "inference",
                     "paths"},
                 "");
  read_field(j, "scale", c.scale);
  read_field(j, "materials", c.materials);
  read_field(j, "dataset_size", c.dataset_size);
  read_field(j, "seed", c.seed);
  if (j.contains("backend")) {
    std::string name;
    read_field(j, "backend", name);
    c.backend = parse_unmixing_backend(name);
  }
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    reject_unknown(g, {"height", "width", "noisy_fraction"}, "generator.");
    read_field(g, "height", c.dl_height);
    read_field(g, "width", c.dl_width);
    read_field(g, "noisy_fraction", c.noisy_fraction);
  }
  if (j.contains("degradation")) {
    const auto& d = j["degradation"];
    reject_unknown(d, {"blur_sigma"}, "degradation.");
    if (d.contains("blur_sigma") && !d["blur_sigma"].is_null()) {
      double sigma = 0.0;
      read_field(d, "blur_sigma", sigma);
      c.blur_sigma = sigma;
    }
  }
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    reject_unknown(n, {"mode", "sigma_max", "lambda"}, "noise.");
    if (n.contains("mode")) {
      std::string mode;
      read_field(n, "mode", mode);
      c.noise.mode = parse_noise_mode(mode);
    }
    read_field(n, "sigma_max", c.noise.sigma_max);
    read_field(n, "lambda", c.noise.lambda);
  }
  if (j.contains("training")) {
    const auto& t = j["training"];
    reject_unknown(t, {"epochs", "batch_size", "patch_size", "learning_rate",
                       "features", "blocks"},
                   "training.");
    read_field(t, "epochs", c.train.epochs);
    read_field(t, "batch_size", c.train.batch_size);
    read_field(t, "patch_size", c.train.patch_size);
    read_field(t, "learning_rate", c.train.learning_rate);
    read_field(t, "features", c.train.features);
    read_field(t, "blocks", c.train.blocks);
  }
  if (j.contains("inference")) {
    const auto& i = j["inference"];
    reject_unknown(i, {"sigma_hint"}, "inference.");
    read_field(i, "sigma_hint", c.sigma_hint);
  }
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    reject_unknown(p, {"input", "reference", "out"}, "paths.");
    std::string s;
    if (p.contains("input")) { read_field(p, "input", s); c.input = s; }
    if (p.contains("reference")) { read_field(p, "reference", s); c.reference = s; }
    if (p.contains("out")) { read_field(p, "out", s); c.out = s; }
  }
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  const std::string text = read_text_file(path);
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string(), e.byte, "invalid JSON config");
  }
  return pipeline_config_from_json(j);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw NumericalError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  return sha256_hex(read_text_file(path));
}

PipelineResult run_pipeline(const PipelineConfig& config_in,
                            const EpochCallback& on_epoch) {
  PipelineConfig config = config_in;
  config.train.seed = config.train_seed();
  config.validate();

  const fs::path out = config.out;
  fs::create_directories(out);
  const ordered_json config_json = to_json(config);
  const std::string config_hash = sha256_hex(config_json.dump());
  const DegradationSpec spec = config.degradation();

  ordered_json stages = ordered_json::array();
  PipelineResult result;

  // unmix
  const fs::path unmix_dir = out / "unmix";
  auto [endmembers, a_lr, cube_lr] = run_stage("unmix", [&] {
    SpectralCube cube = load_cube(config.input);
    EndmemberMatrix s = extract_endmembers_minvol(cube, config.materials);
    AbundanceMap a = estimate_abundances_ls(cube, s);
    save_endmembers(s, unmix_dir / "endmembers.csv");
    save_matrix_csv(s.pinv(), unmix_dir / "pinv.csv");
    save_abundance(a, unmix_dir / "a_lr");
    return std::make_tuple(std::move(s), std::move(a), std::move(cube));
  });
  stages.push_back(
      {{"name", "unmix"},
       {"parameters",
        {{"backend", std::string(to_string(config.backend))},
         {"materials", config.materials}}},
       {"inputs", {{"cube", {{"path", header_path(config.input).generic_string()},
                             {"sha256", sha256_file(header_path(config.input))},
                             {"payload_sha256",
                              sha256_file(payload_path(config.input))}}}}},
       {"outputs",
        {{"endmembers", artifact(unmix_dir / "endmembers.csv", out)},
         {"pinv", artifact(unmix_dir / "pinv.csv", out)},
         {"a_lr", raster_artifact(unmix_dir / "a_lr", out)}}}});

  // gen-dl
  const fs::path dataset_dir = out / "dataset";
  GeneratorConfig gen;
  gen.height = config.dl_height;
  gen.width = config.dl_width;
  gen.materials = config.materials;
  gen.scale_factor = config.scale;
  gen.value_mode = ValueMode::kEmpirical;
  gen.seed = config.generator_seed();
  gen.noisy_fraction = config.noisy_fraction;
  run_stage("gen-dl", [&] {
    if (fs::exists(dataset_dir)) fs::remove_all(dataset_dir);
    generate_dataset(gen, ValueSource::empirical(a_lr), spec,
                     static_cast<std::size_t>(config.dataset_size), dataset_dir);
    return 0;
  });
  stages.push_back(
      {{"name", "gen-dl"},
       {"parameters",
        {{"height", gen.height},
         {"width", gen.width},
         {"materials", gen.materials},
         {"scale", gen.scale_factor},
         {"value_mode", "empirical"},
         {"seed", gen.seed},
         {"count", config.dataset_size},
         {"noisy_fraction", gen.noisy_fraction},
         {"blur_sigma", spec.blur_sigma}}},
       {"inputs", {{"source", relative_to(unmix_dir / "a_lr", out)}}},
       {"outputs", {{"dataset", directory_artifact(dataset_dir, out)}}}});

  // train
  const fs::path train_dir = out / "train";
  Checkpoint checkpoint = run_stage("train", [&] {
    TrainResult trained =
        train(dataset_dir, config.train, config.noise, endmembers.pinv(), on_epoch);
    Checkpoint ck{std::move(trained.params), config.scale, config.train, config.noise};
    save_checkpoint(ck, train_dir / "checkpoint");
    save_training_log(trained.log, train_dir / "log.jsonl");
    result.log = std::move(trained.log);
    return ck;
  });
  stages.push_back(
      {{"name", "train"},
       {"parameters", {{"seed", config.train.seed},
                       {"epochs", config.train.epochs},
                       {"batch_size", config.train.batch_size},
                       {"patch_size", config.train.patch_size},
                       {"learning_rate", config.train.learning_rate},
                       {"features", config.train.features},
                       {"blocks", config.train.blocks},
                       {"noise_mode", std::string(to_string(config.noise.mode))},
                       {"sigma_max", config.noise.sigma_max},
                       {"lambda", config.noise.lambda}}},
       {"inputs", {{"dataset", relative_to(dataset_dir, out)},
                   {"pinv", relative_to(unmix_dir / "pinv.csv", out)}}},
       {"outputs", {{"checkpoint", raster_artifact(train_dir / "checkpoint", out)},
                    {"log", artifact(train_dir / "log.jsonl", out)}}}});

  // sr + reconstruct
  const fs::path sr_dir = out / "sr";
  run_stage("sr", [&] {
    AbundanceMap a_sr =
        super_resolve(checkpoint.params, a_lr, config.sigma_hint, config.scale);
    save_abundance(a_sr, sr_dir / "a_sr");
    save_cube(reconstruct(a_sr, endmembers), sr_dir / "hsi_sr");
    return 0;
  });
  stages.push_back(
      {{"name", "sr"},
       {"parameters", {{"sigma_hint", config.sigma_hint}, {"scale", config.scale}}},
       {"inputs", {{"checkpoint", relative_to(train_dir / "checkpoint", out)},
                   {"abundance", relative_to(unmix_dir / "a_lr", out)}}},
       {"outputs", {{"a_sr", raster_artifact(sr_dir / "a_sr", out)}}}});
  stages.push_back(
      {{"name", "reconstruct"},
       {"inputs", {{"abundance", relative_to(sr_dir / "a_sr", out)},
                   {"endmembers", relative_to(unmix_dir / "endmembers.csv", out)}}},
       {"outputs", {{"cube", raster_artifact(sr_dir / "hsi_sr", out)}}}});

  // eval
  ordered_json metrics = nullptr;
  if (!config.reference.empty()) {
    const fs::path eval_dir = out / "eval";
    run_stage("eval", [&] {
      const SpectralCube reference = load_cube(config.reference);
      // The file round trip rounds to float32; evaluate what was written.
      const SpectralCube written = load_cube(sr_dir / "hsi_sr");
      const SpectralCube bicubic = bicubic_upsample(cube_lr, config.scale);
      result.report = evaluate(reference, written, config.scale);
      result.baseline = evaluate(reference, bicubic, config.scale);
      ordered_json report = {{"pipeline", to_json(*result.report)},
                             {"bicubic", to_json(*result.baseline)}};
      write_text_file(eval_dir / "report.json", report.dump(2) + "\n");
      return 0;
    });
    stages.push_back(
        {{"name", "eval"},
         {"parameters", {{"scale", config.scale}}},
         {"inputs",
          {{"reference",
            {{"path", header_path(config.reference).generic_string()},
             {"sha256", sha256_file(header_path(config.reference))},
             {"payload_sha256", sha256_file(payload_path(config.reference))}}},
           {"test", relative_to(sr_dir / "hsi_sr", out)}}},
         {"outputs", {{"report", artifact(eval_dir / "report.json", out)}}}});
    metrics = {{"pipeline", to_json(*result.report)},
               {"bicubic", to_json(*result.baseline)}};
  }

  ordered_json manifest;
  manifest["format"] = "hsisr-run";
  manifest["version"] = 1;
  manifest["config"] = config_json;
  manifest["config_hash"] = config_hash;
  manifest["seeds"] = {{"master", config.seed},
                       {"generator", config.generator_seed()},
                       {"training", config.train.seed}};
  manifest["stages"] = stages;
  manifest["metrics"] = metrics;
  result.manifest_hash = sha256_hex(manifest.dump());
  manifest["manifest_hash"] = result.manifest_hash;
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  result.manifest = std::move(manifest);
  return result;
}

}  // namespace hsisr
