// hsisr: command-line front end.
//
//   hsisr phantom  --out data/ --height 64 --width 64 --bands 20 --materials 3
//   hsisr unmix    data/hsi_lr --materials 3 --out run/unmix
//   hsisr gen-dl   --source run/unmix/a_lr --materials 3 --n 200 --out run/dl
//   hsisr train    run/dl --endmembers run/unmix/endmembers.csv --out run/train
//   hsisr sr       run/train/checkpoint run/unmix/a_lr --out run/sr
//   hsisr reconstruct run/sr/a_sr run/unmix/endmembers.csv --out run/sr
//   hsisr eval     data/hsi_hr run/sr/hsi_sr --scale 2
//   hsisr pipeline --config run.json --input data/hsi_lr --reference data/hsi_hr
//
// Exit codes: 0 success, 2 usage or validation, 3 data format, 4 numerical.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hsisr/commands.h"
#include "hsisr/error.h"

namespace {

namespace fs = std::filesystem;
using namespace hsisr;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
  std::optional<std::string> out;
  bool quiet = false;
};

// Flags that override fields of the (optional) JSON config.
struct Overrides {
  std::optional<int> scale;
  std::optional<double> blur_sigma;
  std::optional<int> materials;
  std::optional<int> count;
  std::optional<int> height;
  std::optional<int> width;
  std::optional<double> noisy_fraction;
  std::optional<std::string> backend;
  std::optional<std::string> noise_mode;
  std::optional<double> sigma_max;
  std::optional<double> lambda;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<int> patch_size;
  std::optional<double> learning_rate;
  std::optional<int> features;
  std::optional<int> blocks;
  std::optional<double> sigma_hint;
};

void add_degradation_flags(CLI::App* app, Overrides& o) {
  app->add_option("--scale", o.scale, "Scale factor (2, 3, 4, ...)");
  app->add_option("--sigma", o.blur_sigma, "Gaussian blur sigma (default: scale)");
}

void add_generator_flags(CLI::App* app, Overrides& o) {
  app->add_option("--n", o.count, "Number of pairs");
  app->add_option("--height", o.height, "HR map height");
  app->add_option("--width", o.width, "HR map width");
  app->add_option("--noisy-fraction", o.noisy_fraction,
                  "Fraction of samples flagged for noise injection");
}

void add_noise_flags(CLI::App* app, Overrides& o) {
  app->add_option("--noise-mode", o.noise_mode, "clean | noisy | halfmix | stdaware");
  app->add_option("--sigma-max", o.sigma_max, "Noise std ceiling");
  app->add_option("--lambda", o.lambda, "Exponential rate of the sigma law");
}

void add_training_flags(CLI::App* app, Overrides& o) {
  app->add_option("--epochs", o.epochs);
  app->add_option("--batch-size", o.batch_size);
  app->add_option("--patch-size", o.patch_size, "LR patch side");
  app->add_option("--lr", o.learning_rate, "Adam learning rate");
  app->add_option("--features", o.features, "Feature channels");
  app->add_option("--blocks", o.blocks, "Residual blocks");
}

template <typename T>
void override(T& field, const std::optional<T>& value) {
  if (value) field = *value;
}

PipelineConfig effective_config(const Globals& g, const Overrides& o) {
  PipelineConfig c = g.config ? load_pipeline_config(*g.config) : PipelineConfig{};
  override(c.seed, g.seed);
  override(c.scale, o.scale);
  if (o.blur_sigma) c.blur_sigma = *o.blur_sigma;
  override(c.materials, o.materials);
  override(c.dataset_size, o.count);
  override(c.dl_height, o.height);
  override(c.dl_width, o.width);
  override(c.noisy_fraction, o.noisy_fraction);
  if (o.backend) c.backend = parse_unmixing_backend(*o.backend);
  if (o.noise_mode) c.noise.mode = parse_noise_mode(*o.noise_mode);
  override(c.noise.sigma_max, o.sigma_max);
  override(c.noise.lambda, o.lambda);
  override(c.train.epochs, o.epochs);
  override(c.train.batch_size, o.batch_size);
  override(c.train.patch_size, o.patch_size);
  override(c.train.learning_rate, o.learning_rate);
  override(c.train.features, o.features);
  override(c.train.blocks, o.blocks);
  override(c.sigma_hint, o.sigma_hint);
  if (g.out) c.out = *g.out;
  return c;
}

fs::path out_dir(const Globals& g, const PipelineConfig& c) {
  return g.out ? fs::path(*g.out) : (g.config ? c.out : fs::path("."));
}

EpochCallback progress(const Globals& g) {
  if (g.quiet) return {};
  return [](const EpochLog& e) {
    std::fprintf(stderr, "epoch %d  mean L1 %.6g\n", e.epoch, e.mean_l1);
  };
}

void note(const Globals& g, const std::string& text) {
  if (!g.quiet) std::cerr << text << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperspectral super-resolution through abundance maps"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  Overrides o;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--config", g.config, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--quiet", g.quiet, "Suppress progress output");

  // unmix
  std::string unmix_cube;
  auto* unmix = app.add_subcommand("unmix", "Extract endmembers and abundances");
  unmix->add_option("cube", unmix_cube, "Input cube")->required();
  unmix->add_option("--materials,-m", o.materials, "Number of materials");
  unmix->add_option("--backend", o.backend, "minvol | pca");

  // gen-dl
  std::optional<std::string> dl_source;
  std::string dl_value_mode = "empirical";
  auto* gen_dl = app.add_subcommand("gen-dl", "Generate dead-leaves training pairs");
  gen_dl->add_option("--source", dl_source, "Abundance map for empirical values");
  gen_dl->add_option("--value-mode", dl_value_mode, "empirical | dirichlet");
  gen_dl->add_option("--materials,-m", o.materials, "Number of materials");
  add_generator_flags(gen_dl, o);
  add_degradation_flags(gen_dl, o);

  // degrade
  std::string degrade_in;
  std::string degrade_name = "degraded";
  auto* degrade_cmd = app.add_subcommand("degrade", "Blur and downsample a raster");
  degrade_cmd->add_option("input", degrade_in, "Cube or abundance map")->required();
  degrade_cmd->add_option("--name", degrade_name, "Output stem inside --out");
  add_degradation_flags(degrade_cmd, o);

  // train
  std::string train_dataset;
  std::string train_endmembers;
  auto* train_cmd = app.add_subcommand("train", "Train the super-resolution network");
  train_cmd->add_option("dataset", train_dataset, "Dataset directory")->required();
  train_cmd->add_option("--endmembers", train_endmembers, "Endmember CSV")->required();
  add_training_flags(train_cmd, o);
  add_noise_flags(train_cmd, o);

  // sr
  std::string sr_checkpoint;
  std::string sr_abundance;
  std::string sr_name = "a_sr";
  auto* sr = app.add_subcommand("sr", "Super-resolve an abundance map");
  sr->add_option("checkpoint", sr_checkpoint)->required();
  sr->add_option("abundance", sr_abundance)->required();
  sr->add_option("--sigma-hint", o.sigma_hint, "Noise level fed to the network");
  sr->add_option("--name", sr_name, "Output stem inside --out");

  // reconstruct
  std::string rec_abundance;
  std::string rec_endmembers;
  std::string rec_name = "hsi_sr";
  auto* rec = app.add_subcommand("reconstruct", "Mix abundances with endmembers");
  rec->add_option("abundance", rec_abundance)->required();
  rec->add_option("endmembers", rec_endmembers)->required();
  rec->add_option("--name", rec_name, "Output stem inside --out");

  // eval
  std::string eval_ref;
  std::string eval_test;
  int eval_scale = 2;
  auto* eval = app.add_subcommand("eval", "PSNR, SAM and ERGAS of a cube");
  eval->add_option("reference", eval_ref)->required();
  eval->add_option("test", eval_test)->required();
  eval->add_option("--scale", eval_scale, "Resolution ratio for ERGAS");

  // phantom
  PhantomConfig phantom;
  auto* phantom_cmd = app.add_subcommand("phantom", "Write a synthetic ground truth");
  phantom_cmd->add_option("--height", phantom.height);
  phantom_cmd->add_option("--width", phantom.width);
  phantom_cmd->add_option("--bands", phantom.bands);
  phantom_cmd->add_option("--materials,-m", phantom.materials);
  phantom_cmd->add_option("--scale", phantom.scale);

  // pipeline
  std::optional<std::string> pipe_input;
  std::optional<std::string> pipe_reference;
  auto* pipeline = app.add_subcommand("pipeline", "Run the full chain");
  pipeline->add_option("--input", pipe_input, "HSI_LR cube");
  pipeline->add_option("--reference", pipe_reference, "HSI_HR cube for evaluation");
  pipeline->add_option("--materials,-m", o.materials);
  pipeline->add_option("--backend", o.backend, "minvol");
  pipeline->add_option("--sigma-hint", o.sigma_hint);
  add_generator_flags(pipeline, o);
  add_degradation_flags(pipeline, o);
  add_noise_flags(pipeline, o);
  add_training_flags(pipeline, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    PipelineConfig c = effective_config(g, o);
    const fs::path out = out_dir(g, c);

    if (*unmix) {
      cmd_unmix(unmix_cube, c.materials, c.backend, out);
      note(g, "unmix: wrote " + out.string());
    } else if (*gen_dl) {
      GeneratorConfig gen;
      gen.height = c.dl_height;
      gen.width = c.dl_width;
      gen.materials = c.materials;
      gen.scale_factor = c.scale;
      gen.value_mode = parse_value_mode(dl_value_mode);
      gen.seed = c.seed;
      gen.noisy_fraction = c.noisy_fraction;
      std::optional<fs::path> source;
      if (dl_source) source = *dl_source;
      const DatasetInfo info = cmd_gen_dl(gen, source, c.degradation(),
                                          static_cast<std::size_t>(c.dataset_size), out);
      note(g, "gen-dl: " + std::to_string(info.count) + " pairs in " + out.string());
    } else if (*degrade_cmd) {
      cmd_degrade(degrade_in, c.degradation(), out / degrade_name);
    } else if (*train_cmd) {
      TrainConfig t = c.train;
      t.seed = c.seed;
      cmd_train(train_dataset, train_endmembers, t, c.noise,
                out / "checkpoint", out / "log.jsonl", progress(g));
      note(g, "train: checkpoint in " + (out / "checkpoint").string());
    } else if (*sr) {
      cmd_sr(sr_checkpoint, sr_abundance, c.sigma_hint, out / sr_name);
    } else if (*rec) {
      cmd_reconstruct(rec_abundance, rec_endmembers, out / rec_name);
    } else if (*eval) {
      std::optional<fs::path> report;
      if (g.out) report = out / "report.json";
      const MetricReport r = cmd_eval(eval_ref, eval_test, eval_scale, report);
      std::cout << to_json(r).dump(2) << "\n";
    } else if (*phantom_cmd) {
      phantom.seed = c.seed;
      cmd_phantom(phantom, out);
      note(g, "phantom: wrote " + out.string());
    } else if (*pipeline) {
      if (pipe_input) c.input = *pipe_input;
      if (pipe_reference) c.reference = *pipe_reference;
      const PipelineResult r = cmd_pipeline(c, progress(g));
      if (r.report) {
        nlohmann::ordered_json j = {{"pipeline", to_json(*r.report)},
                                    {"bicubic", to_json(*r.baseline)}};
        std::cout << j.dump(2) << "\n";
      }
      note(g, "pipeline: manifest " + r.manifest_hash);
    }
  } catch (const Error& e) {
    std::cerr << "hsisr: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "hsisr: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
