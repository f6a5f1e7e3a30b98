#include "hsisr/commands.h"

#include <string>

#include "json.hpp"

#include "hsisr/checkpoint.h"
#include "hsisr/endmembers.h"
#include "hsisr/error.h"
#include "hsisr/io.h"

namespace hsisr {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void check_materials(int materials) {
  if (materials < 1) {
    throw InvalidArgument("--materials must be >= 1, got " + std::to_string(materials));
  }
}

}  // namespace

void cmd_unmix(const fs::path& cube_path, int materials, UnmixingBackend backend,
               const fs::path& out_dir) {
  check_materials(materials);
  const SpectralCube cube = load_cube(cube_path);
  ordered_json manifest;
  manifest["backend"] = std::string(to_string(backend));
  manifest["materials"] = materials;
  manifest["bands"] = cube.channels();
  manifest["input"] = header_path(cube_path).generic_string();

  if (backend == UnmixingBackend::kMinVol) {
    const std::vector<std::size_t> picks = select_pure_pixels(cube, materials);
    Eigen::MatrixXd spectra(materials, cube.channels());
    for (int m = 0; m < materials; ++m) {
      const auto px = cube.pixel(picks[m]);
      for (int l = 0; l < cube.channels(); ++l) spectra(m, l) = px[l];
    }
    const EndmemberMatrix s(spectra);
    save_endmembers(s, out_dir / "endmembers.csv");
    save_matrix_csv(s.pinv(), out_dir / "pinv.csv");
    save_abundance(estimate_abundances_ls(cube, s), out_dir / "a_lr");
    ordered_json pixels = ordered_json::array();
    for (std::size_t p : picks) {
      pixels.push_back({p / static_cast<std::size_t>(cube.width()),
                        p % static_cast<std::size_t>(cube.width())});
    }
    manifest["pure_pixels"] = pixels;
    manifest["files"] = {{"endmembers", "endmembers.csv"},
                         {"pinv", "pinv.csv"},
                         {"abundances", "a_lr"}};
  } else {
    const PcaDecomposition pca = decompose_pca(cube, materials);
    save_matrix_csv(pca.components, out_dir / "components.csv");
    save_abundance(pca.coefficients, out_dir / "coefficients");
    save_matrix_csv(pca.mean_spectrum.transpose(), out_dir / "mean.csv");
    manifest["files"] = {{"components", "components.csv"},
                         {"coefficients", "coefficients"},
                         {"mean", "mean.csv"}};
  }
  write_text_file(out_dir / "unmix.json", manifest.dump(2) + "\n");
}

DatasetInfo cmd_gen_dl(const GeneratorConfig& config,
                       const std::optional<fs::path>& source,
                       const DegradationSpec& spec, std::size_t count,
                       const fs::path& out_dir) {
  if (config.value_mode == ValueMode::kEmpirical) {
    if (!source) throw InvalidArgument("empirical value mode needs --source");
    AbundanceMap map = load_abundance(*source);
    if (map.channels() != config.materials) {
      throw InvalidArgument("source map has " + std::to_string(map.channels()) +
                            " channels but --materials is " +
                            std::to_string(config.materials));
    }
    return generate_dataset(config, ValueSource::empirical(std::move(map)), spec,
                            count, out_dir);
  }
  return generate_dataset(config, ValueSource::dirichlet(config.materials), spec,
                          count, out_dir);
}

void cmd_degrade(const fs::path& in, const DegradationSpec& spec,
                 const fs::path& out) {
  const RasterHeader header = read_raster_header(in);
  check_degradable(header.height, header.width, spec);
  if (header.channel_key == "bands") {
    save_cube(degrade(load_cube(in), spec), out);
  } else {
    save_abundance(degrade(load_abundance(in), spec), out);
  }
}

std::vector<EpochLog> cmd_train(const fs::path& dataset_dir,
                                const fs::path& endmembers,
                                const TrainConfig& train_config,
                                const NoiseConfig& noise_config,
                                const fs::path& checkpoint,
                                const std::optional<fs::path>& log,
                                const EpochCallback& on_epoch) {
  train_config.validate();
  noise_config.validate();
  const EndmemberMatrix s = load_endmembers(endmembers);
  const Dataset dataset = load_dataset(dataset_dir);
  TrainResult result = train(dataset, train_config, noise_config, s.pinv(), on_epoch);
  save_checkpoint(Checkpoint{std::move(result.params), dataset.degradation.scale,
                             train_config, noise_config},
                  checkpoint);
  if (log) save_training_log(result.log, *log);
  return result.log;
}

void cmd_sr(const fs::path& checkpoint, const fs::path& abundance, double sigma,
            const fs::path& out) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  const AbundanceMap a = load_abundance(abundance);
  save_abundance(super_resolve(ck.params, a, sigma, ck.scale), out);
}

void cmd_reconstruct(const fs::path& abundance, const fs::path& endmembers,
                     const fs::path& out) {
  const AbundanceMap a = load_abundance(abundance);
  const EndmemberMatrix s = load_endmembers(endmembers);
  save_cube(reconstruct(a, s), out);
}

MetricReport cmd_eval(const fs::path& reference, const fs::path& test, int scale,
                      const std::optional<fs::path>& out) {
  const SpectralCube x = load_cube(reference);
  const SpectralCube y = load_cube(test);
  const MetricReport report = evaluate(x, y, scale);
  if (out) write_text_file(*out, to_json(report).dump(2) + "\n");
  return report;
}

Phantom cmd_phantom(const PhantomConfig& config, const fs::path& out_dir) {
  Phantom phantom = make_phantom(config);
  save_phantom(phantom, out_dir);
  return phantom;
}

PipelineResult cmd_pipeline(const PipelineConfig& config,
                            const EpochCallback& on_epoch) {
  return run_pipeline(config, on_epoch);
}

}  // namespace hsisr
