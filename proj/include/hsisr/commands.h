#ifndef HSISR_COMMANDS_H_
#define HSISR_COMMANDS_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "hsisr/deadleaves.h"
#include "hsisr/degradation.h"
#include "hsisr/metrics.h"
#include "hsisr/noise.h"
#include "hsisr/phantom.h"
#include "hsisr/pipeline.h"
#include "hsisr/trainer.h"
#include "hsisr/unmixing.h"

// File-level entry points behind the hsisr command-line tool. Each one reads
// and validates its inputs, delegates to the library and writes its outputs.
namespace hsisr {

// minvol: endmembers.csv (M x L), pinv.csv (L x M), a_lr.{json,raw} and an
// unmix.json manifest. pca: components.csv, coefficients.{json,raw},
// mean.csv and unmix.json.
void cmd_unmix(const std::filesystem::path& cube, int materials,
               UnmixingBackend backend, const std::filesystem::path& out_dir);

// `source` is the abundance map for empirical values; ignored for Dirichlet.
DatasetInfo cmd_gen_dl(const GeneratorConfig& config,
                       const std::optional<std::filesystem::path>& source,
                       const DegradationSpec& spec, std::size_t count,
                       const std::filesystem::path& out_dir);

// Degrades a cube ("bands" header) or an abundance map ("channels" header).
void cmd_degrade(const std::filesystem::path& in, const DegradationSpec& spec,
                 const std::filesystem::path& out);

// `endmembers` supplies S+ for the noise model. Writes <checkpoint>.{json,raw}
// and, when `log` is given, the JSON-lines training log.
std::vector<EpochLog> cmd_train(const std::filesystem::path& dataset_dir,
                                const std::filesystem::path& endmembers,
                                const TrainConfig& train_config,
                                const NoiseConfig& noise_config,
                                const std::filesystem::path& checkpoint,
                                const std::optional<std::filesystem::path>& log,
                                const EpochCallback& on_epoch = {});

void cmd_sr(const std::filesystem::path& checkpoint,
            const std::filesystem::path& abundance, double sigma,
            const std::filesystem::path& out);

void cmd_reconstruct(const std::filesystem::path& abundance,
                     const std::filesystem::path& endmembers,
                     const std::filesystem::path& out);

// Writes the report to `out` when given.
MetricReport cmd_eval(const std::filesystem::path& reference,
                      const std::filesystem::path& test, int scale,
                      const std::optional<std::filesystem::path>& out);

Phantom cmd_phantom(const PhantomConfig& config,
                    const std::filesystem::path& out_dir);

PipelineResult cmd_pipeline(const PipelineConfig& config,
                            const EpochCallback& on_epoch = {});

}  // namespace hsisr

#endif  // HSISR_COMMANDS_H_
