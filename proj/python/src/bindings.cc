#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hsisr/deadleaves.h"
#include "hsisr/degradation.h"
#include "hsisr/endmembers.h"
#include "hsisr/error.h"
#include "hsisr/io.h"
#include "hsisr/metrics.h"
#include "hsisr/noise.h"
#include "hsisr/phantom.h"
#include "hsisr/pipeline.h"
#include "hsisr/random.h"
#include "hsisr/trainer.h"
#include "hsisr/unmixing.h"
#include "hsisr/checkpoint.h"

namespace py = pybind11;
using namespace hsisr;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <typename Tag>
Raster<Tag> to_raster(const Array& a) {
  if (a.ndim() != 3) throw InvalidArgument("expected a (height, width, channels) array");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  const auto c = static_cast<int>(a.shape(2));
  return Raster<Tag>(h, w, c, std::vector<double>(a.data(), a.data() + a.size()));
}

template <typename Tag>
Array to_array(const Raster<Tag>& r) {
  Array out({r.height(), r.width(), r.channels()});
  std::copy(r.data().begin(), r.data().end(), out.mutable_data());
  return out;
}

py::dict report_dict(const MetricReport& r) {
  py::dict d;
  d["psnr"] = r.psnr;
  d["sam_deg"] = r.sam_deg;
  d["ergas"] = r.ergas;
  d["scale"] = r.scale;
  d["sam_excluded_pixels"] = r.sam_excluded_pixels;
  return d;
}

py::object json_to_python(const nlohmann::ordered_json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_hsisr, m) {
  m.doc() = "Abundance-domain hyperspectral super-resolution";

  static py::exception<Error> base(m, "HsisrError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  m.def("reconstruct",
        [](const Array& a, const Eigen::MatrixXd& s) {
          return to_array(reconstruct(to_raster<AbundanceTag>(a), EndmemberMatrix(s)));
        },
        py::arg("abundances"), py::arg("spectra"), "Linear mixing A S.");

  m.def("pinv", [](const Eigen::MatrixXd& s) { return EndmemberMatrix(s).pinv(); },
        py::arg("spectra"), "Right pseudo-inverse S+ (bands x materials).");

  m.def("estimate_abundances_ls",
        [](const Array& cube, const Eigen::MatrixXd& s) {
          return to_array(estimate_abundances_ls(to_raster<SpectralTag>(cube), EndmemberMatrix(s)));
        },
        py::arg("cube"), py::arg("spectra"));

  m.def("select_pure_pixels",
        [](const Array& cube, int materials) {
          return select_pure_pixels(to_raster<SpectralTag>(cube), materials);
        },
        py::arg("cube"), py::arg("materials"), "Row-major pixel indices in pick order.");

  m.def("extract_endmembers_minvol",
        [](const Array& cube, int materials) {
          return extract_endmembers_minvol(to_raster<SpectralTag>(cube), materials).spectra();
        },
        py::arg("cube"), py::arg("materials") = kDefaultMaterials);

  m.def("decompose_pca",
        [](const Array& cube, int components) {
          const PcaDecomposition d = decompose_pca(to_raster<SpectralTag>(cube), components);
          return py::make_tuple(d.components, to_array(d.coefficients), d.mean_spectrum);
        },
        py::arg("cube"), py::arg("components"),
        "Returns (components, coefficients, mean_spectrum).");

  m.def("gaussian_kernel", &gaussian_kernel, py::arg("sigma"));

  m.def("blur",
        [](const Array& a, double sigma) {
          return to_array(blur(to_raster<AbundanceTag>(a), sigma));
        },
        py::arg("raster"), py::arg("sigma"));

  m.def("degrade",
        [](const Array& a, int scale, std::optional<double> sigma) {
          return to_array(degrade(to_raster<AbundanceTag>(a), DegradationSpec::for_scale(scale, sigma)));
        },
        py::arg("raster"), py::arg("scale"), py::arg("sigma") = py::none(),
        "Gaussian blur then bicubic downsampling by `scale`.");

  m.def("bicubic_upsample",
        [](const Array& a, int scale) {
          return to_array(bicubic_upsample(to_raster<AbundanceTag>(a), scale));
        },
        py::arg("raster"), py::arg("scale"));

  m.def("psnr",
        [](const Array& x, const Array& y, double max_value) {
          return psnr(to_raster<SpectralTag>(x), to_raster<SpectralTag>(y), max_value);
        },
        py::arg("reference"), py::arg("test"), py::arg("max_value") = 1.0);

  m.def("sam",
        [](const Array& x, const Array& y) {
          return sam(to_raster<SpectralTag>(x), to_raster<SpectralTag>(y)).degrees;
        },
        py::arg("reference"), py::arg("test"));

  m.def("ergas",
        [](const Array& x, const Array& y, int scale) {
          return ergas(to_raster<SpectralTag>(x), to_raster<SpectralTag>(y), scale);
        },
        py::arg("reference"), py::arg("test"), py::arg("scale"));

  m.def("evaluate",
        [](const Array& x, const Array& y, int scale) {
          return report_dict(evaluate(to_raster<SpectralTag>(x), to_raster<SpectralTag>(y), scale));
        },
        py::arg("reference"), py::arg("test"), py::arg("scale"));

  m.def("generate_abundance",
        [](int height, int width, int materials, int scale, std::uint64_t seed,
           std::optional<Array> source) {
          GeneratorConfig c;
          c.height = height;
          c.width = width;
          c.materials = materials;
          c.scale_factor = scale;
          c.value_mode = source ? ValueMode::kEmpirical : ValueMode::kDirichlet;
          c.seed = seed;
          const ValueSource values = source
                                         ? ValueSource::empirical(to_raster<AbundanceTag>(*source))
                                         : ValueSource::dirichlet(materials);
          Rng rng = make_rng(seed);
          return to_array(generate_abundance(c, values, rng));
        },
        py::arg("height"), py::arg("width"), py::arg("materials"), py::arg("scale") = 2,
        py::arg("seed") = 0, py::arg("source") = py::none(),
        "Dead-leaves abundance map; Dirichlet values unless `source` is given.");

  m.def("sample_sigma",
        [](double sigma_max, double lambda, std::size_t count, std::uint64_t seed) {
          NoiseConfig c;
          c.sigma_max = sigma_max;
          c.lambda = lambda;
          c.validate();
          Rng rng = make_rng(seed);
          std::vector<double> out(count);
          for (double& v : out) v = sample_sigma(c, rng);
          return out;
        },
        py::arg("sigma_max") = 1e-3, py::arg("lam") = 2e3, py::arg("count") = 1,
        py::arg("seed") = 0);

  m.def("make_phantom",
        [](int height, int width, int bands, int materials, int scale, std::uint64_t seed) {
          PhantomConfig c{height, width, bands, materials, scale, seed};
          const Phantom p = make_phantom(c);
          py::dict d;
          d["hsi_hr"] = to_array(p.hsi_hr);
          d["hsi_lr"] = to_array(p.hsi_lr);
          d["a_hr"] = to_array(p.a_hr);
          d["spectra"] = p.spectra.spectra();
          d["pure_pixels"] = p.pure_pixels;
          return d;
        },
        py::arg("height") = 64, py::arg("width") = 64, py::arg("bands") = 30,
        py::arg("materials") = 4, py::arg("scale") = 2, py::arg("seed") = 0);

  m.def("super_resolve",
        [](const std::filesystem::path& checkpoint, const Array& a_lr, double sigma_hint) {
          const Checkpoint ck = load_checkpoint(checkpoint);
          return to_array(super_resolve(ck.params, to_raster<AbundanceTag>(a_lr), sigma_hint, ck.scale));
        },
        py::arg("checkpoint"), py::arg("a_lr"), py::arg("sigma_hint") = 0.0);

  m.def("load_cube", [](const std::filesystem::path& p) { return to_array(load_cube(p)); },
        py::arg("path"));
  m.def("save_cube",
        [](const Array& a, const std::filesystem::path& p) { save_cube(to_raster<SpectralTag>(a), p); },
        py::arg("cube"), py::arg("path"));
  m.def("load_abundance", [](const std::filesystem::path& p) { return to_array(load_abundance(p)); },
        py::arg("path"));
  m.def("save_abundance",
        [](const Array& a, const std::filesystem::path& p) {
          save_abundance(to_raster<AbundanceTag>(a), p);
        },
        py::arg("abundances"), py::arg("path"));

  m.def("run_pipeline",
        [](const std::string& config_json) {
          const PipelineConfig c =
              pipeline_config_from_json(nlohmann::ordered_json::parse(config_json));
          PipelineResult r;
          {
            py::gil_scoped_release release;
            r = run_pipeline(c);
          }
          py::dict d;
          d["manifest"] = json_to_python(r.manifest);
          d["manifest_hash"] = r.manifest_hash;
          if (r.report) d["report"] = report_dict(*r.report);
          if (r.baseline) d["baseline"] = report_dict(*r.baseline);
          return d;
        },
        py::arg("config_json"),
        "Runs the full chain from a JSON configuration string (same schema as the "
        "command-line --config file).");
}
