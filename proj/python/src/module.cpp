#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bigset/errors.hpp"
#include "bigset/evaluation.hpp"
#include "bigset/hsi_io.hpp"
#include "bigset/log_regularizer.hpp"
#include "bigset/stats_rx.hpp"
#include "bigset/synth.hpp"
#include "bigset/thresholding.hpp"
#include "bigset/trainer.hpp"

namespace py = pybind11;
using namespace bigset;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

// Python sees cubes as (H, W, L); the library stores band-sequential.
HsiCube to_cube(const DoubleArray& a) {
    if (a.ndim() != 3) throw std::invalid_argument("cube must be a 3-D array of shape (H, W, L)");
    const auto h = static_cast<std::size_t>(a.shape(0)), w = static_cast<std::size_t>(a.shape(1)),
               l = static_cast<std::size_t>(a.shape(2));
    std::vector<double> data(h * w * l);
    const double* src = a.data();
    for (std::size_t p = 0; p < h * w; ++p)
        for (std::size_t b = 0; b < l; ++b) data[b * h * w + p] = src[p * l + b];
    return HsiCube(h, w, l, std::move(data));
}

py::array_t<double> from_cube(const HsiCube& cube) {
    py::array_t<double> out({cube.height(), cube.width(), cube.bands()});
    double* dst = out.mutable_data();
    const std::size_t n = cube.pixels(), l = cube.bands();
    for (std::size_t b = 0; b < l; ++b) {
        const auto band = cube.band(b);
        for (std::size_t p = 0; p < n; ++p) dst[p * l + b] = band[p];
    }
    return out;
}

template <class G>
G to_grid(const py::array& a) {
    using T = typename G::value_type;
    auto typed = py::array_t<T, py::array::c_style | py::array::forcecast>::ensure(a);
    if (!typed || typed.ndim() != 2) throw std::invalid_argument("expected a 2-D array of shape (H, W)");
    const auto h = static_cast<std::size_t>(typed.shape(0)), w = static_cast<std::size_t>(typed.shape(1));
    return G(h, w, std::vector<T>(typed.data(), typed.data() + h * w));
}

template <class G>
py::array_t<typename G::value_type> from_grid(const G& g) {
    py::array_t<typename G::value_type> out({g.height(), g.width()});
    std::copy(g.values().begin(), g.values().end(), out.mutable_data());
    return out;
}

py::dict tau_dict(const TauEstimate& e) {
    py::dict d;
    d["tau"] = e.tau;
    d["corner_bin"] = e.corner_bin;
    d["corner_value"] = e.corner_value;
    d["gamma"] = e.gamma;
    d["counts"] = e.histogram.counts;
    return d;
}

py::dict result_dict(const TrainResult& r) {
    py::dict d;
    d["detection"] = from_grid(r.detection);
    py::list masks;
    for (const BinaryMask& m : r.masks) masks.append(from_grid(m));
    d["masks"] = masks;
    py::array_t<double> losses({r.losses.size(), std::size_t{4}});
    double* l = losses.mutable_data();
    for (std::size_t i = 0; i < r.losses.size(); ++i) {
        l[4 * i] = static_cast<double>(r.losses[i].epoch);
        l[4 * i + 1] = r.losses[i].loss.background;
        l[4 * i + 2] = r.losses[i].loss.suppression;
        l[4 * i + 3] = r.losses[i].loss.total;
    }
    d["losses"] = losses;  // columns: epoch, l_br, l_as, total
    py::array_t<double> aucs({r.aucs.size(), std::size_t{2}});
    double* a = aucs.mutable_data();
    for (std::size_t i = 0; i < r.aucs.size(); ++i) {
        a[2 * i] = static_cast<double>(r.aucs[i].epoch);
        a[2 * i + 1] = r.aucs[i].auc;
    }
    d["aucs"] = aucs;  // columns: epoch, auc
    d["tau"] = r.tau;
    d["tau_estimate"] = r.tau_estimate ? py::object(tau_dict(*r.tau_estimate)) : py::object(py::none());
    return d;
}

TrainConfig make_config(double lambda, double gamma, std::size_t iterations, std::size_t epochs, double lr,
                        std::uint64_t seed, std::size_t hidden, std::size_t bins, bool normalize,
                        std::optional<double> tau_override, std::size_t auc_interval) {
    TrainConfig cfg;
    cfg.lambda = lambda;
    cfg.gamma = gamma;
    cfg.iterations = iterations;
    cfg.epochs_per_iter = epochs;
    cfg.learning_rate = lr;
    cfg.seed = seed;
    cfg.hidden = hidden;
    cfg.bins = bins;
    cfg.normalize = normalize;
    cfg.tau_override = tau_override;
    cfg.auc_interval = auc_interval;
    return cfg;
}

py::dict run_training(const DoubleArray& cube, const TrainConfig& cfg, const std::optional<py::array>& gt,
                      bool plain) {
    const HsiCube x = to_cube(cube);
    std::optional<GroundTruth> truth;
    if (gt) truth = to_grid<GroundTruth>(*gt);
    const TrainOptions options{truth ? &*truth : nullptr};
    TrainResult r;
    {
        py::gil_scoped_release release;
        r = plain ? train_plain(x, cfg, options) : train(x, cfg, options);
    }
    return result_dict(r);
}

}  // namespace

PYBIND11_MODULE(_bigset, m) {
    m.doc() = "Hyperspectral anomaly detection with mask-guided separation training";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto data_error = py::register_exception<DataError>(m, "DataError", base.ptr());
    auto numeric_error = py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<ThresholdError>(m, "ThresholdError", numeric_error.ptr());
    (void)data_error;

    m.def(
        "synth_scene",
        [](std::size_t height, std::size_t width, std::size_t bands, std::size_t anomalies, double contrast,
           double noise, std::uint64_t seed, std::optional<std::vector<double>> means,
           std::optional<std::vector<double>> scales) {
            SynthConfig cfg;
            cfg.height = height;
            cfg.width = width;
            cfg.bands = bands;
            cfg.anomalies = anomalies;
            cfg.contrast = contrast;
            cfg.noise_std = noise;
            cfg.seed = seed;
            if (means) cfg.component_means = *means;
            if (scales) cfg.component_scales = *scales;
            const SynthScene s = synth_scene(cfg);
            return py::make_tuple(from_cube(s.cube), from_grid(s.truth));
        },
        py::arg("height") = 30, py::arg("width") = 30, py::arg("bands") = 20, py::arg("anomalies") = 9,
        py::arg("contrast") = 5.0, py::arg("noise") = 0.01, py::arg("seed") = 1, py::arg("means") = py::none(),
        py::arg("scales") = py::none(), "Seeded synthetic scene as (cube[H, W, L], truth[H, W]).");

    m.def(
        "rx_detect", [](const DoubleArray& cube) { return from_grid(rx_detect(to_cube(cube))); }, py::arg("cube"),
        "Global RX scores (squared Mahalanobis distance) per pixel.");

    m.def(
        "estimate_tau",
        [](const DoubleArray& cube, double gamma, std::size_t bins) {
            return tau_dict(estimate_tau(to_cube(cube), gamma, bins));
        },
        py::arg("cube"), py::arg("gamma") = kDefaultGamma, py::arg("bins") = kDefaultBins,
        "Proportion threshold from the corner of the gamma-transformed RX histogram.");

    m.def(
        "log_conv", [](const DoubleArray& cube) { return from_cube(log_conv(to_cube(cube))); }, py::arg("cube"),
        "Per-band 5x5 LoG response with reflect padding.");

    m.def(
        "update_mask",
        [](const py::array& errors, double tau) { return from_grid(update_mask(to_grid<ErrorMap>(errors), tau)); },
        py::arg("errors"), py::arg("tau"), "Flags pixels whose error exceeds the ceil(tau N)-th smallest.");

    m.def(
        "auc",
        [](const py::array& scores, const py::array& gt) {
            return auc(to_grid<ErrorMap>(scores), to_grid<GroundTruth>(gt));
        },
        py::arg("scores"), py::arg("gt"), "Area under the ROC curve.");

    m.def(
        "roc_curve",
        [](const py::array& scores, const py::array& gt) {
            const RocCurve c = roc_curve(to_grid<ErrorMap>(scores), to_grid<GroundTruth>(gt));
            std::vector<double> pf, pd;
            for (const RocPoint& p : c.points) {
                pf.push_back(p.p_f);
                pd.push_back(p.p_d);
            }
            return py::make_tuple(py::array(py::cast(pf)), py::array(py::cast(pd)));
        },
        py::arg("scores"), py::arg("gt"), "ROC curve as (p_f, p_d) arrays.");

    m.def(
        "train",
        [](const DoubleArray& cube, double lambda, double gamma, std::size_t iterations, std::size_t epochs,
           double lr, std::uint64_t seed, std::size_t hidden, std::size_t bins, bool normalize,
           std::optional<double> tau_override, std::optional<py::array> gt, std::size_t auc_interval) {
            return run_training(cube,
                                make_config(lambda, gamma, iterations, epochs, lr, seed, hidden, bins, normalize,
                                            tau_override, auc_interval),
                                gt, false);
        },
        py::arg("cube"), py::arg("lambda_") = 1e-4, py::arg("gamma") = kDefaultGamma, py::arg("iterations") = 5,
        py::arg("epochs") = 150, py::arg("lr") = 1e-3, py::arg("seed") = 0, py::arg("hidden") = kDefaultHidden,
        py::arg("bins") = kDefaultBins, py::arg("normalize") = true, py::arg("tau_override") = py::none(),
        py::arg("gt") = py::none(), py::arg("auc_interval") = 10,
        "Mask-guided separation training; returns detection, masks, traces and tau.");

    m.def(
        "train_plain",
        [](const DoubleArray& cube, std::size_t epochs, double lr, std::uint64_t seed, std::size_t hidden,
           bool normalize, std::optional<py::array> gt, std::size_t auc_interval) {
            TrainConfig cfg = make_config(0.0, kDefaultGamma, 1, epochs, lr, seed, hidden, kDefaultBins, normalize,
                                          std::nullopt, auc_interval);
            return run_training(cube, cfg, gt, true);
        },
        py::arg("cube"), py::arg("epochs") = 150, py::arg("lr") = 1e-3, py::arg("seed") = 0,
        py::arg("hidden") = kDefaultHidden, py::arg("normalize") = true, py::arg("gt") = py::none(),
        py::arg("auc_interval") = 10, "Plain reconstruction training without the mask.");

    m.def(
        "load_raw", [](const std::string& path) { return from_cube(load_raw(path)); }, py::arg("path"));
    m.def(
        "save_raw", [](const std::string& path, const DoubleArray& cube) { save_raw(to_cube(cube), path); },
        py::arg("path"), py::arg("cube"));
    m.def(
        "load_envi", [](const std::string& header) { return from_cube(load_envi(header)); }, py::arg("header"));
}
