#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "segerr/bench.hpp"
#include "segerr/boundary.hpp"
#include "segerr/bsa.hpp"
#include "segerr/components.hpp"
#include "segerr/errors.hpp"
#include "segerr/io.hpp"
#include "segerr/metrics.hpp"
#include "segerr/spatial.hpp"
#include "segerr/synth.hpp"
#include "segerr/types.hpp"

namespace py = pybind11;
using namespace segerr;

namespace {

PointCloud cloud_from_numpy(
    const py::array_t<float, py::array::c_style | py::array::forcecast>& positions,
    const std::optional<py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>>& colors,
    const std::optional<py::array_t<float, py::array::c_style | py::array::forcecast>>& normals) {
  if (positions.ndim() != 2 || positions.shape(1) != 3) {
    throw ValidationError("positions must be an (N, 3) float array");
  }
  const auto n = static_cast<std::size_t>(positions.shape(0));
  PointCloud cloud;
  cloud.positions.resize(n);
  const auto pos = positions.unchecked<2>();
  for (std::size_t i = 0; i < n; ++i) {
    cloud.positions[i] = {pos(i, 0), pos(i, 1), pos(i, 2)};
  }
  if (colors) {
    if (colors->ndim() != 2 || static_cast<std::size_t>(colors->shape(0)) != n ||
        colors->shape(1) != 3) {
      throw ValidationError("colors must be an (N, 3) uint8 array");
    }
    const auto col = colors->unchecked<2>();
    cloud.colors.emplace(n);
    for (std::size_t i = 0; i < n; ++i) {
      (*cloud.colors)[i] = {col(i, 0), col(i, 1), col(i, 2)};
    }
  }
  if (normals) {
    if (normals->ndim() != 2 || static_cast<std::size_t>(normals->shape(0)) != n ||
        normals->shape(1) != 3) {
      throw ValidationError("normals must be an (N, 3) float array");
    }
    const auto nrm = normals->unchecked<2>();
    cloud.normals.emplace(n);
    for (std::size_t i = 0; i < n; ++i) {
      (*cloud.normals)[i] = {nrm(i, 0), nrm(i, 1), nrm(i, 2)};
    }
  }
  return cloud;
}

py::array_t<float> positions_to_numpy(const PointCloud& cloud) {
  py::array_t<float> out({static_cast<py::ssize_t>(cloud.count()), py::ssize_t{3}});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < cloud.count(); ++i) {
    view(i, 0) = cloud.positions[i][0];
    view(i, 1) = cloud.positions[i][1];
    view(i, 2) = cloud.positions[i][2];
  }
  return out;
}

LabelField labels_from_numpy(
    const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& labels,
    std::int32_t ignore_label) {
  if (labels.ndim() != 1) throw ValidationError("labels must be a 1-D int32 array");
  LabelField field;
  field.ignore_label = ignore_label;
  field.labels.assign(labels.data(), labels.data() + labels.shape(0));
  return field;
}

py::array_t<std::int32_t> labels_to_numpy(const LabelField& field) {
  py::array_t<std::int32_t> out(static_cast<py::ssize_t>(field.count()));
  std::copy(field.labels.begin(), field.labels.end(), out.mutable_data());
  return out;
}

py::array_t<bool> mask_to_numpy(const BoundaryMask& mask) {
  py::array_t<bool> out(static_cast<py::ssize_t>(mask.count()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < mask.count(); ++i) view(i) = mask.flags[i] != 0;
  return out;
}

std::vector<std::uint8_t> bools_from_numpy(
    const py::array_t<bool, py::array::c_style | py::array::forcecast>& array,
    const char* what) {
  if (array.ndim() != 1) {
    throw ValidationError(std::string(what) + " must be a 1-D bool array");
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(array.shape(0)));
  const auto view = array.unchecked<1>();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = view(i) ? 1 : 0;
  return out;
}

EvalConfig config_from_kwargs(double radius_m, double iou_threshold,
                              int min_component_size, int num_classes,
                              std::int32_t ignore_label,
                              const std::string& derr_samples) {
  EvalConfig cfg;
  cfg.radius_m = radius_m;
  cfg.iou_threshold = iou_threshold;
  cfg.min_component_size = min_component_size;
  cfg.num_classes = num_classes;
  cfg.ignore_label = ignore_label;
  if (derr_samples == "class") {
    cfg.derr_samples = DerrSamples::kClassMask;
  } else if (derr_samples == "component") {
    cfg.derr_samples = DerrSamples::kComponent;
  } else {
    throw ValidationError("derr_samples must be 'class' or 'component'");
  }
  return cfg;
}

ClassGroups groups_from_dict(const py::dict& dict) {
  ClassGroups groups;
  for (const auto& item : dict) {
    const auto name = item.first.cast<std::string>();
    auto ids = item.second.cast<std::vector<std::int32_t>>();
    std::sort(ids.begin(), ids.end());
    groups.groups.emplace(name, std::move(ids));
  }
  return groups;
}

py::object opt_to_py(const std::optional<double>& value) {
  if (!value) return py::none();
  return py::float_(*value);
}

py::dict report_to_dict(const MetricsReport& report) {
  py::dict out;
  out["num_classes"] = report.num_classes;
  out["radius_m"] = report.radius_m;
  out["iou_threshold"] = report.iou_threshold;
  out["num_scenes"] = report.num_scenes;
  py::list per_class;
  for (const auto& iou : report.per_class_iou) per_class.append(opt_to_py(iou));
  out["per_class_iou"] = per_class;
  out["miou"] = opt_to_py(report.miou);
  out["macc"] = opt_to_py(report.macc);
  out["oacc"] = opt_to_py(report.oacc);
  py::dict group_iou;
  for (const auto& [name, value] : report.group_iou) {
    group_iou[py::str(name)] = opt_to_py(value);
  }
  out["group_iou"] = group_iou;
  out["ferr"] = opt_to_py(report.ferr);
  out["merr"] = opt_to_py(report.merr);
  out["rerr"] = opt_to_py(report.rerr);
  out["derr"] = opt_to_py(report.derr);
  return out;
}

segerr::bsa::AffineMap affine_from_pair(const Eigen::MatrixXd& weight,
                                        const Eigen::VectorXd& bias) {
  return segerr::bsa::AffineMap{weight, bias};
}

}  // namespace

using segerr::bsa::AffineStack;
using segerr::bsa::AttentionQueues;

PYBIND11_MODULE(_segerr, m) {
  m.doc() = "Point-cloud segmentation error analysis: boundary pseudo-labels, "
            "error taxonomy metrics, synthetic scenes, and attention/loss kernels";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init(&cloud_from_numpy), py::arg("positions"),
           py::arg("colors") = py::none(), py::arg("normals") = py::none())
      .def_property_readonly("positions", &positions_to_numpy)
      .def_property_readonly("count", &PointCloud::count)
      .def("__len__", &PointCloud::count);

  py::class_<LabelField>(m, "LabelField")
      .def(py::init(&labels_from_numpy), py::arg("labels"),
           py::arg("ignore_label") = -1)
      .def_property_readonly("labels", &labels_to_numpy)
      .def_readonly("ignore_label", &LabelField::ignore_label)
      .def("__len__", &LabelField::count);

  py::class_<Component>(m, "Component")
      .def_readonly("label", &Component::label)
      .def_property_readonly("point_indices",
                             [](const Component& c) {
                               py::array_t<std::uint32_t> out(
                                   static_cast<py::ssize_t>(c.size()));
                               std::copy(c.point_indices.begin(), c.point_indices.end(),
                                         out.mutable_data());
                               return out;
                             })
      .def_property_readonly("size", &Component::size);

  py::class_<SpatialGrid>(m, "SpatialGrid")
      .def_property_readonly("cell_size", &SpatialGrid::cell_size)
      .def_property_readonly("occupied_cells", &SpatialGrid::occupied_cell_count)
      .def_property_readonly("point_count", &SpatialGrid::point_count);

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_property_readonly("miou", [](const MetricsReport& r) { return opt_to_py(r.miou); })
      .def_property_readonly("macc", [](const MetricsReport& r) { return opt_to_py(r.macc); })
      .def_property_readonly("oacc", [](const MetricsReport& r) { return opt_to_py(r.oacc); })
      .def_property_readonly("ferr", [](const MetricsReport& r) { return opt_to_py(r.ferr); })
      .def_property_readonly("merr", [](const MetricsReport& r) { return opt_to_py(r.merr); })
      .def_property_readonly("rerr", [](const MetricsReport& r) { return opt_to_py(r.rerr); })
      .def_property_readonly("derr", [](const MetricsReport& r) { return opt_to_py(r.derr); })
      .def("to_dict", &report_to_dict)
      .def("to_json", &io::report_to_json);

  m.def("build_grid", &build_grid, py::arg("cloud"), py::arg("cell_size"));
  m.def(
      "radius_neighbors",
      [](const SpatialGrid& grid, const PointCloud& cloud, std::uint32_t index,
         double r) {
        const auto neighbors = radius_neighbors(grid, cloud, index, r);
        py::array_t<std::uint32_t> out(static_cast<py::ssize_t>(neighbors.size()));
        std::copy(neighbors.begin(), neighbors.end(), out.mutable_data());
        return out;
      },
      py::arg("grid"), py::arg("cloud"), py::arg("index"), py::arg("radius"));
  m.def(
      "brute_force_neighbors",
      [](const PointCloud& cloud, std::uint32_t index, double r) {
        const auto neighbors = brute_force_neighbors(cloud, index, r);
        py::array_t<std::uint32_t> out(static_cast<py::ssize_t>(neighbors.size()));
        std::copy(neighbors.begin(), neighbors.end(), out.mutable_data());
        return out;
      },
      py::arg("cloud"), py::arg("index"), py::arg("radius"));

  m.def(
      "compute_boundary_mask",
      [](const PointCloud& cloud, const LabelField& labels, double r, int workers) {
        return mask_to_numpy(compute_boundary_mask(cloud, labels, r, workers));
      },
      py::arg("cloud"), py::arg("labels"), py::arg("radius"), py::arg("workers") = 0);
  m.def(
      "compute_boundary_mask_brute",
      [](const PointCloud& cloud, const LabelField& labels, double r, int workers) {
        return mask_to_numpy(compute_boundary_mask_brute(cloud, labels, r, workers));
      },
      py::arg("cloud"), py::arg("labels"), py::arg("radius"), py::arg("workers") = 0);
  m.def(
      "binary_boundary_zone",
      [](const PointCloud& cloud, const py::array_t<bool>& mask,
         const py::array_t<bool>& valid, double r, int workers) {
        return mask_to_numpy(binary_boundary_zone(cloud, bools_from_numpy(mask, "mask"),
                                                  bools_from_numpy(valid, "valid"), r,
                                                  workers));
      },
      py::arg("cloud"), py::arg("mask"), py::arg("valid"), py::arg("radius"),
      py::arg("workers") = 0);

  m.def(
      "extract_components",
      [](const PointCloud& cloud, const LabelField& labels, double r) {
        return extract_components(cloud, labels, r);
      },
      py::arg("cloud"), py::arg("labels"), py::arg("radius"));
  m.def("plurality_predicted_label", &plurality_predicted_label, py::arg("component"),
        py::arg("pred"));

  m.def("make_config", &config_from_kwargs, py::arg("radius_m") = 0.06,
        py::arg("iou_threshold") = 0.5, py::arg("min_component_size") = 50,
        py::arg("num_classes") = 1, py::arg("ignore_label") = -1,
        py::arg("derr_samples") = "class");

  m.def(
      "evaluate_scene",
      [](const PointCloud& cloud, const LabelField& gt, const LabelField& pred,
         const EvalConfig& cfg, const py::dict& groups, int workers) {
        return evaluate_scene(cloud, gt, pred, cfg, groups_from_dict(groups), workers);
      },
      py::arg("cloud"), py::arg("gt"), py::arg("pred"), py::arg("config"),
      py::arg("groups") = py::dict(), py::arg("workers") = 0);
  m.def("aggregate", &aggregate, py::arg("reports"));
  py::class_<EvalConfig>(m, "EvalConfig")
      .def_readonly("radius_m", &EvalConfig::radius_m)
      .def_readonly("iou_threshold", &EvalConfig::iou_threshold)
      .def_readonly("num_classes", &EvalConfig::num_classes);

  m.def(
      "generate_scene",
      [](const std::string& spec_json) {
        const Scene scene = generate_scene(io::scene_spec_from_json(spec_json));
        return py::make_tuple(scene.cloud, scene.labels);
      },
      py::arg("spec_json"));
  m.def(
      "corrupt_labels",
      [](const LabelField& gt, const PointCloud& cloud, const std::string& mode,
         double magnitude, std::uint64_t seed) {
        return corrupt_labels(gt, cloud, parse_corrupt_mode(mode), magnitude, seed);
      },
      py::arg("gt"), py::arg("cloud"), py::arg("mode"), py::arg("magnitude"),
      py::arg("seed"));

  m.def(
      "read_scene",
      [](const std::string& path) {
        auto [cloud, labels] = io::read_scene(path);
        return py::make_tuple(std::move(cloud), std::move(labels));
      },
      py::arg("path"));
  m.def(
      "write_scene",
      [](const std::string& path, const PointCloud& cloud, const LabelField& labels,
         const std::string& format) {
        io::PlyFormat fmt;
        if (format == "binary") {
          fmt = io::PlyFormat::kBinaryLittleEndian;
        } else if (format == "ascii") {
          fmt = io::PlyFormat::kAscii;
        } else {
          throw ValidationError("format must be 'binary' or 'ascii'");
        }
        io::write_scene(path, cloud, labels, fmt);
      },
      py::arg("path"), py::arg("cloud"), py::arg("labels"),
      py::arg("format") = "binary");
  m.def("write_report", &io::write_report, py::arg("path"), py::arg("report"));
  m.def("read_report", &io::read_report, py::arg("path"));

  // attention / loss kernels
  py::class_<AffineStack>(m, "AffineStack")
      .def(py::init([](const std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>& layers) {
             AffineStack stack;
             for (const auto& [weight, bias] : layers) {
               stack.layers.push_back(affine_from_pair(weight, bias));
             }
             return stack;
           }),
           py::arg("layers"))
      .def_property_readonly("input_dim", &AffineStack::input_dim)
      .def_property_readonly("output_dim", &AffineStack::output_dim);
  m.def("affine_apply", &segerr::bsa::apply, py::arg("stack"), py::arg("features"));
  m.def("make_random_stack", &segerr::bsa::make_random_stack, py::arg("dims"),
        py::arg("seed"));
  m.def(
      "split_queues",
      [](const Eigen::MatrixXd& features, const AffineStack& map) {
        const AttentionQueues queues = segerr::bsa::split_queues(features, map);
        return py::make_tuple(queues.q, queues.k, queues.v);
      },
      py::arg("features"), py::arg("map"));
  m.def(
      "fused_attention",
      [](const Eigen::MatrixXd& boundary_q, const Eigen::MatrixXd& q,
         const Eigen::MatrixXd& k, const Eigen::MatrixXd& v, const AffineStack& fuse) {
        return segerr::bsa::fused_attention(boundary_q, AttentionQueues{q, k, v}, fuse);
      },
      py::arg("boundary_q"), py::arg("semantic_q"), py::arg("semantic_k"),
      py::arg("semantic_v"), py::arg("fuse"));
  m.def("dice_term", &segerr::bsa::dice_term, py::arg("pred"), py::arg("target"));
  m.def("semantic_loss", &segerr::bsa::semantic_loss, py::arg("pred"), py::arg("target"));
  m.def("boundary_loss", &segerr::bsa::boundary_loss, py::arg("scores"),
        py::arg("pseudo_labels"));
  m.def("read_matrix_stack", &io::read_matrix_stack, py::arg("path"));
  m.def("write_matrix_stack", &io::write_matrix_stack, py::arg("path"),
        py::arg("matrices"));
}
