#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pgr/bjontegaard.hpp"
#include "pgr/box3d.hpp"
#include "pgr/codec.hpp"
#include "pgr/errors.hpp"
#include "pgr/ground_removal.hpp"
#include "pgr/oracle.hpp"
#include "pgr/preservation.hpp"
#include "pgr/synthetic_scene.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;

namespace {

using Points = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Rows are x, y, z followed by any per-point attributes.
pgr::PointCloud to_cloud(const Points& points) {
  if (points.ndim() != 2 || points.shape(1) < 3) {
    throw pgr::ContractError("points must be an (N, 3 + attributes) array");
  }
  const auto n = static_cast<std::size_t>(points.shape(0));
  const auto cols = static_cast<std::size_t>(points.shape(1));
  pgr::PointCloud cloud(cols - 3);
  cloud.reserve(n);
  auto r = points.unchecked<2>();
  std::vector<float> attrs(cols - 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 3; a < cols; ++a) attrs[a - 3] = static_cast<float>(r(i, a));
    cloud.add_point({r(i, 0), r(i, 1), r(i, 2)}, attrs);
  }
  return cloud;
}

py::array_t<double> from_cloud(const pgr::PointCloud& cloud) {
  const std::size_t cols = 3 + cloud.attribute_arity();
  py::array_t<double> out({cloud.size(), cols});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const pgr::Vec3 p = cloud.position(i);
    w(i, 0) = p.x;
    w(i, 1) = p.y;
    w(i, 2) = p.z;
    const auto attrs = cloud.attributes(i);
    for (std::size_t a = 0; a < attrs.size(); ++a) w(i, 3 + a) = attrs[a];
  }
  return out;
}

std::vector<bool> to_mask(const py::array_t<bool, py::array::forcecast>& a) {
  auto r = a.unchecked<1>();
  std::vector<bool> mask(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) mask[static_cast<std::size_t>(i)] = r(i);
  return mask;
}

py::array_t<bool> from_mask(const std::vector<bool>& mask) {
  py::array_t<bool> out(mask.size());
  auto w = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < mask.size(); ++i) w(i) = mask[i];
  return out;
}

double number(const py::dict& d, const char* key, double fallback) {
  return d.contains(key) ? d[key].cast<double>() : fallback;
}

pgr::Box3D to_box(const py::dict& d) {
  pgr::Box3D b;
  b.center_x = number(d, "cx", 0.0);
  b.center_y = number(d, "cy", 0.0);
  b.center_z = number(d, "cz", 0.0);
  b.length = number(d, "length", 0.0);
  b.width = number(d, "width", 0.0);
  b.height = number(d, "height", 0.0);
  b.yaw = number(d, "yaw", 0.0);
  if (d.contains("class")) b.label = pgr::parse_object_class(d["class"].cast<std::string>());
  b.validate();
  return b;
}

py::dict from_box(const pgr::Box3D& b) {
  py::dict d;
  d["class"] = pgr::to_string(b.label);
  d["cx"] = b.center_x;
  d["cy"] = b.center_y;
  d["cz"] = b.center_z;
  d["length"] = b.length;
  d["width"] = b.width;
  d["height"] = b.height;
  d["yaw"] = b.yaw;
  return d;
}

std::vector<pgr::Box3D> to_boxes(const py::list& boxes) {
  std::vector<pgr::Box3D> out;
  for (const auto& item : boxes) out.push_back(to_box(item.cast<py::dict>()));
  return out;
}

py::dict config_dict(const pgr::RemovalConfig& c) {
  py::dict d;
  d["resolution"] = c.resolution;
  d["delta_minmax"] = c.delta_minmax;
  d["er"] = c.er;
  d["delta_env"] = c.delta_env;
  py::list rules;
  for (const auto& r : c.restore_rules) {
    py::dict rd;
    rd["max_range"] = std::isinf(r.max_range) ? py::object(py::none()) : py::object(py::float_(r.max_range));
    rd["delta_res"] = r.delta_res;
    rules.append(rd);
  }
  d["restore_rules"] = rules;
  return d;
}

pgr::RemovalConfig config_from(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return pgr::resolve_removal_config(obj.cast<std::string>());
  const auto d = obj.cast<py::dict>();
  pgr::RemovalConfig c;
  c.resolution = number(d, "resolution", c.resolution);
  c.delta_minmax = number(d, "delta_minmax", c.delta_minmax);
  c.er = number(d, "er", c.er);
  c.delta_env = number(d, "delta_env", c.delta_env);
  if (d.contains("restore_rules")) {
    c.restore_rules.clear();
    for (const auto& item : d["restore_rules"].cast<py::list>()) {
      const auto rd = item.cast<py::dict>();
      pgr::RestoreRule rule;
      rule.max_range = rd.contains("max_range") && !rd["max_range"].is_none() ? rd["max_range"].cast<double>()
                                                                             : pgr::kUnbounded;
      rule.delta_res = rd["delta_res"].cast<double>();
      c.restore_rules.push_back(rule);
    }
  }
  c.validate();
  return c;
}

std::vector<std::uint8_t> to_bytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

pgr::RateCurve to_curve(const std::vector<std::pair<double, double>>& pts) {
  std::vector<pgr::RatePoint> points;
  for (const auto& [bpp, metric] : pts) points.push_back({bpp, metric});
  return pgr::RateCurve(std::move(points));
}

py::dict count_dict(const pgr::KeptCount& k) {
  py::dict d;
  d["kept"] = k.kept;
  d["total"] = k.total;
  d["fraction"] = k.fraction() ? py::object(py::float_(*k.fraction())) : py::object(py::none());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pillar-based ground removal, octree coding and rate evaluation for LiDAR frames";

  py::register_exception<pgr::Error>(m, "PgrError", PyExc_ValueError);

  m.def("preset_names", &pgr::preset_names, "Names of the built-in removal presets.");
  m.def("named_config", [](const std::string& name) { return config_dict(pgr::resolve_removal_config(name)); },
        py::arg("name"), "Removal parameters of a preset, alias or JSON config path.");

  m.def(
      "apply_pgr",
      [](const Points& points, const py::object& config, bool restoration) {
        const pgr::PointCloud cloud = to_cloud(points);
        pgr::PgrOptions opts;
        opts.restoration = restoration;
        const pgr::PgrResult r = pgr::apply_pgr(cloud, config_from(config), opts);
        py::dict d;
        d["keep"] = from_mask(r.keep);
        d["pillars"] = r.pillar_count;
        d["retained_pillars"] = r.retained_pillars;
        d["restored_pillars"] = r.restored_pillars;
        d["kept_points"] = r.kept_points;
        return d;
      },
      py::arg("points"), py::arg("config") = "pgr-c0-kitti", py::arg("restoration") = true,
      "Keep mask of pillar-based ground removal. `config` is a preset name or a dict.");

  m.def(
      "apply_oracle",
      [](const Points& points, const py::array_t<bool, py::array::forcecast>& ground, const py::list& boxes,
         double ef) {
        return from_mask(pgr::apply_oracle(to_cloud(points), to_mask(ground), to_boxes(boxes), {ef}));
      },
      py::arg("points"), py::arg("ground"), py::arg("boxes"), py::arg("extension_factor") = 0.0);

  m.def(
      "points_in_box",
      [](const Points& points, const py::dict& box, double scale) {
        const auto idx = pgr::points_in_box(to_cloud(points), to_box(box), scale);
        return py::array_t<std::uint32_t>(idx.size(), idx.data());
      },
      py::arg("points"), py::arg("box"), py::arg("scale") = 1.0);

  m.def(
      "preservation_report",
      [](const Points& points, const py::array_t<bool, py::array::forcecast>& keep, const py::list& boxes) {
        const auto rep = pgr::preservation_report(to_cloud(points), to_mask(keep), to_boxes(boxes));
        py::dict per_class;
        for (const auto& [cls, k] : rep.per_class) per_class[py::str(pgr::to_string(cls))] = count_dict(k);
        py::dict d;
        d["per_class"] = per_class;
        d["in_boxes"] = count_dict(rep.in_boxes);
        d["overall"] = count_dict(rep.overall);
        return d;
      },
      py::arg("points"), py::arg("keep"), py::arg("boxes"));

  m.def(
      "synthetic_scene",
      [](const std::string& style, std::uint64_t seed, int azimuth_steps) {
        pgr::SceneOptions o;
        if (style == "urban") {
          o.style = pgr::SceneStyle::Urban;
        } else if (style != "open") {
          throw pgr::ContractError("style must be 'open' or 'urban'");
        }
        o.azimuth_steps = azimuth_steps;
        const auto scene = pgr::synthesize_scene(pgr::make_scene_spec(o, seed), seed);
        py::list boxes;
        for (const auto& b : scene.boxes) boxes.append(from_box(b));
        py::dict d;
        d["points"] = from_cloud(scene.cloud);
        d["ground"] = from_mask(scene.ground);
        d["boxes"] = boxes;
        return d;
      },
      py::arg("style") = "open", py::arg("seed") = 1, py::arg("azimuth_steps") = 1024,
      "Synthetic frame: points (N, 4) with intensity, ground mask and boxes.");

  m.def(
      "encode",
      [](const Points& points, double scale, double units, std::optional<std::uint64_t> original_count) {
        const auto bs = pgr::encode_frame(to_cloud(points), pgr::CodecConfig{scale, units}, original_count);
        const auto bytes = bs.serialize();
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("points"), py::arg("scale"), py::arg("units_per_meter") = 1000.0,
      py::arg("original_count") = py::none(), "Octree bitstream of a frame.");

  m.def(
      "decode", [](const py::bytes& data) { return from_cloud(pgr::decode_frame(pgr::Bitstream::parse(to_bytes(data)))); },
      py::arg("data"));

  m.def(
      "measure_bpp", [](const py::bytes& data) { return pgr::measure_bpp(pgr::Bitstream::parse(to_bytes(data))); },
      py::arg("data"), "Bits per original input point.");

  m.def(
      "bd_metric",
      [](const std::vector<std::pair<double, double>>& anchor, const std::vector<std::pair<double, double>>& test) {
        return pgr::bd_metric(to_curve(anchor), to_curve(test));
      },
      py::arg("anchor"), py::arg("test"), "Mean metric difference (test - anchor) over the shared log-rate range.");

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
