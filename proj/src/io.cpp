#include "segerr/io.hpp"

#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "segerr/errors.hpp"

namespace segerr::io {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("failed reading '" + path + "'");
  return buffer.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("failed writing '" + path + "'");
}

json parse_json(const std::string& text, const std::string& path) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw IoError("'" + path + "' is not valid JSON");
  return doc;
}

void reject_unknown_keys(const json& object, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    if (!known.contains(key)) {
      throw IoError("unknown key '" + key + "' in " + where);
    }
  }
}

// ---------------------------------------------------------------------------
// PLY

enum class PlyType { kFloat32, kUint8, kInt32 };

struct PlyProperty {
  PlyType type;
  std::string name;
};

PlyType parse_ply_type(const std::string& token, std::size_t line_no) {
  if (token == "float" || token == "float32") return PlyType::kFloat32;
  if (token == "uchar" || token == "uint8") return PlyType::kUint8;
  if (token == "int" || token == "int32") return PlyType::kInt32;
  throw IoError("unsupported property type '" + token + "' in header line " +
                std::to_string(line_no));
}

const char* ply_type_name(PlyType type) {
  switch (type) {
    case PlyType::kFloat32: return "float";
    case PlyType::kUint8: return "uchar";
    case PlyType::kInt32: return "int";
  }
  return "?";
}

PlyType expected_type(const std::string& name, std::size_t line_no) {
  if (name == "x" || name == "y" || name == "z" || name == "nx" || name == "ny" ||
      name == "nz") {
    return PlyType::kFloat32;
  }
  if (name == "red" || name == "green" || name == "blue") return PlyType::kUint8;
  if (name == "label") return PlyType::kInt32;
  throw IoError("unsupported vertex property '" + name + "' in header line " +
                std::to_string(line_no));
}

struct PlyHeader {
  PlyFormat format = PlyFormat::kAscii;
  std::size_t vertex_count = 0;
  std::vector<PlyProperty> properties;
  std::size_t payload_offset = 0;  // byte offset of the first payload byte
};

PlyHeader parse_ply_header(const std::string& data, const std::string& path) {
  PlyHeader header;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_format = false;
  bool in_vertex_element = false;
  bool saw_end = false;

  const auto next_line = [&](std::string& line) {
    if (pos >= data.size()) return false;
    const std::size_t eol = data.find('\n', pos);
    const std::size_t end = eol == std::string::npos ? data.size() : eol;
    line = data.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = eol == std::string::npos ? data.size() : eol + 1;
    ++line_no;
    return true;
  };

  std::string line;
  if (!next_line(line) || line != "ply") {
    throw IoError("'" + path + "' is not a PLY file (missing 'ply' magic)");
  }
  while (next_line(line)) {
    if (line == "end_header") {
      saw_end = true;
      break;
    }
    std::istringstream tokens(line);
    std::string word;
    tokens >> word;
    if (word == "comment" || word.empty()) continue;
    if (word == "format") {
      std::string fmt, version;
      tokens >> fmt >> version;
      if (fmt == "ascii") {
        header.format = PlyFormat::kAscii;
      } else if (fmt == "binary_little_endian") {
        header.format = PlyFormat::kBinaryLittleEndian;
      } else {
        throw IoError("unsupported PLY format '" + fmt + "' (header line " +
                      std::to_string(line_no) + ")");
      }
      if (version != "1.0") {
        throw IoError("unsupported PLY version '" + version + "' (header line " +
                      std::to_string(line_no) + ")");
      }
      saw_format = true;
    } else if (word == "element") {
      std::string name;
      std::size_t count = 0;
      tokens >> name >> count;
      if (name != "vertex" || in_vertex_element) {
        throw IoError("only a single vertex element is supported (header line " +
                      std::to_string(line_no) + ")");
      }
      header.vertex_count = count;
      in_vertex_element = true;
    } else if (word == "property") {
      if (!in_vertex_element) {
        throw IoError("property before any element (header line " +
                      std::to_string(line_no) + ")");
      }
      std::string type, name;
      tokens >> type >> name;
      if (type == "list") {
        throw IoError("list properties are not supported (header line " +
                      std::to_string(line_no) + ")");
      }
      const PlyType parsed = parse_ply_type(type, line_no);
      const PlyType wanted = expected_type(name, line_no);
      if (parsed != wanted) {
        throw IoError("property '" + name + "' must have type " +
                      ply_type_name(wanted) + " (header line " +
                      std::to_string(line_no) + ")");
      }
      header.properties.push_back(PlyProperty{parsed, name});
    } else {
      throw IoError("unrecognized header keyword '" + word + "' (header line " +
                    std::to_string(line_no) + ")");
    }
  }
  if (!saw_end) throw IoError("PLY header of '" + path + "' has no end_header");
  if (!saw_format) throw IoError("PLY header of '" + path + "' has no format line");
  if (!in_vertex_element) throw IoError("PLY header of '" + path + "' has no vertex element");

  const auto require = [&](const char* name) {
    for (const auto& p : header.properties) {
      if (p.name == name) return;
    }
    throw IoError("PLY header of '" + path + "' is missing required property '" +
                  std::string(name) + "'");
  };
  require("x");
  require("y");
  require("z");
  require("label");
  const auto has = [&](const char* name) {
    for (const auto& p : header.properties) {
      if (p.name == name) return true;
    }
    return false;
  };
  const int colors = has("red") + has("green") + has("blue");
  if (colors != 0 && colors != 3) {
    throw IoError("PLY color properties must appear as the full red/green/blue trio");
  }
  const int normals = has("nx") + has("ny") + has("nz");
  if (normals != 0 && normals != 3) {
    throw IoError("PLY normal properties must appear as the full nx/ny/nz trio");
  }
  std::set<std::string> names;
  for (const auto& p : header.properties) {
    if (!names.insert(p.name).second) {
      throw IoError("duplicate PLY property '" + p.name + "'");
    }
  }
  header.payload_offset = pos;
  return header;
}

}  // namespace

std::pair<PointCloud, LabelField> read_scene(const std::string& path) {
  const std::string data = read_file(path);
  const PlyHeader header = parse_ply_header(data, path);
  const std::size_t n = header.vertex_count;

  PointCloud cloud;
  cloud.positions.resize(n);
  LabelField labels;
  labels.labels.resize(n);
  const bool has_colors = [&] {
    for (const auto& p : header.properties) {
      if (p.name == "red") return true;
    }
    return false;
  }();
  const bool has_normals = [&] {
    for (const auto& p : header.properties) {
      if (p.name == "nx") return true;
    }
    return false;
  }();
  if (has_colors) cloud.colors.emplace(n);
  if (has_normals) cloud.normals.emplace(n);

  const auto store = [&](std::size_t i, const std::string& name, double value) {
    if (name == "x") {
      cloud.positions[i][0] = static_cast<float>(value);
    } else if (name == "y") {
      cloud.positions[i][1] = static_cast<float>(value);
    } else if (name == "z") {
      cloud.positions[i][2] = static_cast<float>(value);
    } else if (name == "nx") {
      (*cloud.normals)[i][0] = static_cast<float>(value);
    } else if (name == "ny") {
      (*cloud.normals)[i][1] = static_cast<float>(value);
    } else if (name == "nz") {
      (*cloud.normals)[i][2] = static_cast<float>(value);
    } else if (name == "red") {
      (*cloud.colors)[i][0] = static_cast<std::uint8_t>(value);
    } else if (name == "green") {
      (*cloud.colors)[i][1] = static_cast<std::uint8_t>(value);
    } else if (name == "blue") {
      (*cloud.colors)[i][2] = static_cast<std::uint8_t>(value);
    } else if (name == "label") {
      labels.labels[i] = static_cast<std::int32_t>(value);
    }
  };

  if (header.format == PlyFormat::kBinaryLittleEndian) {
    std::size_t offset = header.payload_offset;
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& prop : header.properties) {
        const std::size_t width = prop.type == PlyType::kUint8 ? 1 : 4;
        if (offset + width > data.size()) {
          throw IoError("truncated PLY payload in '" + path + "' at byte " +
                        std::to_string(offset) + " (vertex " + std::to_string(i) + ")");
        }
        if (prop.type == PlyType::kFloat32) {
          float v;
          std::memcpy(&v, data.data() + offset, 4);
          store(i, prop.name, static_cast<double>(v));
        } else if (prop.type == PlyType::kInt32) {
          std::int32_t v;
          std::memcpy(&v, data.data() + offset, 4);
          store(i, prop.name, static_cast<double>(v));
        } else {
          store(i, prop.name, static_cast<double>(
                                  static_cast<std::uint8_t>(data[offset])));
        }
        offset += width;
      }
    }
  } else {
    std::size_t pos = header.payload_offset;
    for (std::size_t i = 0; i < n; ++i) {
      if (pos >= data.size()) {
        throw IoError("truncated PLY payload in '" + path + "' at byte " +
                      std::to_string(pos) + " (vertex " + std::to_string(i) + ")");
      }
      const std::size_t eol = data.find('\n', pos);
      const std::size_t end = eol == std::string::npos ? data.size() : eol;
      std::istringstream tokens(data.substr(pos, end - pos));
      for (const auto& prop : header.properties) {
        double value;
        if (!(tokens >> value)) {
          throw IoError("malformed vertex " + std::to_string(i) + " in '" + path +
                        "' near byte " + std::to_string(pos));
        }
        if (prop.type != PlyType::kFloat32 &&
            value != std::floor(value)) {
          throw IoError("non-integer value for property '" + prop.name +
                        "' at vertex " + std::to_string(i));
        }
        store(i, prop.name, value);
      }
      std::string extra;
      if (tokens >> extra) {
        throw IoError("trailing token '" + extra + "' at vertex " + std::to_string(i));
      }
      pos = eol == std::string::npos ? data.size() : eol + 1;
    }
  }
  return {std::move(cloud), std::move(labels)};
}

void write_scene(const std::string& path, const PointCloud& cloud,
                 const LabelField& labels, PlyFormat format) {
  const std::size_t n = cloud.count();
  if (labels.count() != n) {
    throw ValidationError("label count does not match point count");
  }
  if (cloud.colors && cloud.colors->size() != n) {
    throw ValidationError("color count does not match point count");
  }
  if (cloud.normals && cloud.normals->size() != n) {
    throw ValidationError("normal count does not match point count");
  }

  std::string out;
  out += "ply\n";
  out += format == PlyFormat::kAscii ? "format ascii 1.0\n"
                                     : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(n) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  if (cloud.colors) {
    out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  if (cloud.normals) {
    out += "property float nx\nproperty float ny\nproperty float nz\n";
  }
  out += "property int label\nend_header\n";

  if (format == PlyFormat::kBinaryLittleEndian) {
    const auto put_f32 = [&out](float v) {
      char raw[4];
      std::memcpy(raw, &v, 4);
      out.append(raw, 4);
    };
    const auto put_i32 = [&out](std::int32_t v) {
      char raw[4];
      std::memcpy(raw, &v, 4);
      out.append(raw, 4);
    };
    for (std::size_t i = 0; i < n; ++i) {
      put_f32(cloud.positions[i][0]);
      put_f32(cloud.positions[i][1]);
      put_f32(cloud.positions[i][2]);
      if (cloud.colors) {
        out.push_back(static_cast<char>((*cloud.colors)[i][0]));
        out.push_back(static_cast<char>((*cloud.colors)[i][1]));
        out.push_back(static_cast<char>((*cloud.colors)[i][2]));
      }
      if (cloud.normals) {
        put_f32((*cloud.normals)[i][0]);
        put_f32((*cloud.normals)[i][1]);
        put_f32((*cloud.normals)[i][2]);
      }
      put_i32(labels.labels[i]);
    }
  } else {
    char buf[64];
    const auto put_f32 = [&](float v) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
      out += buf;
    };
    for (std::size_t i = 0; i < n; ++i) {
      put_f32(cloud.positions[i][0]);
      out.push_back(' ');
      put_f32(cloud.positions[i][1]);
      out.push_back(' ');
      put_f32(cloud.positions[i][2]);
      if (cloud.colors) {
        std::snprintf(buf, sizeof buf, " %u %u %u", (*cloud.colors)[i][0],
                      (*cloud.colors)[i][1], (*cloud.colors)[i][2]);
        out += buf;
      }
      if (cloud.normals) {
        for (int a = 0; a < 3; ++a) {
          out.push_back(' ');
          put_f32((*cloud.normals)[i][a]);
        }
      }
      std::snprintf(buf, sizeof buf, " %" PRId32 "\n", labels.labels[i]);
      out += buf;
    }
  }
  write_file(path, out);
}

LabelField read_pred_labels(const std::string& path, std::size_t expected_count,
                            std::int32_t ignore_label) {
  const std::string data = read_file(path);
  LabelField field;
  field.ignore_label = ignore_label;
  field.labels.reserve(expected_count);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    const std::size_t eol = data.find('\n', pos);
    const std::size_t end = eol == std::string::npos ? data.size() : eol;
    std::string line = data.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = eol == std::string::npos ? data.size() : eol + 1;
    ++line_no;
    if (line.empty() && pos >= data.size()) break;  // trailing newline
    std::size_t consumed = 0;
    long value = 0;
    try {
      value = std::stol(line, &consumed, 10);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed == 0 || consumed != line.size()) {
      throw IoError("'" + path + "' line " + std::to_string(line_no) +
                    ": expected a decimal integer, got '" + line + "'");
    }
    if (value == ignore_label) {
      throw IoError("'" + path + "' line " + std::to_string(line_no) +
                    ": prediction labels may not contain the ignore label");
    }
    field.labels.push_back(static_cast<std::int32_t>(value));
  }
  if (field.labels.size() != expected_count) {
    throw IoError("'" + path + "' holds " + std::to_string(field.labels.size()) +
                  " labels but the scene has " + std::to_string(expected_count) +
                  " points");
  }
  return field;
}

// ---------------------------------------------------------------------------
// groups

ClassGroups read_groups(const std::string& path) {
  const json doc = parse_json(read_file(path), path);
  if (!doc.is_object()) {
    throw IoError("'" + path + "' must be a JSON object of group -> class ids");
  }
  ClassGroups groups;
  std::set<std::int64_t> seen;
  for (const auto& [name, ids] : doc.items()) {
    if (!ids.is_array()) {
      throw IoError("group '" + name + "' must map to an array of class ids");
    }
    std::vector<std::int32_t> members;
    for (const auto& id : ids) {
      if (!id.is_number_integer()) {
        throw IoError("group '" + name + "' contains a non-integer class id");
      }
      const std::int64_t v = id.get<std::int64_t>();
      if (!seen.insert(v).second) {
        throw IoError("class id " + std::to_string(v) +
                      " appears in more than one group");
      }
      members.push_back(static_cast<std::int32_t>(v));
    }
    std::sort(members.begin(), members.end());
    groups.groups.emplace(name, std::move(members));
  }
  return groups;
}

void write_groups(const std::string& path, const ClassGroups& groups) {
  json doc = json::object();
  for (const auto& [name, ids] : groups.groups) doc[name] = ids;
  write_file(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// report

namespace {

constexpr const char* kReportFormat = "segerr-report-v1";

std::string format_metric(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

json metric_to_json(const std::optional<double>& value) {
  if (!value) return nullptr;
  return format_metric(*value);
}

std::optional<double> metric_from_json(const json& value, const std::string& where) {
  if (value.is_null()) return std::nullopt;
  if (!value.is_string()) {
    throw IoError("metric " + where + " must be a decimal string or null");
  }
  return std::stod(value.get<std::string>());
}

std::uint64_t counter_from_json(const json& object, const char* key) {
  const auto it = object.find(key);
  if (it == object.end() || !it->is_number_unsigned()) {
    throw IoError(std::string("report counter '") + key +
                  "' is missing or not a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

}  // namespace

std::string report_to_json(const MetricsReport& report) {
  json doc;
  doc["format"] = kReportFormat;
  doc["protocol"] = {
      {"num_classes", report.num_classes},
      {"radius_m", report.radius_m},
      {"iou_threshold", report.iou_threshold},
      {"min_component_size", report.min_component_size},
      {"ignore_label", report.ignore_label},
      {"derr_samples",
       report.derr_samples == DerrSamples::kClassMask ? "class" : "component"},
  };
  doc["groups"] = json::object();
  for (const auto& [name, ids] : report.groups) doc["groups"][name] = ids;

  json confusion = json::array();
  for (int g = 0; g < report.num_classes; ++g) {
    json row = json::array();
    for (int p = 0; p < report.num_classes; ++p) row.push_back(report.confusion.at(g, p));
    confusion.push_back(std::move(row));
  }
  doc["counters"] = {
      {"num_scenes", report.num_scenes},
      {"confusion", std::move(confusion)},
      {"pred_boundary", report.pred_boundary_count},
      {"gt_boundary", report.gt_boundary_count},
      {"boundary_intersection", report.boundary_intersection},
      {"rerr_tp", report.rerr_tp},
      {"rerr_all", report.rerr_all},
      {"derr_num", report.derr_num},
      {"derr_den", report.derr_den},
  };

  json per_class = json::array();
  for (const auto& iou : report.per_class_iou) per_class.push_back(metric_to_json(iou));
  json group_iou = json::object();
  for (const auto& [name, value] : report.group_iou) group_iou[name] = metric_to_json(value);
  doc["metrics"] = {
      {"per_class_iou", std::move(per_class)},
      {"miou", metric_to_json(report.miou)},
      {"macc", metric_to_json(report.macc)},
      {"oacc", metric_to_json(report.oacc)},
      {"group_iou", std::move(group_iou)},
      {"ferr", metric_to_json(report.ferr)},
      {"merr", metric_to_json(report.merr)},
      {"rerr", metric_to_json(report.rerr)},
      {"derr", metric_to_json(report.derr)},
  };
  return doc.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
  const json doc = parse_json(text, "<report>");
  if (!doc.is_object()) throw IoError("report must be a JSON object");
  reject_unknown_keys(doc, {"format", "protocol", "groups", "counters", "metrics"},
                      "report");
  if (!doc.contains("format") || doc["format"] != kReportFormat) {
    throw IoError("report format marker is missing or unsupported");
  }

  MetricsReport report;
  const json& protocol = doc.at("protocol");
  reject_unknown_keys(protocol,
                      {"num_classes", "radius_m", "iou_threshold",
                       "min_component_size", "ignore_label", "derr_samples"},
                      "report protocol");
  report.num_classes = protocol.at("num_classes").get<int>();
  report.radius_m = protocol.at("radius_m").get<double>();
  report.iou_threshold = protocol.at("iou_threshold").get<double>();
  report.min_component_size = protocol.at("min_component_size").get<int>();
  report.ignore_label = protocol.at("ignore_label").get<std::int32_t>();
  const std::string derr_samples = protocol.at("derr_samples").get<std::string>();
  if (derr_samples == "class") {
    report.derr_samples = DerrSamples::kClassMask;
  } else if (derr_samples == "component") {
    report.derr_samples = DerrSamples::kComponent;
  } else {
    throw IoError("unknown derr_samples value '" + derr_samples + "'");
  }
  if (report.num_classes < 1) throw IoError("report num_classes must be positive");

  const json& groups = doc.at("groups");
  if (!groups.is_object()) throw IoError("report groups must be an object");
  for (const auto& [name, ids] : groups.items()) {
    std::vector<std::int32_t> members;
    for (const auto& id : ids) members.push_back(id.get<std::int32_t>());
    report.groups.emplace(name, std::move(members));
  }

  const json& counters = doc.at("counters");
  reject_unknown_keys(counters,
                      {"num_scenes", "confusion", "pred_boundary", "gt_boundary",
                       "boundary_intersection", "rerr_tp", "rerr_all", "derr_num",
                       "derr_den"},
                      "report counters");
  report.num_scenes = counter_from_json(counters, "num_scenes");
  report.pred_boundary_count = counter_from_json(counters, "pred_boundary");
  report.gt_boundary_count = counter_from_json(counters, "gt_boundary");
  report.boundary_intersection = counter_from_json(counters, "boundary_intersection");
  report.rerr_tp = counter_from_json(counters, "rerr_tp");
  report.rerr_all = counter_from_json(counters, "rerr_all");
  report.derr_num = counter_from_json(counters, "derr_num");
  report.derr_den = counter_from_json(counters, "derr_den");

  const json& confusion = counters.at("confusion");
  if (!confusion.is_array() ||
      confusion.size() != static_cast<std::size_t>(report.num_classes)) {
    throw IoError("report confusion matrix must have num_classes rows");
  }
  report.confusion.num_classes = report.num_classes;
  report.confusion.counts.reserve(
      static_cast<std::size_t>(report.num_classes) * report.num_classes);
  for (const auto& row : confusion) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(report.num_classes)) {
      throw IoError("report confusion matrix must have num_classes columns");
    }
    for (const auto& cell : row) {
      if (!cell.is_number_unsigned()) {
        throw IoError("confusion entries must be non-negative integers");
      }
      report.confusion.counts.push_back(cell.get<std::uint64_t>());
    }
  }

  const json& metrics = doc.at("metrics");
  reject_unknown_keys(metrics,
                      {"per_class_iou", "miou", "macc", "oacc", "group_iou", "ferr",
                       "merr", "rerr", "derr"},
                      "report metrics");
  const json& per_class = metrics.at("per_class_iou");
  if (!per_class.is_array() ||
      per_class.size() != static_cast<std::size_t>(report.num_classes)) {
    throw IoError("per_class_iou must hold one entry per class");
  }
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    report.per_class_iou.push_back(
        metric_from_json(per_class[c], "per_class_iou[" + std::to_string(c) + "]"));
  }
  report.miou = metric_from_json(metrics.at("miou"), "miou");
  report.macc = metric_from_json(metrics.at("macc"), "macc");
  report.oacc = metric_from_json(metrics.at("oacc"), "oacc");
  report.ferr = metric_from_json(metrics.at("ferr"), "ferr");
  report.merr = metric_from_json(metrics.at("merr"), "merr");
  report.rerr = metric_from_json(metrics.at("rerr"), "rerr");
  report.derr = metric_from_json(metrics.at("derr"), "derr");
  for (const auto& [name, value] : metrics.at("group_iou").items()) {
    report.group_iou.emplace(name, metric_from_json(value, "group_iou." + name));
  }
  return report;
}

void write_report(const std::string& path, const MetricsReport& report) {
  write_file(path, report_to_json(report));
}

MetricsReport read_report(const std::string& path) {
  try {
    return report_from_json(read_file(path));
  } catch (const IoError& e) {
    throw IoError("'" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// scene spec

SceneSpec scene_spec_from_json(const std::string& text) {
  const json doc = parse_json(text, "<scene spec>");
  if (!doc.is_object() || !doc.contains("kind")) {
    throw IoError("scene spec must be a JSON object with a 'kind' key");
  }
  SceneSpec spec;
  const std::string kind = doc.at("kind").get<std::string>();
  std::set<std::string> known{"kind", "seed", "ignore_fraction"};
  if (kind == "two-planes") {
    spec.kind = SceneKind::kTwoPlanes;
    known.insert({"extent", "pitch", "split", "jitter"});
  } else if (kind == "checkerboard") {
    spec.kind = SceneKind::kCheckerboard;
    known.insert({"extent", "pitch", "tile", "jitter"});
  } else if (kind == "spheres-in-box") {
    spec.kind = SceneKind::kSpheresInBox;
    known.insert({"extents", "pitch", "sphere_radius", "background", "jitter"});
  } else if (kind == "random-blobs") {
    spec.kind = SceneKind::kRandomBlobs;
    known.insert({"extents", "count", "num_blobs", "num_classes"});
  } else {
    throw IoError("unknown scene kind '" + kind + "'");
  }
  reject_unknown_keys(doc, known, "scene spec");

  if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("ignore_fraction")) {
    spec.ignore_fraction = doc["ignore_fraction"].get<double>();
    if (spec.ignore_fraction < 0.0 || spec.ignore_fraction >= 1.0) {
      throw IoError("ignore_fraction must lie in [0, 1)");
    }
  }
  if (doc.contains("extent")) {
    const auto& e = doc["extent"];
    if (!e.is_array() || e.size() != 2) throw IoError("extent must be a 2-array");
    spec.extent = {e[0].get<double>(), e[1].get<double>()};
  }
  if (doc.contains("extents")) {
    const auto& e = doc["extents"];
    if (!e.is_array() || e.size() != 3) throw IoError("extents must be a 3-array");
    spec.extents = {e[0].get<double>(), e[1].get<double>(), e[2].get<double>()};
  }
  if (doc.contains("pitch")) spec.pitch = doc["pitch"].get<double>();
  if (doc.contains("jitter")) spec.jitter = doc["jitter"].get<double>();
  if (doc.contains("split")) spec.split = doc["split"].get<double>();
  if (doc.contains("tile")) spec.tile = doc["tile"].get<double>();
  if (doc.contains("sphere_radius")) spec.sphere_radius = doc["sphere_radius"].get<double>();
  if (doc.contains("background")) spec.background = doc["background"].get<bool>();
  if (doc.contains("count")) spec.count = doc["count"].get<std::uint64_t>();
  if (doc.contains("num_blobs")) spec.num_blobs = doc["num_blobs"].get<int>();
  if (doc.contains("num_classes")) spec.num_classes = doc["num_classes"].get<int>();
  return spec;
}

SceneSpec read_scene_spec(const std::string& path) {
  try {
    return scene_spec_from_json(read_file(path));
  } catch (const IoError& e) {
    throw IoError("'" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// matrix stack

namespace {
constexpr char kMatrixMagic[8] = {'M', 'S', 'T', 'K', '0', '0', '0', '1'};
}

std::vector<Eigen::MatrixXd> read_matrix_stack(const std::string& path) {
  const std::string data = read_file(path);
  std::size_t offset = 0;
  const auto need = [&](std::size_t bytes) {
    if (offset + bytes > data.size()) {
      throw IoError("truncated matrix container '" + path + "' at byte " +
                    std::to_string(offset));
    }
  };
  need(8);
  if (std::memcmp(data.data(), kMatrixMagic, 8) != 0) {
    throw IoError("'" + path + "' is not a matrix container (bad magic)");
  }
  offset = 8;
  need(4);
  std::uint32_t count;
  std::memcpy(&count, data.data() + offset, 4);
  offset += 4;
  std::vector<Eigen::MatrixXd> matrices;
  matrices.reserve(count);
  for (std::uint32_t m = 0; m < count; ++m) {
    need(8);
    std::uint32_t rows, cols;
    std::memcpy(&rows, data.data() + offset, 4);
    std::memcpy(&cols, data.data() + offset + 4, 4);
    offset += 8;
    const std::size_t payload = static_cast<std::size_t>(rows) * cols * 8;
    need(payload);
    Eigen::MatrixXd matrix(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i) {
      for (std::uint32_t j = 0; j < cols; ++j) {
        double v;
        std::memcpy(&v, data.data() + offset, 8);
        offset += 8;
        matrix(i, j) = v;
      }
    }
    matrices.push_back(std::move(matrix));
  }
  if (offset != data.size()) {
    throw IoError("'" + path + "' has " + std::to_string(data.size() - offset) +
                  " trailing bytes after the last matrix");
  }
  return matrices;
}

void write_matrix_stack(const std::string& path,
                        const std::vector<Eigen::MatrixXd>& matrices) {
  std::string out;
  out.append(kMatrixMagic, 8);
  const auto put_u32 = [&out](std::uint32_t v) {
    char raw[4];
    std::memcpy(raw, &v, 4);
    out.append(raw, 4);
  };
  put_u32(static_cast<std::uint32_t>(matrices.size()));
  for (const auto& matrix : matrices) {
    put_u32(static_cast<std::uint32_t>(matrix.rows()));
    put_u32(static_cast<std::uint32_t>(matrix.cols()));
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
      for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
        const double v = matrix(i, j);
        char raw[8];
        std::memcpy(raw, &v, 8);
        out.append(raw, 8);
      }
    }
  }
  write_file(path, out);
}

}  // namespace segerr::io
