#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "segerr/metrics.hpp"
#include "segerr/synth.hpp"
#include "segerr/types.hpp"

namespace segerr::io {

enum class PlyFormat { kAscii, kBinaryLittleEndian };

/// Reads a scene PLY (see FORMATS.md): vertex element with float x/y/z,
/// optional uchar red/green/blue, optional float nx/ny/nz, and int label.
/// Malformed input raises IoError with the offending byte offset or header
/// line.
std::pair<PointCloud, LabelField> read_scene(const std::string& path);

/// Writes a scene PLY. Binary mode round-trips positions bit-exactly; ASCII
/// mode prints floats with enough digits to round-trip as well.
void write_scene(const std::string& path, const PointCloud& cloud,
                 const LabelField& labels, PlyFormat format);

/// One decimal class id per line; the count must match and no label may equal
/// ignore_label.
LabelField read_pred_labels(const std::string& path, std::size_t expected_count,
                            std::int32_t ignore_label = -1);

/// JSON object mapping group name -> array of class ids; groups must be
/// pairwise disjoint.
ClassGroups read_groups(const std::string& path);
void write_groups(const std::string& path, const ClassGroups& groups);

/// Report JSON: counters as exact integers, metrics as decimal strings with
/// 12 significant digits, absent metrics as null. Unknown keys are rejected.
void write_report(const std::string& path, const MetricsReport& report);
MetricsReport read_report(const std::string& path);
std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);

/// Scene spec JSON for the synth generator; unknown keys are rejected.
SceneSpec read_scene_spec(const std::string& path);
SceneSpec scene_spec_from_json(const std::string& text);

/// Binary matrix-stack container ("MSTK0001"): u32 count, then per matrix
/// u32 rows, u32 cols and row-major little-endian f64 payload.
std::vector<Eigen::MatrixXd> read_matrix_stack(const std::string& path);
void write_matrix_stack(const std::string& path,
                        const std::vector<Eigen::MatrixXd>& matrices);

}  // namespace segerr::io
