#pragma once

// File formats: IDX images/labels, JSON model and dataset documents, and the
// CSV/JSON report records.

#include "advparam/attack.hpp"
#include "advparam/dataset.hpp"
#include "advparam/metrics.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace advparam {

/// Pixel bytes of an IDX image file (magic 0x00000803), each image flattened
/// row-major and scaled by 1/255. Throws FormatError with the byte offset.
std::vector<Vector> read_idx_images(const std::filesystem::path& path);

/// Labels of an IDX label file (magic 0x00000801).
std::vector<int> read_idx_labels(const std::filesystem::path& path);

/// Image and label files combined; FormatError if the counts differ.
LabeledDataset read_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kDatasetFormatVersion = 1;

nlohmann::json model_to_json(const ModelParams& params, const nlohmann::json& metadata = {});
ModelParams model_from_json(const nlohmann::json& doc);
void save_model(const ModelParams& params, const std::filesystem::path& path,
                const nlohmann::json& metadata = {});
ModelParams load_model(const std::filesystem::path& path);

nlohmann::json dataset_to_json(const LabeledDataset& data);
LabeledDataset dataset_from_json(const nlohmann::json& doc);
void save_dataset(const LabeledDataset& data, const std::filesystem::path& path);
LabeledDataset load_dataset(const std::filesystem::path& path);

/// Shortest decimal that parses back to the same double; "nan"/"inf" spelled out.
std::string format_double(double v);

/// Fixed column order: dataset, n_samples, acc, adv_acc, eps, avg_r2, dist_measure, seed.
std::string robustness_csv_header();
std::string robustness_csv_row(const RobustnessReport& r);
nlohmann::json robustness_to_json(const RobustnessReport& r);

/// iter, phase, loss, acc, adv_acc
void write_trace_csv(const std::vector<TracePoint>& trace, const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace advparam
