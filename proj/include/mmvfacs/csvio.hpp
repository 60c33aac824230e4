#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mmvfacs/mat.hpp"
#include "mmvfacs/model.hpp"

namespace mmvfacs {

// One matrix per file: comma-separated rows, 17 significant digits so values
// round-trip exactly, LF line endings.
void write_matrix_csv(const Mat& m, std::ostream& os);
void write_matrix_csv(const Mat& m, const std::filesystem::path& path);
Mat read_matrix_csv(std::istream& is);
Mat read_matrix_csv(const std::filesystem::path& path);

nlohmann::ordered_json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j);

// Full instance envelope {params, support, A, X, W, B} for regression
// fixtures.
nlohmann::ordered_json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

void save_instance(const Instance& inst, const std::filesystem::path& dir);
Instance load_instance(const std::filesystem::path& json_path);

}  // namespace mmvfacs
