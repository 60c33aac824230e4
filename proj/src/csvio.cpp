#include "mmvfacs/csvio.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace mmvfacs {

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_matrix_csv(const Mat& m, std::ostream& os) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_value(m(i, j));
    }
    os << '\n';
  }
}

void write_matrix_csv(const Mat& m, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  }
  write_matrix_csv(m, os);
}

Mat read_matrix_csv(std::istream& is) {
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t row_cols = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        data.push_back(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::MalformedCsv,
                    "cannot parse '" + cell + "' at row " + std::to_string(rows));
      }
      ++row_cols;
    }
    if (rows == 0) {
      cols = row_cols;
    } else if (row_cols != cols) {
      throw Error(ErrorCode::MalformedCsv,
                  "row " + std::to_string(rows) + " has " +
                      std::to_string(row_cols) + " cells, expected " +
                      std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::MalformedCsv, "empty csv");
  return Mat(rows, cols, std::move(data));
}

Mat read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw Error(ErrorCode::MalformedCsv, "cannot open " + path.string());
  }
  return read_matrix_csv(is);
}

nlohmann::ordered_json matrix_to_json(const Mat& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorCode::MalformedCsv, "matrix json must be a non-empty array");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().size();
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const auto& row : j) {
    if (row.size() != cols) {
      throw Error(ErrorCode::MalformedCsv, "ragged matrix json");
    }
    for (const auto& v : row) data.push_back(v.get<double>());
  }
  return Mat(rows, cols, std::move(data));
}

nlohmann::ordered_json instance_to_json(const Instance& inst) {
  nlohmann::ordered_json j;
  j["params"] = {
      {"M", inst.params.M},       {"N", inst.params.N},
      {"K", inst.params.K},       {"L", inst.params.L},
      {"kind", to_string(inst.params.kind)},
      {"smnr_db", std::isinf(inst.params.smnr_db)
                      ? nlohmann::ordered_json(nullptr)
                      : nlohmann::ordered_json(inst.params.smnr_db)},
      {"seed", inst.params.seed},
  };
  j["support"] = inst.signal.support.indices();
  j["A"] = matrix_to_json(inst.matrix.A);
  j["X"] = matrix_to_json(inst.signal.X);
  j["W"] = matrix_to_json(inst.obs.W);
  j["B"] = matrix_to_json(inst.obs.B);
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  const auto& p = j.at("params");
  inst.params.M = p.at("M").get<std::size_t>();
  inst.params.N = p.at("N").get<std::size_t>();
  inst.params.K = p.at("K").get<std::size_t>();
  inst.params.L = p.at("L").get<std::size_t>();
  inst.params.kind = signal_kind_from_string(p.at("kind").get<std::string>());
  inst.params.smnr_db = p.at("smnr_db").is_null()
                            ? std::numeric_limits<double>::infinity()
                            : p.at("smnr_db").get<double>();
  inst.params.seed = p.at("seed").get<std::uint64_t>();

  inst.matrix.A = matrix_from_json(j.at("A"));
  inst.matrix.M = inst.matrix.A.rows();
  inst.matrix.N = inst.matrix.A.cols();
  inst.signal.X = matrix_from_json(j.at("X"));
  inst.signal.kind = inst.params.kind;
  inst.signal.support = IndexSet(j.at("support").get<std::vector<std::size_t>>());
  inst.obs.W = matrix_from_json(j.at("W"));
  inst.obs.B = matrix_from_json(j.at("B"));
  inst.obs.smnr_db = inst.params.smnr_db;
  return inst;
}

void save_instance(const Instance& inst, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_matrix_csv(inst.matrix.A, dir / "A.csv");
  write_matrix_csv(inst.signal.X, dir / "X.csv");
  write_matrix_csv(inst.obs.W, dir / "W.csv");
  write_matrix_csv(inst.obs.B, dir / "B.csv");
  std::ofstream os(dir / "instance.json", std::ios::binary);
  if (!os) {
    throw Error(ErrorCode::InvalidArgument, "cannot open instance.json");
  }
  os << instance_to_json(inst).dump(2) << '\n';
}

Instance load_instance(const std::filesystem::path& json_path) {
  std::ifstream is(json_path, std::ios::binary);
  if (!is) {
    throw Error(ErrorCode::MalformedCsv, "cannot open " + json_path.string());
  }
  nlohmann::json j;
  is >> j;
  return instance_from_json(j);
}

}  // namespace mmvfacs
