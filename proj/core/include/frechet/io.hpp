#ifndef FRECHET_IO_HPP
#define FRECHET_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "frechet/correlation.hpp"
#include "frechet/predictors.hpp"
#include "frechet/sphere.hpp"
#include "frechet/wasserstein.hpp"

namespace frechet {

/// Numeric CSV table. A first line that does not parse as numbers is kept as
/// the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t columns() const { return rows.empty() ? header.size() : rows.front().size(); }
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

template <class Object>
struct Dataset {
  Eigen::MatrixXd predictors;
  std::vector<Object> responses;
};

/// p predictor columns followed by m response columns.
Dataset<Eigen::VectorXd> vector_dataset(const CsvTable& table, int p);
/// p predictor columns followed by M quantile values on the (j - 1/2)/M grid.
/// When grid_size > 0 the column count must match it.
Dataset<QuantileFunction> quantile_dataset(const CsvTable& table, int p, int grid_size = 0);
/// p predictor columns followed by the r(r-1)/2 strict upper-triangle entries
/// in row-major order. When r == 0 it is inferred from the column count.
Dataset<CorrMatrix> correlation_dataset(const CsvTable& table, int p, int r = 0);
/// p predictor columns followed by 3 coordinates, renormalised on read.
Dataset<UnitVector> sphere_dataset(const CsvTable& table, int p);

/// Reads a flat TOML document (key = value pairs, one level of [tables],
/// numbers, strings, booleans and single-line arrays) into JSON.
nlohmann::json parse_toml_subset(std::istream& in);

/// Loads JSON, or the TOML subset when the extension is .toml.
nlohmann::json load_config_document(const std::filesystem::path& path);

}  // namespace frechet

#endif  // FRECHET_IO_HPP
