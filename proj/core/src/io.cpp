#include "frechet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace frechet {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

[[noreturn]] void data_error(const std::string& what) { throw Error(ErrorCode::DataFormat, what); }

void require_columns(const CsvTable& t, std::size_t min_cols, const char* what) {
  if (t.rows.empty()) data_error("data file has no rows");
  if (t.columns() < min_cols) {
    std::ostringstream msg;
    msg << what << ": need at least " << min_cols << " columns, got " << t.columns();
    data_error(msg.str());
  }
}

Eigen::MatrixXd predictor_block(const CsvTable& t, int p) {
  if (p < 1) data_error("number of predictor columns must be positive");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(t.rows.size()), p);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (int j = 0; j < p; ++j) x(static_cast<Eigen::Index>(i), j) = t.rows[i][static_cast<std::size_t>(j)];
  return x;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split(t, ',');
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t j = 0; j < cells.size() && numeric; ++j) numeric = parse_double(cells[j], row[j]);
    if (!numeric) {
      if (table.rows.empty() && table.header.empty()) {
        table.header = cells;
        continue;
      }
      data_error("non-numeric value on line " + std::to_string(line_no));
    }
    if (!table.rows.empty() && row.size() != table.rows.front().size())
      data_error("ragged row on line " + std::to_string(line_no));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) data_error("cannot open " + path.string());
  return read_csv(in);
}

Dataset<Eigen::VectorXd> vector_dataset(const CsvTable& table, int p) {
  require_columns(table, static_cast<std::size_t>(p) + 1, "vector data");
  Dataset<Eigen::VectorXd> d;
  d.predictors = predictor_block(table, p);
  const auto m = static_cast<Eigen::Index>(table.columns()) - p;
  for (const auto& row : table.rows) {
    Eigen::VectorXd y(m);
    for (Eigen::Index j = 0; j < m; ++j) y[j] = row[static_cast<std::size_t>(p + j)];
    d.responses.push_back(std::move(y));
  }
  return d;
}

Dataset<QuantileFunction> quantile_dataset(const CsvTable& table, int p, int grid_size) {
  require_columns(table, static_cast<std::size_t>(p) + 1, "quantile data");
  const auto m = static_cast<int>(table.columns()) - p;
  if (grid_size > 0 && m != grid_size) {
    std::ostringstream msg;
    msg << "declared quantile grid has " << grid_size << " levels but the file has " << m << " quantile columns";
    throw Error(ErrorCode::GridMismatch, msg.str());
  }
  Dataset<QuantileFunction> d;
  d.predictors = predictor_block(table, p);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    Eigen::VectorXd q(m);
    for (int j = 0; j < m; ++j) q[j] = table.rows[i][static_cast<std::size_t>(p + j)];
    try {
      d.responses.emplace_back(std::move(q));
    } catch (const Error& e) {
      data_error("row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return d;
}

Dataset<CorrMatrix> correlation_dataset(const CsvTable& table, int p, int r) {
  require_columns(table, static_cast<std::size_t>(p) + 1, "correlation data");
  const auto entries = static_cast<int>(table.columns()) - p;
  if (r == 0) {
    while (r * (r - 1) / 2 < entries) ++r;
  }
  if (r * (r - 1) / 2 != entries) {
    std::ostringstream msg;
    msg << entries << " correlation columns do not form the upper triangle of an r x r matrix";
    data_error(msg.str());
  }
  Dataset<CorrMatrix> d;
  d.predictors = predictor_block(table, p);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::span<const double> row(table.rows[i]);
    try {
      d.responses.push_back(CorrMatrix::from_upper_triangle(row.subspan(static_cast<std::size_t>(p)), r));
    } catch (const Error& e) {
      data_error("row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return d;
}

Dataset<UnitVector> sphere_dataset(const CsvTable& table, int p) {
  require_columns(table, static_cast<std::size_t>(p) + 3, "sphere data");
  if (table.columns() != static_cast<std::size_t>(p) + 3) data_error("sphere data needs exactly 3 coordinate columns");
  Dataset<UnitVector> d;
  d.predictors = predictor_block(table, p);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto sp = static_cast<std::size_t>(p);
    try {
      d.responses.emplace_back(row[sp], row[sp + 1], row[sp + 2]);
    } catch (const Error& e) {
      data_error("row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return d;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::json parse_toml_value(const std::string& raw, std::size_t line_no) {
  const std::string v = trim(raw);
  if (v.empty()) data_error("empty TOML value on line " + std::to_string(line_no));
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') data_error("unterminated string on line " + std::to_string(line_no));
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '[') {
    if (v.back() != ']') data_error("unterminated array on line " + std::to_string(line_no));
    nlohmann::json arr = nlohmann::json::array();
    const std::string body = trim(v.substr(1, v.size() - 2));
    if (body.empty()) return arr;
    for (const auto& item : split(body, ','))
      if (!item.empty()) arr.push_back(parse_toml_value(item, line_no));
    return arr;
  }
  std::string digits;
  for (char c : v)
    if (c != '_') digits.push_back(c);
  const bool integral = digits.find_first_of(".eE") == std::string::npos;
  if (integral) {
    long long i = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return i;
  }
  double d = 0.0;
  if (parse_double(digits, d)) return d;
  data_error("cannot parse TOML value '" + v + "' on line " + std::to_string(line_no));
}

}  // namespace

nlohmann::json parse_toml_subset(std::istream& in) {
  nlohmann::json doc = nlohmann::json::object();
  nlohmann::json* table = &doc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = line;
    bool in_string = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == '"') in_string = !in_string;
      if (t[i] == '#' && !in_string) {
        t.resize(i);
        break;
      }
    }
    t = trim(t);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') data_error("bad table header on line " + std::to_string(line_no));
      const std::string name = trim(t.substr(1, t.size() - 2));
      doc[name] = nlohmann::json::object();
      table = &doc[name];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) data_error("expected key = value on line " + std::to_string(line_no));
    (*table)[trim(t.substr(0, eq))] = parse_toml_value(t.substr(eq + 1), line_no);
  }
  return doc;
}

nlohmann::json load_config_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) data_error("cannot open " + path.string());
  if (path.extension() == ".toml") return parse_toml_subset(in);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    data_error(path.string() + ": " + e.what());
  }
}

}  // namespace frechet
