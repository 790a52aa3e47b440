#ifndef ANGEMB_IO_HPP
#define ANGEMB_IO_HPP

/**
 * @file io.hpp
 * @brief CSV data files (rows = samples) and JSON model/trim reports.
 *
 * Doubles are written in shortest round-trip form so a model re-loaded from
 * JSON reproduces reconstructions bit-for-bit.
 */

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

#include "json.hpp"

#include "angemb/frames.hpp"
#include "angemb/model.hpp"

namespace angemb {

using Json = nlohmann::ordered_json;

// ---- CSV -------------------------------------------------------------------

/// Parses CSV with one sample per row; blank lines and '#' lines are skipped.
inline DataMatrix parse_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    std::size_t lead = 0;
    while (lead < line.size() && (line[lead] == ' ' || line[lead] == '\t')) ++lead;
    line.remove_prefix(lead);
    if (line.empty() || line.front() == '#') continue;

    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error(ErrorCode::InvalidData, "CSV line " + std::to_string(line_no) + ": cannot parse '" +
                                                std::string(field) + "'");
      }
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::InvalidData, "CSV line " + std::to_string(line_no) + " has " +
                                              std::to_string(row.size()) + " fields, expected " +
                                              std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "CSV contains no samples");

  const Index D = static_cast<Index>(rows.front().size());
  Eigen::MatrixXd values(D, static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (Index i = 0; i < D; ++i) values(i, static_cast<Index>(j)) = rows[j][static_cast<std::size_t>(i)];
  }
  return DataMatrix(std::move(values));
}

inline DataMatrix read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

inline void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

/// One line per column of `x`.
inline std::string format_csv(const Eigen::MatrixXd& x) {
  std::string out;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      if (i) out += ',';
      append_double(out, x(i, j));
    }
    out += '\n';
  }
  return out;
}

inline void write_csv(const std::filesystem::path& path, const Eigen::MatrixXd& x) {
  write_file_atomic(path, format_csv(x));
}

// ---- JSON ------------------------------------------------------------------

inline Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Json to_json(const IndexList& v) {
  Json a = Json::array();
  for (Index i : v) a.push_back(i);
  return a;
}

/// Columns of `m` as nested arrays.
inline Json columns_to_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Index j = 0; j < m.cols(); ++j) a.push_back(to_json(Eigen::VectorXd(m.col(j))));
  return a;
}

inline Json to_json(const TrimReport& r) {
  Json j;
  j["eta_theta"] = r.eta_theta;
  j["tau_min"] = r.tau_min;
  j["pivot"] = r.pivot;
  j["outliers"] = to_json(r.outliers);
  j["n_inliers"] = static_cast<Index>(r.inliers.size());
  return j;
}

inline Json to_json(const FitModel& m) {
  Json j;
  j["method"] = std::string(to_string(m.method));
  j["d"] = m.d();
  j["D"] = m.D();
  j["mean"] = to_json(m.mean);
  j["basis"] = columns_to_json(m.subspace.basis);
  j["eigenvalues"] = to_json(m.subspace.eigenvalues);
  if (m.trim) j["trim"] = to_json(*m.trim);
  return j;
}

namespace detail {

inline Eigen::VectorXd vector_from_json(const Json& a, Index expected, const char* what) {
  if (!a.is_array() || static_cast<Index>(a.size()) != expected) {
    throw Error(ErrorCode::InvalidData, std::string("model JSON: '") + what + "' must be an array of length " +
                                            std::to_string(expected));
  }
  Eigen::VectorXd v(expected);
  for (Index i = 0; i < expected; ++i) v[i] = a[static_cast<std::size_t>(i)].get<double>();
  return v;
}

}  // namespace detail

inline TrimReport trim_from_json(const Json& j) {
  TrimReport r;
  r.eta_theta = j.at("eta_theta").get<double>();
  r.cos_threshold = std::cos(r.eta_theta);
  r.tau_min = j.at("tau_min").get<Index>();
  r.pivot = j.at("pivot").get<Index>();
  r.outliers = j.at("outliers").get<IndexList>();
  const Index n_inliers = j.at("n_inliers").get<Index>();
  const Index m = n_inliers + static_cast<Index>(r.outliers.size());
  auto next = r.outliers.begin();
  for (Index k = 0; k < m; ++k) {
    if (next != r.outliers.end() && *next == k) {
      ++next;
    } else {
      r.inliers.push_back(k);
    }
  }
  return r;
}

inline FitModel model_from_json(const Json& j) {
  try {
    FitModel m;
    m.method = parse_method(j.at("method").get<std::string>());
    const Index d = j.at("d").get<Index>();
    const Index D = j.at("D").get<Index>();
    if (d < 1 || D < 1 || d > D) throw Error(ErrorCode::InvalidData, "model JSON: bad d/D");
    m.mean = detail::vector_from_json(j.at("mean"), D, "mean");
    const Json& basis = j.at("basis");
    if (!basis.is_array() || static_cast<Index>(basis.size()) != d) {
      throw Error(ErrorCode::InvalidData, "model JSON: 'basis' must hold d columns");
    }
    m.subspace.basis.resize(D, d);
    for (Index c = 0; c < d; ++c) {
      m.subspace.basis.col(c) = detail::vector_from_json(basis[static_cast<std::size_t>(c)], D, "basis column");
    }
    m.subspace.eigenvalues = detail::vector_from_json(j.at("eigenvalues"), d, "eigenvalues");
    if (j.contains("trim")) m.trim = trim_from_json(j.at("trim"));
    if ((m.method == Method::Tae) != m.trim.has_value()) {
      throw Error(ErrorCode::InvalidData, "model JSON: 'trim' must be present exactly for tae");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidData, std::string("model JSON: ") + e.what());
  }
}

inline FitModel parse_model(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidData, std::string("model JSON: ") + e.what());
  }
  return model_from_json(j);
}

inline FitModel read_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

inline void write_json(const std::filesystem::path& path, const Json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

}  // namespace angemb

#endif  // ANGEMB_IO_HPP
