#pragma once

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "umd/cell_permutation.hpp"
#include "umd/haar.hpp"
#include "umd/sign_pattern.hpp"
#include "umd/spaces.hpp"
#include "umd/step_function.hpp"

namespace umd {

using json = nlohmann::ordered_json;

/// Rounds through a 12-significant-digit decimal representation. Applied to
/// every floating-point value before it enters a document, so that dumping
/// the same data twice is byte-identical and a dump-parse cycle is exact.
inline double round12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

namespace detail {

inline json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(round12(v(i)));
  return a;
}

inline Eigen::VectorXd vector_from_json(const json& a, Eigen::Index expect) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != expect)
    throw std::invalid_argument("vector has wrong length");
  Eigen::VectorXd v(expect);
  for (Eigen::Index i = 0; i < expect; ++i) v(i) = a[static_cast<std::size_t>(i)].get<double>();
  return v;
}

}  // namespace detail

inline json json_of(const HaarExpansion<double>& x) {
  json j;
  j["dim"] = x.dimension();
  j["depth"] = x.depth();
  j["mean"] = detail::vector_to_json(x.mean());
  json coeffs = json::array();
  if (x.depth() >= 1) {
    for (const HaarIndex& idx : TreeRange(1, x.depth()).enumerate()) {
      json entry = json::array();
      entry.push_back(idx.level());
      entry.push_back(idx.position());
      entry.push_back(detail::vector_to_json(x.coefficient(idx)));
      coeffs.push_back(std::move(entry));
    }
  }
  j["coefficients"] = std::move(coeffs);
  return j;
}

inline HaarExpansion<double> expansion_from_json(const json& j) {
  const auto dim = j.at("dim").get<Eigen::Index>();
  const auto depth = j.at("depth").get<int>();
  HaarExpansion<double> x(depth, dim);
  if (j.contains("mean")) x.mean() = detail::vector_from_json(j.at("mean"), dim);
  if (j.contains("coefficients")) {
    for (const json& entry : j.at("coefficients")) {
      if (!entry.is_array() || entry.size() != 3)
        throw std::invalid_argument("coefficient entry must be [level, position, values]");
      const HaarIndex idx(entry[0].get<int>(), entry[1].get<std::int64_t>());
      if (idx.level() > depth) throw std::invalid_argument("coefficient index beyond depth");
      x.coefficient(idx) = detail::vector_from_json(entry[2], dim);
    }
  }
  return x;
}

inline json json_of(const StepFunction<double>& f) {
  json j;
  j["dim"] = f.dimension();
  j["resolution"] = f.resolution();
  json cells = json::array();
  for (Eigen::Index c = 0; c < f.num_cells(); ++c) cells.push_back(detail::vector_to_json(f.cell(c)));
  j["cells"] = std::move(cells);
  return j;
}

inline StepFunction<double> step_function_from_json(const json& j) {
  const auto dim = j.at("dim").get<Eigen::Index>();
  const auto resolution = j.at("resolution").get<int>();
  StepFunction<double> f(resolution, dim);
  const json& cells = j.at("cells");
  if (!cells.is_array() || static_cast<Eigen::Index>(cells.size()) != f.num_cells())
    throw std::invalid_argument("cell array has wrong length");
  for (Eigen::Index c = 0; c < f.num_cells(); ++c)
    f.cell(c) = detail::vector_from_json(cells[static_cast<std::size_t>(c)], dim);
  return f;
}

inline json json_of(const CellPermutation& sigma) {
  json j;
  j["resolution"] = sigma.resolution();
  j["mapping"] = sigma.mapping();
  return j;
}

inline CellPermutation permutation_from_json(const json& j) {
  return CellPermutation(j.at("resolution").get<int>(),
                         j.at("mapping").get<std::vector<std::int64_t>>());
}

inline json json_of(const SignPattern& eps) {
  json j;
  j["family"] = to_string(eps.family());
  j["depth"] = eps.depth();
  json v = json::array();
  for (const std::int8_t s : eps.values()) v.push_back(static_cast<int>(s));
  j["values"] = std::move(v);
  return j;
}

inline SignPattern sign_pattern_from_json(const json& j) {
  const SignFamily family = parse_sign_family(j.at("family").get<std::string>());
  const int depth = j.at("depth").get<int>();
  std::vector<std::int8_t> values;
  for (const json& s : j.at("values")) values.push_back(static_cast<std::int8_t>(s.get<int>()));
  return SignPattern(family, depth, std::move(values));
}

inline json json_of(const Operator<double>& T) {
  if (!T.source().is_lp() || !T.target().is_lp())
    throw std::invalid_argument("only lp-space operators can be serialized");
  json j;
  j["rows"] = T.matrix().rows();
  j["cols"] = T.matrix().cols();
  json entries = json::array();
  for (Eigen::Index r = 0; r < T.matrix().rows(); ++r)
    for (Eigen::Index c = 0; c < T.matrix().cols(); ++c) entries.push_back(round12(T.matrix()(r, c)));
  j["entries"] = std::move(entries);
  j["source"] = T.source().name();
  j["target"] = T.target().name();
  return j;
}

inline Operator<double> operator_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows < 1 || cols < 1) throw std::invalid_argument("operator must have positive dimensions");
  const json& entries = j.at("entries");
  if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != rows * cols)
    throw std::invalid_argument("entry array has wrong length");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = entries[static_cast<std::size_t>(r * cols + c)].get<double>();
  return Operator<double>(std::move(m), parse_space(j.at("source").get<std::string>()),
                          parse_space(j.at("target").get<std::string>()));
}

}  // namespace umd
