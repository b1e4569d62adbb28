#pragma once

// JSON conversion for the dense algebra types.

#include "prlab/linalg.hpp"

#include <nlohmann/json.hpp>

namespace prlab {

inline nlohmann::json vec_to_json(const Vec& v) {
  nlohmann::json j = nlohmann::json::array();
  for (int k = 0; k < v.size(); ++k) j.push_back(v(k));
  return j;
}

inline nlohmann::json vec_to_json(const Vec2& v) { return {v.x(), v.y()}; }

inline Vec vec_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || j.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("expected a numeric array of length 1.." + std::to_string(kMaxDim));
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j.at(k).get<double>();
  return v;
}

inline Vec2 vec2_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a 2-vector");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

/// Row-major nested arrays.
inline nlohmann::json mat_to_json(const Mat& m) {
  nlohmann::json j = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

inline Mat mat_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || j.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("expected a nested numeric array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  if (cols == 0 || cols > kMaxDim) throw std::invalid_argument("bad matrix width");
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw std::invalid_argument("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

}  // namespace prlab
