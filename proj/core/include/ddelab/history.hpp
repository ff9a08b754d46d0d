#pragma once

#include "ddelab/piecewise.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace ddelab {

enum class HistoryTag { None, Constant, Exponential, Sampled };

// Initial segment on [-1, 0].
class HistoryFunction {
 public:
  HistoryFunction() = default;
  explicit HistoryFunction(std::vector<Piece> pieces, HistoryTag tag = HistoryTag::None);

  static HistoryFunction constant(double value);
  // amplitude * exp(-rate (s + 1)) + offset; z-type starts use amplitude 1, offset 0.
  static HistoryFunction exponential(double amplitude, double rate, double offset);
  // Cubic Hermite through (mesh, values) with three-point slopes; mesh must span [-1, 0].
  static HistoryFunction from_samples(const std::vector<double>& mesh, const std::vector<double>& values);
  // Piecewise linear through samples (keeps values inside their range).
  static HistoryFunction piecewise_linear(const std::vector<double>& mesh, const std::vector<double>& values);
  // Cubic Hermite on a uniform N-cell mesh from a value and derivative callback.
  static HistoryFunction from_function(const std::function<double(double)>& f,
                                       const std::function<double(double)>& df, int cells);

  double operator()(double s) const { return value(s); }
  double value(double s) const;
  double slope(double s) const;

  HistoryTag tag() const { return tag_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  double min() const;
  double max() const;
  bool nonnegative(double tol = 0.0) const { return min() >= -tol; }

  // Values on a uniform mesh of `cells` intervals (cells + 1 nodes).
  std::vector<double> sample(int cells) const;
  double sup_distance(const HistoryFunction& other, int cells = 1000) const;

  HistoryFunction plus(const HistoryFunction& other, double scale = 1.0) const;

  nlohmann::json to_json() const;
  static HistoryFunction from_json(const nlohmann::json& j);

 private:
  const Piece& piece_at(double s) const;
  std::vector<Piece> pieces_;
  HistoryTag tag_ = HistoryTag::None;
  nlohmann::json descriptor_;
};

}  // namespace ddelab
