#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace ddelab {

// u(t) = expo * exp(-rate (t - t0)) + sum_i poly[i] (t - t0)^i on [t0, t1].
struct Piece {
  double t0 = 0.0;
  double t1 = 0.0;
  double rate = 0.0;
  double expo = 0.0;
  std::array<double, 4> poly{0.0, 0.0, 0.0, 0.0};

  double value(double t) const;
  double slope(double t) const;
  Piece restricted(double a, double b) const;
  Piece shifted(double dt) const;
  Piece scaled(double factor) const;

  static Piece constant(double t0, double t1, double v);
  static Piece linear(double t0, double t1, double v0, double v1);
  static Piece hermite(double t0, double t1, double v0, double d0, double v1, double d1);
};

// Direction of a level crossing.
enum class CrossingDirection { Up, Down };

struct Crossing {
  double t;
  CrossingDirection direction;
};

// Contiguous sequence of pieces with O(1) lookup through a uniform cell index.
class PiecewiseFunction {
 public:
  PiecewiseFunction() = default;
  PiecewiseFunction(double origin, double cell_width);

  void append(const Piece& p);
  void reserve(std::size_t n) { pieces_.reserve(n); }

  bool empty() const { return pieces_.empty(); }
  double t_begin() const { return pieces_.front().t0; }
  double t_end() const { return pieces_.back().t1; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  double cell_width() const { return width_; }

  // Index of a piece containing t; ties at joints go to the right piece.
  std::size_t locate(double t) const;
  double value(double t) const;
  double slope(double t) const;

  // Pieces covering [a, b], clipped to it.
  std::vector<Piece> slice(double a, double b) const;

  double max_on(double a, double b) const;
  double min_on(double a, double b) const;

  std::vector<Crossing> crossings(double level, double a, double b) const;

 private:
  double origin_ = -1.0;
  double width_ = 0.005;
  std::vector<Piece> pieces_;
  std::vector<std::size_t> first_;  // first piece touching each cell
};

// Crossings of a level by a single piece given a known sign to its left.
// Appends located times; updates last_sign (+1/-1, 0 if unknown).
void scan_piece_crossings(const Piece& p, double level, int& last_sign, double& last_t,
                          std::vector<Crossing>& out);

}  // namespace ddelab
