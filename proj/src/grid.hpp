#pragma once

#include <span>
#include <vector>

namespace mmdp {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

bool same_point(const Position& a, const Position& b, double eps = 1e-6);

/// Rectangular street grid. Intersections sit at integer multiples of
/// cell_size and vehicles travel along the streets at a constant speed.
/// Positions may lie anywhere on a street, not just at intersections.
class GridMap {
 public:
  GridMap(int rows, int cols, double cell_size, double speed);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double cell_size() const { return cell_size_; }
  double speed() const { return speed_; }
  double width() const { return (cols_ - 1) * cell_size_; }
  double height() const { return (rows_ - 1) * cell_size_; }

  int num_nodes() const { return rows_ * cols_; }
  int node_index(int row, int col) const { return row * cols_ + col; }
  Position node(int index) const;
  Position node(int row, int col) const;

  bool on_grid(const Position& p) const;
  /// Rounds coordinates that are within tolerance of an intersection line
  /// onto it; throws if the result is not on the street graph.
  Position snap(const Position& p) const;

  /// Shortest-path street distance in meters.
  double distance(const Position& a, const Position& b) const;
  /// Shortest-path travel time in seconds.
  double travel_time(const Position& a, const Position& b) const;
  /// travel_time(a, via) + travel_time(via, b).
  double travel_time_via(const Position& a, const Position& via, const Position& b) const;

  /// Waypoints of a shortest path from a to b, both endpoints included.
  /// Ties between equal-length paths take x-legs before y-legs.
  std::vector<Position> shortest_path(const Position& a, const Position& b) const;

  /// Corner-to-corner travel time; coarse scale of the map.
  double diameter_seconds() const { return (width() + height()) / speed_; }

 private:
  struct Anchor {
    Position node;
    double offset;  // street distance from the position to this node
  };
  int anchors(const Position& p, Anchor out[2]) const;
  bool on_line(double v) const;

  int rows_;
  int cols_;
  double cell_size_;
  double speed_;
  double eps_;
};

/// Mean shortest-path distance over all unordered pairs. Needs >= 2 points.
double mean_pairwise_distance(const GridMap& map, std::span<const Position> positions);

}  // namespace mmdp
