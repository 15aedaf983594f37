#include "grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmdp {

bool same_point(const Position& a, const Position& b, double eps) {
  return std::abs(a.x - b.x) <= eps && std::abs(a.y - b.y) <= eps;
}

GridMap::GridMap(int rows, int cols, double cell_size, double speed)
    : rows_(rows), cols_(cols), cell_size_(cell_size), speed_(speed) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("grid needs at least 2x2 intersections");
  if (cell_size <= 0.0) throw std::invalid_argument("cell_size must be positive");
  if (speed <= 0.0) throw std::invalid_argument("speed must be positive");
  eps_ = 1e-6;
}

Position GridMap::node(int index) const {
  if (index < 0 || index >= num_nodes()) throw std::out_of_range("node index out of range");
  return node(index / cols_, index % cols_);
}

Position GridMap::node(int row, int col) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_)
    throw std::out_of_range("node coordinates out of range");
  return Position{col * cell_size_, row * cell_size_};
}

bool GridMap::on_line(double v) const {
  return std::abs(v - std::round(v / cell_size_) * cell_size_) <= eps_;
}

bool GridMap::on_grid(const Position& p) const {
  if (p.x < -eps_ || p.x > width() + eps_) return false;
  if (p.y < -eps_ || p.y > height() + eps_) return false;
  return on_line(p.x) || on_line(p.y);
}

Position GridMap::snap(const Position& p) const {
  if (!on_grid(p)) throw std::invalid_argument("position is not on the street graph");
  Position q = p;
  if (on_line(q.x)) q.x = std::round(q.x / cell_size_) * cell_size_;
  if (on_line(q.y)) q.y = std::round(q.y / cell_size_) * cell_size_;
  q.x = std::clamp(q.x, 0.0, width());
  q.y = std::clamp(q.y, 0.0, height());
  return q;
}

// Nearest intersections along the position's street, with street offsets.
// A position at an intersection has a single zero-offset anchor.
int GridMap::anchors(const Position& p, Anchor out[2]) const {
  const bool nx = on_line(p.x);
  const bool ny = on_line(p.y);
  if (nx && ny) {
    out[0] = Anchor{Position{std::round(p.x / cell_size_) * cell_size_,
                             std::round(p.y / cell_size_) * cell_size_},
                    0.0};
    return 1;
  }
  if (ny) {  // on a horizontal street between two intersections
    const double y = std::round(p.y / cell_size_) * cell_size_;
    const double x0 = std::floor(p.x / cell_size_) * cell_size_;
    out[0] = Anchor{Position{x0, y}, p.x - x0};
    out[1] = Anchor{Position{x0 + cell_size_, y}, x0 + cell_size_ - p.x};
    return 2;
  }
  // on a vertical street
  const double x = std::round(p.x / cell_size_) * cell_size_;
  const double y0 = std::floor(p.y / cell_size_) * cell_size_;
  out[0] = Anchor{Position{x, y0}, p.y - y0};
  out[1] = Anchor{Position{x, y0 + cell_size_}, y0 + cell_size_ - p.y};
  return 2;
}

namespace {

double manhattan(const Position& a, const Position& b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

// Both points on the same street segment (no intersection strictly between
// them), so the direct leg along the street is admissible.
bool same_segment(const Position& a, const Position& b, double cell, double eps) {
  if (std::abs(a.y - b.y) <= eps &&
      std::abs(a.y - std::round(a.y / cell) * cell) <= eps) {
    const double lo = std::min(a.x, b.x), hi = std::max(a.x, b.x);
    const double seg = std::floor((lo + eps) / cell);
    return hi <= (seg + 1.0) * cell + eps;
  }
  if (std::abs(a.x - b.x) <= eps &&
      std::abs(a.x - std::round(a.x / cell) * cell) <= eps) {
    const double lo = std::min(a.y, b.y), hi = std::max(a.y, b.y);
    const double seg = std::floor((lo + eps) / cell);
    return hi <= (seg + 1.0) * cell + eps;
  }
  return false;
}

}  // namespace

double GridMap::distance(const Position& a, const Position& b) const {
  if (!on_grid(a) || !on_grid(b)) throw std::invalid_argument("position is not on the street graph");
  Anchor aa[2], ab[2];
  const int na = anchors(a, aa);
  const int nb = anchors(b, ab);
  double best = std::numeric_limits<double>::infinity();
  if (same_segment(a, b, cell_size_, eps_)) best = manhattan(a, b);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      // Intersection-to-intersection distance on a full grid is Manhattan.
      const double d = aa[i].offset + manhattan(aa[i].node, ab[j].node) + ab[j].offset;
      best = std::min(best, d);
    }
  return std::max(best, 0.0);
}

double GridMap::travel_time(const Position& a, const Position& b) const {
  return distance(a, b) / speed_;
}

double GridMap::travel_time_via(const Position& a, const Position& via, const Position& b) const {
  return travel_time(a, via) + travel_time(via, b);
}

std::vector<Position> GridMap::shortest_path(const Position& a, const Position& b) const {
  const Position sa = snap(a);
  const Position sb = snap(b);
  std::vector<Position> path;
  path.push_back(sa);
  if (same_point(sa, sb, eps_)) return path;

  if (same_segment(sa, sb, cell_size_, eps_)) {
    Anchor aa[2], ab[2];
    const int na = anchors(sa, aa);
    const int nb = anchors(sb, ab);
    double around = std::numeric_limits<double>::infinity();
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j)
        around = std::min(around, aa[i].offset + manhattan(aa[i].node, ab[j].node) + ab[j].offset);
    if (manhattan(sa, sb) <= around + eps_) {
      path.push_back(sb);
      return path;
    }
  }

  Anchor aa[2], ab[2];
  const int na = anchors(sa, aa);
  const int nb = anchors(sb, ab);
  double best = std::numeric_limits<double>::infinity();
  int bi = 0, bj = 0;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      const double d = aa[i].offset + manhattan(aa[i].node, ab[j].node) + ab[j].offset;
      if (d < best - eps_) {
        best = d;
        bi = i;
        bj = j;
      }
    }
  const Position entry = aa[bi].node;
  const Position exit = ab[bj].node;
  auto push = [&](const Position& p) {
    if (!same_point(path.back(), p, eps_)) path.push_back(p);
  };
  push(entry);
  // x-legs before y-legs between intersections
  push(Position{exit.x, entry.y});
  push(exit);
  push(sb);
  return path;
}

double mean_pairwise_distance(const GridMap& map, std::span<const Position> positions) {
  if (positions.size() < 2) throw std::invalid_argument("need at least two positions");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      sum += map.distance(positions[i], positions[j]);
      ++pairs;
    }
  return sum / static_cast<double>(pairs);
}

}  // namespace mmdp
