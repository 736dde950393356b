#pragma once

#include <cstdint>
#include <compare>
#include <vector>

#include "mca/rational.hpp"

namespace mca {

// A space-time lattice cell: x is the space coordinate i, y is the time t.
// Time points up, so "counterclockwise" has its usual meaning.
struct Cell {
  std::int64_t i = 0;
  std::int64_t t = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Point {
  Rational x;
  Rational y;
  Point() = default;
  Point(Rational px, Rational py) : x(px), y(py) {}
  Point(const Cell& c) : x(c.i), y(c.t) {}  // NOLINT
  friend bool operator==(const Point&, const Point&) = default;
  friend std::strong_ordering operator<=>(const Point& a, const Point& b) {
    if (auto c = a.x <=> b.x; c != 0) return c;
    return a.y <=> b.y;
  }
};

// Twice the signed area of (o, a, b); positive for a left turn.
Rational orient(const Point& o, const Point& a, const Point& b);

bool on_segment(const Point& p, const Point& a, const Point& b);

// Points where the closed segments ab and cd meet: none, one, or the two ends
// of a collinear overlap.
std::vector<Point> segment_contacts(const Point& a, const Point& b, const Point& c,
                                    const Point& d);

// A region is the closed set bounded by a cyclic list of lattice points: the
// points of nonzero winding number together with the cycle's own edges. One
// point is a dot, two points a segment.
using Cycle = std::vector<Cell>;

bool in_region(const Cycle& cycle, const Point& p);
bool segment_in_region(const Cycle& cycle, const Point& a, const Point& b);
// Exact for regions without holes, which is all this library produces.
bool triangle_in_region(const Cycle& cycle, const Point& a, const Point& b, const Point& c);
bool regions_intersect(const Cycle& a, const Cycle& b);
// Whether the borders (cycle edges) of two regions share a point.
bool borders_meet(const Cycle& a, const Cycle& b);

// Twice the signed area of the cycle.
Rational signed_area2(const Cycle& cycle);

// Counterclockwise walk around the outer face of the arrangement formed by the
// edges of the given cycles (split at every contact). Starts at the lowest
// point, leftmost among ties. Dead ends are walked out and back. Returns every
// arrangement vertex passed, crossings included. The cycles must form one
// connected set.
std::vector<Point> outer_walk(const std::vector<Cycle>& cycles);

// The outer walk restricted to the given cycles' own points, with repeats in
// a row collapsed. This is the border list of the hole-filled union.
Cycle outer_border(const std::vector<Cycle>& cycles);

}  // namespace mca
