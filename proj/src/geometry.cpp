#include "mca/geometry.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

namespace mca {

namespace {

Rational cross(const Rational& ax, const Rational& ay, const Rational& bx, const Rational& by) {
  return ax * by - ay * bx;
}

std::vector<std::pair<Point, Point>> edges_of(const Cycle& cycle) {
  std::vector<std::pair<Point, Point>> out;
  if (cycle.size() == 1) {
    out.push_back({cycle[0], cycle[0]});
  } else if (cycle.size() == 2) {
    out.push_back({cycle[0], cycle[1]});
  } else {
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      out.push_back({cycle[k], cycle[(k + 1) % cycle.size()]});
    }
  }
  return out;
}

int winding_number(const Cycle& cycle, const Point& p) {
  int wn = 0;
  const std::size_t n = cycle.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = cycle[k];
    const Point b = cycle[(k + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && orient(a, b, p) > 0) ++wn;
    } else if (b.y <= p.y && orient(a, b, p) < 0) {
      --wn;
    }
  }
  return wn;
}

// Position of p along segment ab, assuming p lies on the line through it.
Rational param(const Point& p, const Point& a, const Point& b) {
  if (a.x != b.x) return (p.x - a.x) / (b.x - a.x);
  return (p.y - a.y) / (b.y - a.y);
}

Point lerp(const Point& a, const Point& b, const Rational& s) {
  return {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
}

// Sorting key for directions out of a vertex: counterclockwise from east.
bool angle_less(const Point& d1, const Point& d2) {
  auto half = [](const Point& d) { return (d.y > 0 || (d.y == 0 && d.x > 0)) ? 0 : 1; };
  const int h1 = half(d1), h2 = half(d2);
  if (h1 != h2) return h1 < h2;
  return cross(d1.x, d1.y, d2.x, d2.y) > 0;
}

bool lower_left(const Point& a, const Point& b) {
  if (a.y != b.y) return a.y < b.y;
  return a.x < b.x;
}

}  // namespace

Rational orient(const Point& o, const Point& a, const Point& b) {
  return cross(a.x - o.x, a.y - o.y, b.x - o.x, b.y - o.y);
}

bool on_segment(const Point& p, const Point& a, const Point& b) {
  if (orient(a, b, p) != 0) return false;
  return min(a.x, b.x) <= p.x && p.x <= max(a.x, b.x) && min(a.y, b.y) <= p.y &&
         p.y <= max(a.y, b.y);
}

std::vector<Point> segment_contacts(const Point& a, const Point& b, const Point& c,
                                    const Point& d) {
  if (a == b) return on_segment(a, c, d) ? std::vector<Point>{a} : std::vector<Point>{};
  if (c == d) return on_segment(c, a, b) ? std::vector<Point>{c} : std::vector<Point>{};
  const Rational rx = b.x - a.x, ry = b.y - a.y;
  const Rational sx = d.x - c.x, sy = d.y - c.y;
  const Rational qx = c.x - a.x, qy = c.y - a.y;
  const Rational denom = cross(rx, ry, sx, sy);
  if (denom != 0) {
    const Rational s = cross(qx, qy, sx, sy) / denom;
    const Rational u = cross(qx, qy, rx, ry) / denom;
    if (s < 0 || s > 1 || u < 0 || u > 1) return {};
    return {lerp(a, b, s)};
  }
  if (cross(qx, qy, rx, ry) != 0) return {};
  std::vector<Point> out;
  for (const Point& p : {a, b}) {
    if (on_segment(p, c, d)) out.push_back(p);
  }
  for (const Point& p : {c, d}) {
    if (on_segment(p, a, b)) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool in_region(const Cycle& cycle, const Point& p) {
  if (cycle.empty()) return false;
  for (const auto& [a, b] : edges_of(cycle)) {
    if (a == b ? p == a : on_segment(p, a, b)) return true;
  }
  return cycle.size() >= 3 && winding_number(cycle, p) != 0;
}

bool segment_in_region(const Cycle& cycle, const Point& a, const Point& b) {
  if (a == b) return in_region(cycle, a);
  // Between consecutive border contacts the segment is wholly in or out.
  std::vector<Rational> cuts{Rational(0), Rational(1)};
  for (const auto& [c, d] : edges_of(cycle)) {
    for (const Point& p : segment_contacts(a, b, c, d)) cuts.push_back(param(p, a, b));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    if (!in_region(cycle, lerp(a, b, cuts[k]))) return false;
    if (k + 1 < cuts.size() &&
        !in_region(cycle, lerp(a, b, (cuts[k] + cuts[k + 1]) / Rational(2)))) {
      return false;
    }
  }
  return true;
}

bool triangle_in_region(const Cycle& cycle, const Point& a, const Point& b, const Point& c) {
  if (!segment_in_region(cycle, a, b) || !segment_in_region(cycle, b, c) ||
      !segment_in_region(cycle, c, a)) {
    return false;
  }
  const Point centroid{(a.x + b.x + c.x) / Rational(3), (a.y + b.y + c.y) / Rational(3)};
  return in_region(cycle, centroid);
}

bool regions_intersect(const Cycle& a, const Cycle& b) {
  if (a.empty() || b.empty()) return false;
  if (borders_meet(a, b)) return true;
  return in_region(b, Point(a[0])) || in_region(a, Point(b[0]));
}

bool borders_meet(const Cycle& a, const Cycle& b) {
  for (const auto& [p, q] : edges_of(a)) {
    for (const auto& [r, s] : edges_of(b)) {
      if (!segment_contacts(p, q, r, s).empty()) return true;
    }
  }
  return false;
}

Rational signed_area2(const Cycle& cycle) {
  Rational sum = 0;
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    const Cell& p = cycle[k];
    const Cell& q = cycle[(k + 1) % cycle.size()];
    sum += Rational(p.i * q.t - q.i * p.t);
  }
  return sum;
}

std::vector<Point> outer_walk(const std::vector<Cycle>& cycles) {
  std::vector<std::pair<Point, Point>> segments;
  std::vector<Point> dots;
  for (const Cycle& cycle : cycles) {
    for (auto [p, q] : edges_of(cycle)) {
      if (p == q) {
        dots.push_back(p);
        continue;
      }
      if (q < p) std::swap(p, q);
      segments.push_back({p, q});
    }
  }
  std::sort(segments.begin(), segments.end());
  segments.erase(std::unique(segments.begin(), segments.end()), segments.end());

  std::set<std::pair<Point, Point>> pieces;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& [a, b] = segments[k];
    std::vector<Point> cuts{a, b};
    for (std::size_t l = 0; l < segments.size(); ++l) {
      if (l == k) continue;
      for (const Point& p : segment_contacts(a, b, segments[l].first, segments[l].second)) {
        cuts.push_back(p);
      }
    }
    for (const Point& p : dots) {
      if (on_segment(p, a, b)) cuts.push_back(p);
    }
    // collinear points sort along the segment lexicographically
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) pieces.insert({cuts[c], cuts[c + 1]});
  }

  std::map<Point, std::vector<Point>> adjacent;
  for (const auto& [p, q] : pieces) {
    adjacent[p].push_back(q);
    adjacent[q].push_back(p);
  }
  for (const Point& p : dots) adjacent[p];
  if (adjacent.empty()) throw std::invalid_argument("outer walk of an empty arrangement");
  for (auto& [v, list] : adjacent) {
    std::sort(list.begin(), list.end(), [&](const Point& p, const Point& q) {
      return angle_less({p.x - v.x, p.y - v.y}, {q.x - v.x, q.y - v.y});
    });
  }

  // connectivity
  std::set<Point> seen{adjacent.begin()->first};
  std::queue<Point> frontier;
  frontier.push(adjacent.begin()->first);
  while (!frontier.empty()) {
    const Point v = frontier.front();
    frontier.pop();
    for (const Point& w : adjacent[v]) {
      if (seen.insert(w).second) frontier.push(w);
    }
  }
  if (seen.size() != adjacent.size()) {
    throw std::invalid_argument("outer walk of a disconnected arrangement");
  }

  Point start = adjacent.begin()->first;
  for (const auto& [v, list] : adjacent) {
    if (lower_left(v, start)) start = v;
  }
  if (adjacent[start].empty()) return {start};

  // Nothing lies below the start, so its first neighbour by angle keeps the
  // outside on the right.
  const Point first = adjacent[start].front();
  std::vector<Point> walk;
  Point prev = start, cur = first;
  do {
    walk.push_back(prev);
    const auto& list = adjacent[cur];
    const auto at = std::find(list.begin(), list.end(), prev) - list.begin();
    const Point next = list[static_cast<std::size_t>(at + 1) % list.size()];
    prev = cur;
    cur = next;
  } while (!(prev == start && cur == first));
  return walk;
}

Cycle outer_border(const std::vector<Cycle>& cycles) {
  std::set<Cell> own;
  for (const Cycle& c : cycles) own.insert(c.begin(), c.end());
  Cycle out;
  for (const Point& p : outer_walk(cycles)) {
    if (!p.x.is_integer() || !p.y.is_integer()) continue;
    const Cell cell{p.x.num(), p.y.num()};
    if (!own.count(cell)) continue;
    if (!out.empty() && out.back() == cell) continue;
    out.push_back(cell);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

}  // namespace mca
