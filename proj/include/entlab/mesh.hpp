#pragma once

// Triangulated surfaces with constant curvature on each face, stored as
// half-edge arrays. Face f owns half-edges 3f, 3f+1, 3f+2; half-edge 3f+i runs
// from corner i to corner i+1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entlab/core.hpp"
#include "entlab/hypgeom.hpp"
#include "entlab/random.hpp"
#include "json.hpp"

namespace entlab {

struct ConeData {
  std::vector<double> angles;  // total angle at each vertex

  double excess() const {
    double e = 0.0;
    for (double a : angles) e += a - two_pi;
    return e;
  }
};

class TriangulatedSurface {
 public:
  TriangulatedSurface() = default;

  /// faces: corner vertices; edges: edge id of half-edge 3f+i.
  static TriangulatedSurface from_faces(int vertex_count, const std::vector<std::array<int, 3>>& faces,
                                        const std::vector<std::array<int, 3>>& edges,
                                        std::vector<double> edge_lengths, std::vector<double> face_curvatures) {
    require(faces.size() == edges.size() && faces.size() == face_curvatures.size(),
            "face, edge and curvature arrays must have one entry per face");
    TriangulatedSurface s;
    s.vertex_count_ = vertex_count;
    s.edge_length_ = std::move(edge_lengths);
    s.face_curvature_ = std::move(face_curvatures);
    const std::size_t H = 3 * faces.size();
    s.origin_.resize(H);
    s.edge_.resize(H);
    s.twin_.assign(H, -1);
    std::vector<std::vector<int>> by_edge(s.edge_length_.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
      for (int i = 0; i < 3; ++i) {
        const int h = static_cast<int>(3 * f) + i;
        const int v = faces[f][i];
        const int e = edges[f][i];
        require(v >= 0 && v < vertex_count, "face references an unknown vertex");
        require(e >= 0 && e < static_cast<int>(s.edge_length_.size()), "face references an unknown edge");
        s.origin_[h] = v;
        s.edge_[h] = e;
        by_edge[e].push_back(h);
      }
    }
    for (std::size_t e = 0; e < by_edge.size(); ++e) {
      require(by_edge[e].size() == 2, "every edge must be shared by exactly two half-edges");
      const int a = by_edge[e][0], b = by_edge[e][1];
      require(s.origin_[a] == s.dest(b) && s.origin_[b] == s.dest(a), "twin half-edges must run in opposite directions");
      s.twin_[a] = b;
      s.twin_[b] = a;
      require(s.edge_length_[e] > 0.0 && std::isfinite(s.edge_length_[e]), "edge lengths must be positive");
    }
    for (double k : s.face_curvature_) require(std::isfinite(k) && k <= 0.0, "face curvatures must be finite and <= 0");
    for (int f = 0; f < s.face_count(); ++f) s.face_shape(f);  // triangle inequality at the face curvature
    return s;
  }

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edge_length_.size()); }
  int face_count() const { return static_cast<int>(origin_.size() / 3); }
  int half_edge_count() const { return static_cast<int>(origin_.size()); }
  int euler_characteristic() const { return vertex_count() - edge_count() + face_count(); }
  int genus() const { return (2 - euler_characteristic()) / 2; }

  int origin(int h) const { return origin_[h]; }
  int dest(int h) const { return origin_[next(h)]; }
  int twin(int h) const { return twin_[h]; }
  int edge(int h) const { return edge_[h]; }
  static int next(int h) { return 3 * (h / 3) + (h % 3 + 1) % 3; }
  static int prev(int h) { return 3 * (h / 3) + (h % 3 + 2) % 3; }
  static int face(int h) { return h / 3; }

  double length(int h) const { return edge_length_[edge_[h]]; }
  const std::vector<double>& edge_lengths() const { return edge_length_; }
  const std::vector<double>& face_curvatures() const { return face_curvature_; }
  Curvature curvature(int f) const { return Curvature(face_curvature_[f]); }
  std::array<int, 3> face_vertices(int f) const { return {origin_[3 * f], origin_[3 * f + 1], origin_[3 * f + 2]}; }

  /// The half-edge of each pair with the smaller index.
  int canonical(int e_half) const { return std::min(e_half, twin_[e_half]); }

  /// Side i of the shape is half-edge 3f+i; corner i's angle is shape.angles[(i+1)%3].
  TriangleShape face_shape(int f) const {
    return triangle_from_sides(curvature(f), length(3 * f), length(3 * f + 1), length(3 * f + 2));
  }

  double corner_angle(int f, int i) const { return face_shape(f).angles[(i + 1) % 3]; }

  ConeData cone_angles() const {
    ConeData c;
    c.angles.assign(vertex_count_, 0.0);
    for (int f = 0; f < face_count(); ++f) {
      const auto t = face_shape(f);
      for (int i = 0; i < 3; ++i) c.angles[origin_[3 * f + i]] += t.angles[(i + 1) % 3];
    }
    return c;
  }

  double total_area() const {
    double a = 0.0;
    for (int f = 0; f < face_count(); ++f) a += face_shape(f).area;
    return a;
  }

  /// Integral of curvature over the faces.
  double total_curvature() const {
    double a = 0.0;
    for (int f = 0; f < face_count(); ++f) a += face_curvature_[f] * face_shape(f).area;
    return a;
  }

  bool uniform_curvature() const {
    return std::all_of(face_curvature_.begin(), face_curvature_.end(),
                       [&](double k) { return k == face_curvature_.front(); });
  }

  bool flat() const {
    return std::all_of(face_curvature_.begin(), face_curvature_.end(), [](double k) { return k == 0.0; });
  }

  TriangulatedSurface with_curvatures(std::vector<double> curvatures) const {
    require(curvatures.size() == face_curvature_.size(), "one curvature per face");
    TriangulatedSurface s = *this;
    s.face_curvature_ = std::move(curvatures);
    return s;
  }

  TriangulatedSurface with_lengths(std::vector<double> lengths) const {
    require(lengths.size() == edge_length_.size(), "one length per edge");
    TriangulatedSurface s = *this;
    s.edge_length_ = std::move(lengths);
    return s;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["vertex_count"] = vertex_count_;
    j["edge_count"] = edge_count();
    j["face_count"] = face_count();
    j["genus"] = genus();
    j["half_edges"] = {{"origin", origin_}, {"twin", twin_}, {"edge", edge_}};
    j["edge_lengths"] = edge_length_;
    j["face_curvatures"] = face_curvature_;
    return j;
  }

 private:
  int vertex_count_ = 0;
  std::vector<int> origin_;
  std::vector<int> twin_;
  std::vector<int> edge_;
  std::vector<double> edge_length_;
  std::vector<double> face_curvature_;
};

/// Midpoint subdivision: each triangle splits into four using geodesic
/// midpoints at its own curvature. Child edges 2e, 2e+1 follow the canonical
/// half-edge of e; interior edges are numbered 2E + 3f + i.
inline TriangulatedSurface subdivide(const TriangulatedSurface& S) {
  const int V = S.vertex_count(), E = S.edge_count(), F = S.face_count();
  std::vector<std::array<int, 3>> faces, edges;
  std::vector<double> curv;
  std::vector<double> len(2 * E + 3 * F);
  for (int e = 0; e < E; ++e) len[2 * e] = len[2 * e + 1] = 0.5 * S.edge_lengths()[e];
  auto mid = [&](int h) { return V + S.edge(h); };
  // Child edge covering the first (origin side) or second half of half-edge h.
  auto half = [&](int h, bool first) {
    const bool canon = S.canonical(h) == h;
    return 2 * S.edge(h) + ((first == canon) ? 0 : 1);
  };
  for (int f = 0; f < F; ++f) {
    const auto t = S.face_shape(f);
    int h[3], c[3], m[3];
    for (int i = 0; i < 3; ++i) {
      h[i] = 3 * f + i;
      c[i] = S.origin(h[i]);
      m[i] = mid(h[i]);
    }
    // Interior edge i joins the midpoints on either side of corner i.
    int in[3];
    for (int i = 0; i < 3; ++i) {
      const int hp = h[(i + 2) % 3];
      in[i] = 2 * E + 3 * f + i;
      len[in[i]] = side_point_distance(S.curvature(f), 0.5 * S.length(h[i]), 0.5 * S.length(hp), t.angles[(i + 1) % 3]);
    }
    for (int i = 0; i < 3; ++i) {
      const int ip = (i + 2) % 3;
      faces.push_back({c[i], m[i], m[ip]});
      edges.push_back({half(h[i], true), in[i], half(h[ip], false)});
      curv.push_back(S.face_curvatures()[f]);
    }
    faces.push_back({m[0], m[1], m[2]});
    edges.push_back({in[1], in[2], in[0]});
    curv.push_back(S.face_curvatures()[f]);
  }
  return TriangulatedSurface::from_faces(V + E, faces, edges, std::move(len), std::move(curv));
}

/// Regular octagon with angles pi/4 and opposite-pattern side pairing
/// (a b a^-1 b^-1 c d c^-1 d^-1), coned from its center into 8 triangles, then
/// subdivided `refinement` times. Genus 2 with a smooth metric of curvature K.
inline TriangulatedSurface build_octagon_surface(Curvature K, int refinement = 0) {
  require(!K.flat(), "the octagon surface needs K < 0");
  require(refinement >= 0 && refinement <= 8, "refinement level must be in [0, 8]");
  const double k = K.scale();
  const double cot = 1.0 / std::tan(pi / 8.0);
  const double spoke = std::acosh(cot * cot) / k;
  const double c4 = std::cos(pi / 4.0), s8 = std::sin(pi / 8.0), c8 = std::cos(pi / 8.0);
  const double side = std::acosh((c4 + c8 * c8) / (s8 * s8)) / k;
  // Vertex 0 is the center, vertex 1 the identified octagon corner.
  // Edges 0..7 are spokes, 8..11 the glued side pairs.
  const int side_edge[8] = {8, 9, 8, 9, 10, 11, 10, 11};
  std::vector<std::array<int, 3>> faces, edges;
  for (int i = 0; i < 8; ++i) {
    faces.push_back({0, 1, 1});
    edges.push_back({i, side_edge[i], (i + 1) % 8});
  }
  std::vector<double> len(12, side);
  std::fill(len.begin(), len.begin() + 8, spoke);
  auto S = TriangulatedSurface::from_faces(2, faces, edges, std::move(len), std::vector<double>(8, K.value()));
  for (int r = 0; r < refinement; ++r) S = subdivide(S);
  return S;
}

/// Same combinatorics and lengths with every face curvature replaced by (1-t)K.
inline TriangulatedSurface interpolate_curvature(const TriangulatedSurface& S, double t) {
  require(t >= 0.0 && t <= 1.0, "interpolation parameter t must lie in [0, 1]");
  require(S.uniform_curvature(), "curvature interpolation needs a uniformly curved surface");
  const double K = S.face_curvatures().front();
  const double k = t == 1.0 ? 0.0 : (1.0 - t) * K;
  return S.with_curvatures(std::vector<double>(S.face_count(), k));
}

/// |sum of K_f area_f - cone excess - 2 pi chi|.
inline double gauss_bonnet_residual(const TriangulatedSurface& S) {
  return std::abs(S.total_curvature() - S.cone_angles().excess() - two_pi * S.euler_characteristic());
}

inline double total_area(const TriangulatedSurface& S) { return S.total_area(); }

/// Scale areas by c: lengths by sqrt(c), curvatures by 1/c.
inline TriangulatedSurface rescale(const TriangulatedSurface& S, double c) {
  require(c > 0.0 && std::isfinite(c), "rescale factor must be positive");
  const double r = std::sqrt(c);
  std::vector<double> len = S.edge_lengths();
  for (double& l : len) l *= r;
  std::vector<double> curv = S.face_curvatures();
  for (double& k : curv) k = k == 0.0 ? 0.0 : k / c;
  return S.with_lengths(std::move(len)).with_curvatures(std::move(curv));
}

// ---------------------------------------------------------------------------
// Straight lines on flat cone surfaces.

struct Vec2 {
  double x = 0.0, y = 0.0;
  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

/// Euclidean corner positions of a face: corner 0 at the origin, corner 1 on the +x axis.
inline std::array<Vec2, 3> face_layout(const TriangulatedSurface& S, int f) {
  const double l0 = S.length(3 * f), l1 = S.length(3 * f + 1), l2 = S.length(3 * f + 2);
  const double x = (l0 * l0 + l2 * l2 - l1 * l1) / (2.0 * l0);
  return {Vec2{0.0, 0.0}, Vec2{l0, 0.0}, Vec2{x, std::sqrt(std::max(0.0, l2 * l2 - x * x))}};
}

/// Orientation-preserving isometry of the plane.
struct Rigid2 {
  double c = 1.0, s = 0.0;
  Vec2 t;
  Vec2 rotate(Vec2 v) const { return {c * v.x - s * v.y, s * v.x + c * v.y}; }
  Vec2 apply(Vec2 p) const { return rotate(p) + t; }
};

/// Map from the layout of face(h) to the layout of face(twin(h)) that glues the shared edge.
inline Rigid2 transfer_map(const TriangulatedSurface& S, int h) {
  const int g = S.twin(h);
  const auto P = face_layout(S, S.face(h));
  const auto Q = face_layout(S, S.face(g));
  const Vec2 A = P[h % 3], B = P[(h % 3 + 1) % 3];
  const Vec2 A2 = Q[g % 3], B2 = Q[(g % 3 + 1) % 3];
  // A maps to B2 and B maps to A2.
  const double phi = std::atan2((A2 - B2).y, (A2 - B2).x) - std::atan2((B - A).y, (B - A).x);
  Rigid2 m{std::cos(phi), std::sin(phi), {}};
  m.t = B2 - m.rotate(A);
  return m;
}

struct FacePoint {
  int face = 0;
  Vec2 point;      // in face_layout coordinates
  Vec2 direction;  // unit
};

struct TraceSegment {
  int face = 0;
  Vec2 entry;
  Vec2 exit;
  double length = 0.0;
  int exit_half_edge = -1;  // -1 when the trace ends inside the face
};

struct GeodesicTrace {
  std::vector<TraceSegment> segments;
  double total_length = 0.0;
  FacePoint end;
  bool hit_vertex = false;
  int vertex = -1;
};

/// Straight-line continuation for length L across edges by unfolding.
/// Stops early, flagged, when the line passes within vertex_tol of a vertex.
inline GeodesicTrace trace_geodesic(const TriangulatedSurface& S, FacePoint start, double L, double vertex_tol = 1e-10) {
  require(S.flat(), "trace_geodesic needs a flat surface");
  require(L >= 0.0, "trace length must be nonnegative");
  require(start.face >= 0 && start.face < S.face_count(), "start face out of range");
  {
    const auto P = face_layout(S, start.face);
    for (int i = 0; i < 3; ++i)
      require((P[(i + 1) % 3] - P[i]).cross(start.point - P[i]) > 0.0, "start point must lie strictly inside its face");
    const double n = start.direction.norm();
    require(n > 0.0, "start direction must be nonzero");
    start.direction = start.direction * (1.0 / n);
  }
  GeodesicTrace tr;
  FacePoint cur = start;
  int entered_by = -1;
  double remaining = L;
  while (true) {
    const auto P = face_layout(S, cur.face);
    double best = std::numeric_limits<double>::infinity();
    int side = -1;
    for (int i = 0; i < 3; ++i) {
      if (3 * cur.face + i == entered_by) continue;
      const Vec2 a = P[i], e = P[(i + 1) % 3] - P[i];
      const double denom = cur.direction.cross(e);
      if (denom <= 0.0) continue;  // not heading out through this side
      const double tau = (a - cur.point).cross(e) / denom;
      if (tau < best) {
        best = std::max(tau, 0.0);
        side = i;
      }
    }
    require(side >= 0, "trace lost its exit side");
    TraceSegment seg;
    seg.face = cur.face;
    seg.entry = cur.point;
    if (best >= remaining) {
      seg.exit = cur.point + cur.direction * remaining;
      seg.length = remaining;
      tr.segments.push_back(seg);
      tr.total_length += remaining;
      cur.point = seg.exit;
      break;
    }
    const int h = 3 * cur.face + side;
    const Vec2 q = cur.point + cur.direction * best;
    seg.exit = q;
    seg.length = best;
    seg.exit_half_edge = h;
    tr.segments.push_back(seg);
    tr.total_length += best;
    remaining -= best;
    const Vec2 a = P[side], b = P[(side + 1) % 3];
    if ((q - a).norm() <= vertex_tol || (q - b).norm() <= vertex_tol) {
      tr.hit_vertex = true;
      tr.vertex = (q - a).norm() <= vertex_tol ? S.origin(h) : S.dest(h);
      cur.point = q;
      break;
    }
    const Rigid2 m = transfer_map(S, h);
    cur.face = S.face(S.twin(h));
    cur.point = m.apply(q);
    cur.direction = m.rotate(cur.direction);
    entered_by = S.twin(h);
  }
  tr.end = cur;
  return tr;
}

/// Uniform point (by area) and direction on a flat surface.
inline FacePoint sample_flat_start(const TriangulatedSurface& S, Rng& rng) {
  std::vector<double> cum(S.face_count());
  double acc = 0.0;
  for (int f = 0; f < S.face_count(); ++f) cum[f] = acc += S.face_shape(f).area;
  const double x = rng.uniform() * acc;
  const int f = static_cast<int>(std::min<std::ptrdiff_t>(std::upper_bound(cum.begin(), cum.end(), x) - cum.begin(),
                                                         S.face_count() - 1));
  const auto P = face_layout(S, f);
  double r1 = std::sqrt(rng.uniform()), r2 = rng.uniform();
  r1 = std::clamp(r1, 1e-12, 1.0 - 1e-12);
  r2 = std::clamp(r2, 1e-12, 1.0 - 1e-12);
  const Vec2 p = P[0] * (1.0 - r1) + P[1] * (r1 * (1.0 - r2)) + P[2] * (r1 * r2);
  const double th = rng.angle();
  return FacePoint{f, p, Vec2{std::cos(th), std::sin(th)}};
}

/// Length of the segment from p to q lying within distance r of c.
inline double chord_within(Vec2 p, Vec2 q, Vec2 c, double r) {
  const Vec2 d = q - p;
  const double L = d.norm();
  if (L == 0.0) return 0.0;
  const Vec2 u = d * (1.0 / L);
  const double t0 = (c - p).dot(u);
  const double perp2 = (c - p).dot(c - p) - t0 * t0;
  if (perp2 >= r * r) return 0.0;
  const double w = std::sqrt(r * r - perp2);
  return std::max(0.0, std::min(L, t0 + w) - std::max(0.0, t0 - w));
}

/// Portion of the trace within distance r of a face corner.
inline double length_near_vertices(const TriangulatedSurface& S, const GeodesicTrace& tr, double r) {
  double total = 0.0;
  for (const auto& s : tr.segments) {
    const auto P = face_layout(S, s.face);
    for (int i = 0; i < 3; ++i) total += chord_within(s.entry, s.exit, P[i], r);
  }
  return total;
}

}  // namespace entlab
