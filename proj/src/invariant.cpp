/*
 Copyright 2026 The slipwalk Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "slipwalk/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "slipwalk/errors.hpp"

namespace slipwalk {

namespace {

double cloud_scale(const std::vector<Eigen::VectorXd>& pts) {
  Eigen::VectorXd lo = pts[0];
  Eigen::VectorXd hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return std::max((hi - lo).maxCoeff(), std::max(lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff()));
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

// Monotone chain on 2D coordinates; returns indices counter-clockwise.
std::vector<int> chain_2d(const std::vector<Eigen::Vector2d>& c, double tol) {
  std::vector<int> idx(c.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return c[a].x() < c[b].x() || (c[a].x() == c[b].x() && c[a].y() < c[b].y());
  });
  auto cross = [&](int o, int a, int b) {
    const Eigen::Vector2d oa = c[a] - c[o];
    const Eigen::Vector2d ob = c[b] - c[o];
    return oa.x() * ob.y() - oa.y() * ob.x();
  };
  std::vector<int> h(2 * idx.size());
  int k = 0;
  for (int i : idx) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], i) <= tol) --k;
    h[k++] = i;
  }
  const int lower = k + 1;
  for (int j = static_cast<int>(idx.size()) - 2; j >= 0; --j) {
    const int i = idx[j];
    while (k >= lower && cross(h[k - 2], h[k - 1], i) <= tol) --k;
    h[k++] = i;
  }
  h.resize(std::max(k - 1, 1));
  return h;
}

struct Face {
  int a, b, c;
  Eigen::Vector3d n;
  double off;
  bool alive;
};

std::vector<int> incremental_hull_3d(const std::vector<Eigen::Vector3d>& p, double tol) {
  const int np = static_cast<int>(p.size());
  // Initial tetrahedron from extreme points.
  int i0 = 0;
  for (int i = 1; i < np; ++i)
    if (p[i].x() < p[i0].x() || (p[i].x() == p[i0].x() && p[i].y() < p[i0].y())) i0 = i;
  int i1 = -1;
  double best = -1.0;
  for (int i = 0; i < np; ++i) {
    const double d = (p[i] - p[i0]).norm();
    if (d > best) {
      best = d;
      i1 = i;
    }
  }
  const Eigen::Vector3d dir = (p[i1] - p[i0]).normalized();
  int i2 = -1;
  best = -1.0;
  for (int i = 0; i < np; ++i) {
    const Eigen::Vector3d v = p[i] - p[i0];
    const double d = (v - v.dot(dir) * dir).norm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  const Eigen::Vector3d nrm = (p[i1] - p[i0]).cross(p[i2] - p[i0]).normalized();
  int i3 = -1;
  best = -1.0;
  for (int i = 0; i < np; ++i) {
    const double d = std::abs(nrm.dot(p[i] - p[i0]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }

  std::vector<Face> faces;
  std::map<std::pair<int, int>, int> edge_face;
  auto make_face = [&](int a, int b, int c) {
    Face f{a, b, c, (p[b] - p[a]).cross(p[c] - p[a]), 0.0, true};
    f.n.normalize();
    f.off = f.n.dot(p[a]);
    const int id = static_cast<int>(faces.size());
    faces.push_back(f);
    edge_face[{a, b}] = id;
    edge_face[{b, c}] = id;
    edge_face[{c, a}] = id;
  };
  const Eigen::Vector3d centroid = (p[i0] + p[i1] + p[i2] + p[i3]) / 4.0;
  const int tet[4][3] = {{i0, i1, i2}, {i0, i3, i1}, {i1, i3, i2}, {i2, i3, i0}};
  // Orient the tetrahedron outward.
  const bool flip = ((p[i1] - p[i0]).cross(p[i2] - p[i0])).dot(centroid - p[i0]) > 0.0;
  for (const auto& t : tet) {
    if (flip)
      make_face(t[0], t[2], t[1]);
    else
      make_face(t[0], t[1], t[2]);
  }

  // Quickhull: every outside point sits in the conflict list of one face.
  std::vector<std::vector<int>> outside(faces.size());
  auto assign = [&](int i, const std::vector<int>& candidates) {
    for (int f : candidates) {
      if (faces[f].alive && faces[f].n.dot(p[i]) - faces[f].off > tol) {
        outside[f].push_back(i);
        return;
      }
    }
  };
  {
    const std::vector<int> all{0, 1, 2, 3};
    for (int i = 0; i < np; ++i)
      if (i != i0 && i != i1 && i != i2 && i != i3) assign(i, all);
  }

  for (std::size_t f0 = 0; f0 < faces.size(); ++f0) {
    if (!faces[f0].alive || outside[f0].empty()) continue;
    int apex = outside[f0][0];
    double far = -1.0;
    for (int i : outside[f0]) {
      const double dist = faces[f0].n.dot(p[i]) - faces[f0].off;
      if (dist > far) {
        far = dist;
        apex = i;
      }
    }
    // Visible region by flood fill across shared edges.
    std::vector<int> visible{static_cast<int>(f0)};
    std::set<int> vis{static_cast<int>(f0)};
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const Face& F = faces[visible[q]];
      const int e[3][2] = {{F.a, F.b}, {F.b, F.c}, {F.c, F.a}};
      for (const auto& ed : e) {
        const auto it = edge_face.find({ed[1], ed[0]});
        if (it == edge_face.end() || vis.count(it->second)) continue;
        const Face& G = faces[it->second];
        if (G.n.dot(p[apex]) - G.off > tol) {
          vis.insert(it->second);
          visible.push_back(it->second);
        }
      }
    }
    std::vector<std::pair<int, int>> horizon;
    for (int f : visible) {
      const int e[3][2] = {{faces[f].a, faces[f].b}, {faces[f].b, faces[f].c}, {faces[f].c, faces[f].a}};
      for (const auto& ed : e) {
        const auto it = edge_face.find({ed[1], ed[0]});
        if (it == edge_face.end() || !vis.count(it->second)) horizon.push_back({ed[0], ed[1]});
      }
    }
    std::vector<int> orphans;
    for (int f : visible) {
      faces[f].alive = false;
      edge_face.erase({faces[f].a, faces[f].b});
      edge_face.erase({faces[f].b, faces[f].c});
      edge_face.erase({faces[f].c, faces[f].a});
      for (int i : outside[f])
        if (i != apex) orphans.push_back(i);
      outside[f].clear();
    }
    std::vector<int> created;
    for (const auto& h : horizon) {
      created.push_back(static_cast<int>(faces.size()));
      make_face(h.first, h.second, apex);
      outside.emplace_back();
    }
    std::sort(orphans.begin(), orphans.end());
    for (int i : orphans) assign(i, created);
  }

  std::set<int> verts;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    verts.insert(f.a);
    verts.insert(f.b);
    verts.insert(f.c);
  }
  return {verts.begin(), verts.end()};
}

}  // namespace

std::vector<Eigen::VectorXd> convex_hull_vertices(const std::vector<Eigen::VectorXd>& points) {
  if (points.empty()) throw InvalidParameter("hull of an empty point set");
  const int d = static_cast<int>(points[0].size());
  if (d != 2 && d != 3) throw InvalidParameter("hull supports dimensions 2 and 3 only");
  for (const auto& p : points) {
    if (p.size() != d) throw InvalidParameter("hull points have mixed dimensions");
    if (!p.allFinite()) throw InvalidParameter("hull points must be finite");
  }

  const double scale = std::max(cloud_scale(points), 1e-300);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::MatrixXd C(d, points.size());
  for (std::size_t i = 0; i < points.size(); ++i) C.col(i) = points[i] - mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullU);
  const Eigen::VectorXd sv = svd.singularValues();
  const double sv_tol = 1e-10 * scale * std::sqrt(static_cast<double>(points.size()));
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > sv_tol) ++rank;

  std::vector<int> keep;
  if (rank == 0) {
    keep = {0};
  } else if (rank == 1) {
    const Eigen::VectorXd axis = svd.matrixU().col(0);
    int lo = 0, hi = 0;
    for (int i = 1; i < static_cast<int>(points.size()); ++i) {
      const double t = axis.dot(points[i] - mean);
      if (t < axis.dot(points[lo] - mean)) lo = i;
      if (t > axis.dot(points[hi] - mean)) hi = i;
    }
    keep = {lo, hi};
  } else if (rank == 2) {
    std::vector<Eigen::Vector2d> c(points.size());
    const Eigen::MatrixXd basis = svd.matrixU().leftCols(2);
    for (std::size_t i = 0; i < points.size(); ++i) c[i] = basis.transpose() * (points[i] - mean);
    keep = chain_2d(c, 1e-12 * scale * scale);
  } else {
    std::vector<Eigen::Vector3d> c(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) c[i] = points[i] - mean;
    keep = incremental_hull_3d(c, 1e-11 * scale);
  }

  std::vector<Eigen::VectorXd> out;
  out.reserve(keep.size());
  for (int i : keep) out.push_back(points[i]);
  if (d == 3 || rank < 2) std::sort(out.begin(), out.end(), lex_less);
  return out;
}

Polytope hull(const std::vector<Eigen::VectorXd>& samples, double eps) {
  if (samples.empty()) throw InvalidParameter("hull needs at least one sample");
  if (!(eps >= 0.0)) throw InvalidParameter("hull inflation must be non-negative");
  const int d = static_cast<int>(samples[0].size());
  const std::vector<Eigen::VectorXd> reduced = convex_hull_vertices(samples);

  Polytope P;
  P.dim = d;
  // Affinely dependent samples reduce to at most d extreme points.
  bool full = static_cast<int>(reduced.size()) >= d + 1;
  if (full) {
    Eigen::MatrixXd C(d, reduced.size() - 1);
    for (std::size_t i = 1; i < reduced.size(); ++i) C.col(i - 1) = reduced[i] - reduced[0];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
    lu.setThreshold(1e-10);
    full = lu.rank() == d;
  }

  std::vector<Eigen::VectorXd> corners;
  for (int m = 0; m < (1 << d); ++m) {
    Eigen::VectorXd c(d);
    for (int i = 0; i < d; ++i) c(i) = (m >> i & 1) ? eps : -eps;
    corners.push_back(c);
  }

  if (!full) {
    Eigen::VectorXd lo = reduced[0], hi = reduced[0];
    for (const auto& p : reduced) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    std::vector<Eigen::VectorXd> box;
    for (int m = 0; m < (1 << d); ++m) {
      Eigen::VectorXd c(d);
      for (int i = 0; i < d; ++i) c(i) = (m >> i & 1) ? hi(i) + eps : lo(i) - eps;
      box.push_back(c);
    }
    P.vertices = convex_hull_vertices(box);
    return P;
  }
  if (eps == 0.0) {
    P.vertices = reduced;
    return P;
  }
  std::vector<Eigen::VectorXd> inflated;
  inflated.reserve(reduced.size() * corners.size());
  for (const auto& p : reduced)
    for (const auto& c : corners) inflated.push_back(p + c);
  P.vertices = convex_hull_vertices(inflated);
  return P;
}

Polytope minkowski_sum(const Polytope& P, const Polytope& Q) {
  if (P.dim != Q.dim) throw InvalidParameter("Minkowski sum of polytopes of different dimension");
  if (P.vertices.empty() || Q.vertices.empty()) throw InvalidParameter("Minkowski sum of an empty polytope");
  std::vector<Eigen::VectorXd> sums;
  sums.reserve(P.vertices.size() * Q.vertices.size());
  for (const auto& p : P.vertices)
    for (const auto& q : Q.vertices) sums.push_back(p + q);
  return {P.dim, convex_hull_vertices(sums)};
}

Polytope linear_image(const Eigen::MatrixXd& M, const Polytope& P) {
  if (M.cols() != P.dim || M.rows() != P.dim)
    throw InvalidParameter("linear image needs a square map of the polytope's dimension");
  Polytope out;
  out.dim = P.dim;
  for (const auto& v : P.vertices) out.vertices.push_back(M * v);
  return out;
}

int nilpotency_index(const Eigen::MatrixXd& M, int max_n, double tol) {
  const double base = std::max(1.0, M.norm());
  Eigen::MatrixXd Mk = M;
  for (int k = 1; k <= max_n; ++k) {
    if (Mk.norm() <= tol * std::pow(base, k)) return k;
    Mk = M * Mk;
  }
  return -1;
}

Polytope invariant_set(const Eigen::MatrixXd& A_cl, const Polytope& W, int n) {
  if (n < 1) throw InvalidParameter("invariant set needs n >= 1");
  if (A_cl.rows() != W.dim || A_cl.cols() != W.dim)
    throw InvalidParameter("closed-loop matrix and disturbance set dimensions differ");
  const int nil = nilpotency_index(A_cl);
  if (nil < 0 && !(spectral_radius(A_cl) < 1.0))
    throw InvalidParameter("closed-loop matrix is not stable; no bounded invariant set");

  const int terms = nil > 0 ? std::min(n, nil) : n;
  Polytope E = W;
  Eigen::MatrixXd Ai = Eigen::MatrixXd::Identity(W.dim, W.dim);
  for (int i = 1; i < terms; ++i) {
    Ai = A_cl * Ai;
    E = minkowski_sum(E, linear_image(Ai, W));
  }
  return E;
}

namespace {

// Wolfe's minimum-norm-point active-set QP over conv(q_i), stopped as soon as
// the origin is certified within tol per coordinate, or separated by more than
// tol * sqrt(d) in norm. The corral never exceeds d + 1 points.
bool origin_within(const std::vector<Eigen::VectorXd>& q, double tol) {
  const int m = static_cast<int>(q.size());
  double scale2 = 0.0;
  int first = 0;
  for (int i = 0; i < m; ++i) {
    scale2 = std::max(scale2, q[i].squaredNorm());
    if (q[i].squaredNorm() < q[first].squaredNorm()) first = i;
  }
  const double gap_tol = 1e-15 * std::max(scale2, 1e-300);
  const double sep_scale = std::sqrt(static_cast<double>(q[0].size()));
  std::vector<int> S{first};
  std::vector<double> lam{1.0};
  Eigen::VectorXd y = q[first];
  for (int outer = 0; outer < 10 * m + 100; ++outer) {
    if (y.cwiseAbs().maxCoeff() <= tol) return true;
    int j = 0;
    for (int i = 1; i < m; ++i)
      if (q[i].dot(y) < q[j].dot(y)) j = i;
    // Supporting hyperplane: every hull point is at least this far from the origin.
    if (q[j].dot(y) / y.norm() > tol * sep_scale) return false;
    if (y.squaredNorm() - q[j].dot(y) <= gap_tol) break;
    if (std::find(S.begin(), S.end(), j) != S.end()) break;
    S.push_back(j);
    lam.push_back(0.0);
    for (int inner = 0; inner <= m; ++inner) {
      const int s = static_cast<int>(S.size());
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(s + 1, s + 1);
      for (int a = 0; a < s; ++a) {
        for (int b = 0; b < s; ++b) K(a, b) = q[S[a]].dot(q[S[b]]);
        K(a, s) = 1.0;
        K(s, a) = 1.0;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
      rhs(s) = 1.0;
      const Eigen::VectorXd alpha = K.completeOrthogonalDecomposition().solve(rhs).head(s);
      if (alpha.minCoeff() > 0.0) {
        for (int a = 0; a < s; ++a) lam[a] = alpha(a);
        break;
      }
      double theta = 1.0;
      for (int a = 0; a < s; ++a)
        if (alpha(a) <= 0.0) theta = std::min(theta, lam[a] / (lam[a] - alpha(a)));
      std::vector<int> S2;
      std::vector<double> lam2;
      for (int a = 0; a < s; ++a) {
        const double l = lam[a] + theta * (alpha(a) - lam[a]);
        if (l > 1e-14) {
          S2.push_back(S[a]);
          lam2.push_back(l);
        }
      }
      if (S2.empty()) {
        S2.push_back(S.back());
        lam2.push_back(1.0);
      }
      double sum = 0.0;
      for (double l : lam2) sum += l;
      for (double& l : lam2) l /= sum;
      S.swap(S2);
      lam.swap(lam2);
    }
    y = Eigen::VectorXd::Zero(q[0].size());
    for (std::size_t a = 0; a < S.size(); ++a) y += lam[a] * q[S[a]];
  }
  return y.cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

bool contains(const Polytope& P, const Eigen::VectorXd& point, double tol) {
  if (point.size() != P.dim) throw InvalidParameter("membership point has the wrong dimension");
  if (P.vertices.empty()) return false;

  Eigen::VectorXd lo = P.vertices[0], hi = P.vertices[0];
  for (const auto& v : P.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  if (((point - hi).array() > tol).any() || ((lo - point).array() > tol).any()) return false;

  std::vector<Eigen::VectorXd> shifted;
  shifted.reserve(P.vertices.size());
  for (const auto& v : P.vertices) shifted.push_back(v - point);
  return origin_within(shifted, tol);
}

InvarianceCertificate check_invariance(const Eigen::MatrixXd& A_cl, const Polytope& E,
                                       const Polytope& W, double tol) {
  // Extreme points of A E + W suffice by convexity.
  const Polytope image = minkowski_sum(linear_image(A_cl, E), W);
  InvarianceCertificate cert;
  for (const auto& v : image.vertices) {
    ++cert.checked;
    if (!contains(E, v, tol)) ++cert.failures;
  }
  cert.holds = cert.failures == 0;
  return cert;
}

std::vector<S2SRecord> s2s_records(const std::vector<StepTrace>& traces) {
  std::vector<S2SRecord> out;
  if (traces.empty()) return out;
  out.reserve(traces.size() + 1);
  for (const auto& tr : traces) {
    S2SRecord r;
    r.step_index = tr.step_index;
    r.x = tr.x_start;
    r.stance_foot = tr.P_start.head<2>() - Eigen::Vector2d(tr.x_start(0), tr.x_start(2));
    r.u = tr.u;
    out.push_back(r);
  }
  const StepTrace& last = traces.back();
  S2SRecord r;
  r.step_index = last.step_index + 1;
  r.x = last.x_end;
  r.stance_foot = last.P_end.head<2>() - Eigen::Vector2d(last.x_end(0), last.x_end(2));
  r.u = last.u_next;
  out.push_back(r);
  return out;
}

Eigen::VectorXd record_state(const S2SRecord& r, int plane, int dim) {
  if (plane != 0 && plane != 1) throw InvalidParameter("plane index must be 0 (x) or 1 (y)");
  const double p = r.x(2 * plane);
  const double v = r.x(2 * plane + 1);
  if (dim == 2) return Eigen::Vector2d(p, v);
  if (dim == 3) return Eigen::Vector3d(r.stance_foot(plane) + p, p, v);
  throw InvalidParameter("plane state dimension must be 2 or 3");
}

namespace {

template <int N>
DisturbanceSamples estimate_w_impl(const std::vector<S2SRecord>& records, int plane,
                                   const StepToStep<N>& s2s, const std::string& source) {
  if (records.size() < 2)
    throw InvalidParameter("disturbance estimation needs at least two consecutive pre-impact states");
  DisturbanceSamples out;
  out.source = source;
  out.plane = plane;
  out.dim = N;
  for (std::size_t k = 0; k + 1 < records.size(); ++k) {
    if (records[k + 1].step_index != records[k].step_index + 1)
      throw InvalidParameter("disturbance estimation needs consecutive step indices");
    const StateVec<N> xk = record_state(records[k], plane, N);
    const StateVec<N> xn = record_state(records[k + 1], plane, N);
    out.w.push_back(xn - s2s.A * xk - s2s.B * records[k].u(plane));
  }
  return out;
}

}  // namespace

DisturbanceSamples estimate_w(const std::vector<S2SRecord>& records, int plane,
                              const LinearS2S& s2s, const std::string& source) {
  return estimate_w_impl<2>(records, plane, s2s, source);
}

DisturbanceSamples estimate_w(const std::vector<S2SRecord>& records, int plane,
                              const ExtendedS2S& s2s, const std::string& source) {
  return estimate_w_impl<3>(records, plane, s2s, source);
}

ForceBandResult force_band_check(const std::vector<double>& F, const std::vector<double>& F_ref,
                                 double c) {
  if (F.size() != F_ref.size())
    throw InvalidParameter("force band: series lengths differ (" + std::to_string(F.size()) +
                           " vs " + std::to_string(F_ref.size()) + ")");
  if (!(c > 0.0 && c < 1.0)) throw InvalidParameter("force band: c must lie in (0, 1)");
  ForceBandResult res;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double ref = F_ref[i];
    double lo, hi;
    bool ok;
    if (std::abs(ref) < 1.0) {
      lo = ref - c;
      hi = ref + c;
      ok = F[i] >= lo && F[i] <= hi;
    } else {
      lo = std::min((1.0 - c) * ref, (1.0 + c) * ref);
      hi = std::max((1.0 - c) * ref, (1.0 + c) * ref);
      ok = F[i] > lo && F[i] < hi;
    }
    if (!ok) {
      res.pass = false;
      res.first_violation = static_cast<long>(i);
      res.value = F[i];
      res.lower = lo;
      res.upper = hi;
      return res;
    }
  }
  return res;
}

}  // namespace slipwalk
