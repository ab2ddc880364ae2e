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

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "slipwalk/aslip.hpp"
#include "slipwalk/hlip.hpp"

namespace slipwalk {

/// Convex polytope in vertex form, dimension 2 or 3.
struct Polytope {
  int dim = 0;
  std::vector<Eigen::VectorXd> vertices;
};

/// Extreme points of a point cloud. Full-dimensional clouds use the monotone
/// chain (2D) or Quickhull (3D); lower-dimensional clouds are
/// reduced in their affine hull. Output order is deterministic.
std::vector<Eigen::VectorXd> convex_hull_vertices(const std::vector<Eigen::VectorXd>& points);

/// Hull of the samples inflated by an eps-box. Affinely dependent samples fall
/// back to their bounding box inflated by eps.
Polytope hull(const std::vector<Eigen::VectorXd>& samples, double eps);

Polytope minkowski_sum(const Polytope& P, const Polytope& Q);

/// M P, without hull reduction (the image may be lower-dimensional).
Polytope linear_image(const Eigen::MatrixXd& M, const Polytope& P);

/// Smallest n with ||M^n|| <= tol * max(1, ||M||^n), or -1 when none up to max_n.
int nilpotency_index(const Eigen::MatrixXd& M, int max_n = 16, double tol = 1e-12);

/**
 * E_n = W + A W + ... + A^(n-1) W (Minkowski sums). Terms stop early once
 * A^i vanishes, in which case the result is the exact minimal invariant set.
 * Throws InvalidParameter when rho(A) >= 1 and A is not nilpotent.
 */
Polytope invariant_set(const Eigen::MatrixXd& A_cl, const Polytope& W, int n);

/// Membership by the nearest point of P (min-norm-point QP); inside when every
/// coordinate of the residual is within tol.
bool contains(const Polytope& P, const Eigen::VectorXd& point, double tol = 1e-9);

/// Checks A v + w in E for all vertices v of E and w of W.
struct InvarianceCertificate {
  bool holds = true;
  int checked = 0;
  int failures = 0;
};
InvarianceCertificate check_invariance(const Eigen::MatrixXd& A_cl, const Polytope& E,
                                       const Polytope& W, double tol = 1e-8);

/// Pre-impact state k with the step size landed at impact k.
struct S2SRecord {
  int step_index = 0;
  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  Eigen::Vector2d stance_foot = Eigen::Vector2d::Zero();
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
};

/// One record per pre-impact instant of a walk (n traces give n + 1 records).
std::vector<S2SRecord> s2s_records(const std::vector<StepTrace>& traces);

/// Plane state of a record: [p, v] or [x, p, v].
Eigen::VectorXd record_state(const S2SRecord& r, int plane, int dim);

struct DisturbanceSamples {
  std::string source;
  int plane = 0;
  int dim = 2;
  std::vector<Eigen::VectorXd> w;
};

/// w_k = x_{k+1} - A x_k - B u_k. Throws InvalidParameter for fewer than 2 records.
DisturbanceSamples estimate_w(const std::vector<S2SRecord>& records, int plane,
                              const LinearS2S& s2s, const std::string& source = "");
DisturbanceSamples estimate_w(const std::vector<S2SRecord>& records, int plane,
                              const ExtendedS2S& s2s, const std::string& source = "");

struct ForceBandResult {
  bool pass = true;
  /// First violating sample, or -1.
  long first_violation = -1;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/**
 * Strict band (1 - c) F_ref < F < (1 + c) F_ref sample-wise. Where
 * |F_ref| < 1 N the band is the absolute |F - F_ref| <= c * 1 N.
 * Throws InvalidParameter on a length mismatch or c outside (0, 1).
 */
ForceBandResult force_band_check(const std::vector<double>& F, const std::vector<double>& F_ref,
                                 double c);

}  // namespace slipwalk
