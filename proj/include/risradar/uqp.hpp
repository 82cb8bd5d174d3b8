#pragma once

#include <optional>
#include <string>
#include <vector>

#include "risradar/manifold.hpp"
#include "risradar/scene.hpp"

namespace risradar {

/// Linearization of w^H Phi(theta_i) u = h_i^H v + beta_i with respect to the
/// RIS coefficients. Index 0 is the target, 1..I the interferences.
struct ChannelTerms {
  std::vector<CVec> h;
  std::vector<Complex> beta;
  std::vector<double> powers; ///< sigma_i^2; powers[0] is the target power
  double noise_term = 0.0;    ///< sigma_n^2 w^H w

  int risSize() const { return h.empty() ? 0 : static_cast<int>(h[0].size()); }
  std::size_t interferenceCount() const { return h.empty() ? 0 : h.size() - 1; }
};

ChannelTerms buildChannelTerms(const Scene &scene, const ChannelMatrix &g,
                               const CVec &u, const CVec &w);

/// Numerator |h_0^H v + beta_0|^2 and denominator of the fractional objective.
struct FractionParts {
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio() const { return numerator / denominator; }
};
FractionParts fractionParts(const ChannelTerms &terms, const CVec &v);

/// Dinkelbach parameter z = E(v).
double dinkelbachZ(const ChannelTerms &terms, const CVec &v);

/// Quadratic subproblem f(v) = v^H H v + 2 Re{v^H h} over the complex circle.
///
/// H = sum_i z sigma_i^2 h_i h_i^H - h_0 h_0^H + (lambda_p + lambda_c) I. When
/// built from channel terms the problem also keeps the low-rank description
/// of H - lambda_v I, which evaluates objectives in O(I M) without the
/// lambda_v M offset.
class UqpProblem {
public:
  /// Generic problem with explicit Hermitian H and linear term h; the
  /// regularization constants are reported as zero.
  static UqpProblem fromDense(CMat h_mat, CVec h_vec);

  const CMat &hMat() const { return h_mat_; }
  const CVec &hVec() const { return h_vec_; }
  int size() const { return static_cast<int>(h_vec_.size()); }

  double lambdaP() const { return lambda_p_; }
  double lambdaC() const { return lambda_c_; }
  double lambdaV() const { return lambda_p_ + lambda_c_; }
  /// Largest eigenvalue of H - lambda_c I.
  double lambda2() const { return lambda2_; }
  /// Smallest eigenvalue of H.
  double minEigenvalue() const { return min_eigenvalue_; }
  double z() const { return z_; }

  /// f(x) for any x in C^M, including the lambda_v ||x||^2 term.
  double objective(const CVec &x) const;
  /// f(x) - f(y), evaluated without forming the large lambda_v M offsets.
  double objectiveDifference(const CVec &x, const CVec &y) const;
  /// f(v) - lambda_v M for a unimodular v; this is the value traces report.
  double reducedObjective(const CVec &v) const;

private:
  friend UqpProblem buildUqp(const ChannelTerms &terms, double z);

  /// x^H (H - lambda_v I) x.
  double shiftedQuadratic(const CVec &x) const;

  CMat h_mat_;
  CVec h_vec_;
  double lambda_p_ = 0.0;
  double lambda_c_ = 0.0;
  double lambda2_ = 0.0;
  double min_eigenvalue_ = 0.0;
  double z_ = 0.0;
  // H - lambda_v I = factors * Diag(weights) * factors^H when non-empty.
  CMat factors_;
  RVec weights_;
};

/// Builds the regularized subproblem with lambda_p = ||h_0||^2 (1 + 1e-3) +
/// 1e-12 and lambda_c = (M / 8) lambda_2 + ||h~(z)|| exactly at the bound.
UqpProblem buildUqp(const ChannelTerms &terms, double z);

/// Largest eigenvalue of a Hermitian matrix by dense eigendecomposition.
double largestEigenvalueDense(const CMat &h);

CVec euclideanGradient(const UqpProblem &p, const CVec &v);
CVec riemannianGradient(const UqpProblem &p, const CVec &v);

/// Complex Riemannian Hessian action (H - Q) xi - Diag(v) Re{Diag(v*) (H - Q) xi}
/// with Q = Diag(Re{grad f .* conj(v)}).
CVec riemannianHessianAction(const UqpProblem &p, const CVec &v,
                             const CVec &xi);

/// Dense real Newton system in the 2M-dimensional embedding.
struct NewtonSystem {
  RMat h_hat;   ///< real form of H
  RMat q_hat;   ///< Blockdiag(Q, Q)
  RMat v_hat;   ///< reflection matrix of v
  RMat hess_r;  ///< (1/2)(I - V)(H - Q)
  RMat h_h0;    ///< (I - V)(H - Q)(I - V)
  RVec e_hat;   ///< real Euclidean gradient
  RVec g_hat;   ///< real Riemannian gradient
  double lambda1 = 0.0; ///< max eigenvalue of H - H_h0 / 2
};
NewtonSystem newtonSystem(const UqpProblem &p, const CVec &v);

/// The same Newton model expressed in tangent coordinates (basis j v_m e_m),
/// which is how the solver evaluates it: M x M instead of 2M x 2M.
struct TangentModel {
  RMat hessian;  ///< Re{Diag(v*) H Diag(v)} - Q: the Riemannian Hessian
  RVec gradient; ///< tangent coordinates of grad f
  RMat bound;    ///< H - H_h0 / 2 rotated into the tangent/normal basis
};
/// The 2M x 2M bound is only needed for the certified loading and can be
/// skipped.
TangentModel tangentModel(const UqpProblem &p, const CVec &v,
                          bool with_bound = true);

/// mu = lambda1 (1 + margin) + 1e-10 when lambda1 > 0, else |lambda1| margin + 1e-10.
double loadingFromLambda1(double lambda1, double margin);

struct Loading {
  double mu = 0.0;
  double lambda1 = 0.0;
  bool dense = false; ///< Lanczos estimate failed certification
};

/// mu anchored above lambda1 = lambda_max(H - H_h0 / 2). A Lanczos estimate of
/// lambda1 is certified by a Cholesky factorization of mu I - (H - H_h0 / 2);
/// when that fails the exact dense eigenvalue is used instead.
Loading certifiedLoading(const TangentModel &model, double mu_margin);

/// Tangent coordinates of -(Hess + mu/2 I)^{-1} grad, or nothing when the
/// loaded Hessian is not positive definite.
std::optional<RVec> loadedNewtonStep(const TangentModel &model, double mu);

struct NewtonDirection {
  CVec xi;
  double mu = 0.0;
  double lambda1 = 0.0;
  int mu_doublings = 0;
  bool dense_lambda1 = false; ///< estimate could not be certified
};

/// Improved Riemannian Newton direction -(Hess_R + mu/2 I)^{-1} g with the
/// certified loading.
NewtonDirection improvedNewtonDirection(const UqpProblem &p, const CVec &v,
                                        double mu_margin);

/// Reference path: solves the unsymmetric 2M x 2M system exactly as written,
/// (Hess_R + mu/2 I) xi = -g, with an LU factorization.
CVec improvedNewtonDirectionDense(const UqpProblem &p, const CVec &v,
                                  double mu);

/// Certified: every step uses the loading anchored above lambda1, which makes
/// each step non-increasing by construction.
/// Adaptive: starts from a small loading and accepts a step when the actual
/// decrease is at least a fraction of the model decrease; rejected steps raise
/// mu, falling back to the certified loading once the estimate is exceeded.
enum class MuPolicy { Adaptive, Certified };

std::string toString(MuPolicy p);
MuPolicy parseMuPolicy(const std::string &name);

struct RnmConfig {
  double tol_f = 1e-8;
  int max_iter = 500;
  double mu_margin = 1e-3;
  MuPolicy mu_policy = MuPolicy::Adaptive;

  void validate() const;
};

struct InnerSolveTrace {
  std::vector<double> f;          ///< reduced objective, f[0] at the start
  std::vector<double> mu;         ///< loading (RNM) or accepted step (RGD/RCG)
  std::vector<double> grad_norm;
  std::vector<double> millis;
  /// f(v + xi) - f(v) per RNM step (must be <= 0).
  std::vector<double> ambient_change;
  /// f(R(v + xi)) - f(v + xi) per RNM step (must be <= 0).
  std::vector<double> retraction_change;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  int dense_fallbacks = 0;
  int rejected_steps = 0;  ///< adaptive policy: steps retried with larger mu
  int certified_steps = 0; ///< steps taken with the certified loading

  /// Rows of (iteration, f, mu, grad_norm, millis). Without the millis
  /// column the output is identical across runs.
  std::string toCsv(bool with_millis = true) const;
};

struct UqpSolution {
  CcmPoint v;
  InnerSolveTrace trace;
};

/// Slack allowed on f(v_next) <= f(v) for a value of magnitude |f|.
inline double monotoneSlack(double f) {
  return 1e-9 * std::max(1.0, std::abs(f));
}

UqpSolution rnmSolve(const UqpProblem &p, const CcmPoint &v0,
                     const RnmConfig &cfg);

struct LineSearchConfig {
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 50;
};

UqpSolution rgdSolve(const UqpProblem &p, const CcmPoint &v0,
                     const RnmConfig &cfg, const LineSearchConfig &ls = {});
UqpSolution rcgSolve(const UqpProblem &p, const CcmPoint &v0,
                     const RnmConfig &cfg, const LineSearchConfig &ls = {});

enum class UqpSolver { Rnm, Rcg, Rgd };

std::string toString(UqpSolver s);
UqpSolver parseSolver(const std::string &name);

UqpSolution solveUqp(UqpSolver solver, const UqpProblem &p,
                     const CcmPoint &v0, const RnmConfig &cfg);

} // namespace risradar
