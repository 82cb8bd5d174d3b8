#include "risradar/uqp.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "risradar/rng.hpp"

namespace risradar {

namespace {

// Largest Ritz value of a symmetric matrix after `steps` Lanczos iterations
// with full reorthogonalization. Never exceeds the true largest eigenvalue
// (up to round-off).
double lanczosLargest(const RMat &a, int steps) {
  const Eigen::Index n = a.rows();
  const Eigen::Index k = std::min<Eigen::Index>(steps, n);
  RMat basis(n, k);
  RVec alpha(k);
  RVec beta(k);

  CounterRng rng(0x5eedULL);
  RVec q(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    q[i] = rng.normal();
  }
  q.normalize();

  Eigen::Index used = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    basis.col(j) = q;
    RVec r = a * q;
    alpha[j] = q.dot(r);
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass) {
      r -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * r);
    }
    used = j + 1;
    beta[j] = r.norm();
    if (beta[j] <= 1e-12 * std::abs(alpha[j]) + 1e-300) {
      break;
    }
    q = r / beta[j];
  }

  RMat t = RMat::Zero(used, used);
  for (Eigen::Index j = 0; j < used; ++j) {
    t(j, j) = alpha[j];
    if (j + 1 < used) {
      t(j, j + 1) = beta[j];
      t(j + 1, j) = beta[j];
    }
  }
  Eigen::SelfAdjointEigenSolver<RMat> eig(t, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

double largestEigenvalueSymmetric(const RMat &a) {
  Eigen::SelfAdjointEigenSolver<RMat> eig(a, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver failed");
  }
  return eig.eigenvalues().maxCoeff();
}

} // namespace

ChannelTerms buildChannelTerms(const Scene &scene, const ChannelMatrix &g,
                               const CVec &u, const CVec &w) {
  const int n = scene.geometry.n_radar;
  const int m = scene.geometry.m_ris;
  if (u.size() != n || w.size() != n) {
    throw DimensionError("channel terms: beamformer length mismatch");
  }
  if (m < 1) {
    throw ConfigError("channel terms require a RIS (m_ris >= 1)");
  }
  if (g.g.rows() != m || g.g.cols() != n) {
    throw DimensionError("channel terms: G must be M x N");
  }
  if (u.norm() == 0.0 || w.norm() == 0.0) {
    throw NumericalError("channel terms: zero beamformer");
  }

  // (G^* w)_m = sum_n conj(G_mn) w_n
  const CVec gw = g.g.conjugate() * w;

  ChannelTerms terms;
  auto add = [&](double angle, double power) {
    const CVec a = steeringRadar(scene.geometry, angle);
    const CVec b = steeringRis(scene.geometry, angle + scene.ris_offset_deg);
    const Complex tx = a.transpose() * u;
    terms.h.push_back(std::conj(tx) * b.conjugate().cwiseProduct(gw));
    terms.beta.push_back(w.dot(a) * tx);
    terms.powers.push_back(power);
  };
  add(scene.target_angle_deg, scene.target_power);
  for (const auto &itf : scene.interferences) {
    add(itf.angle_deg, itf.power);
  }
  terms.noise_term = scene.noise_power * w.squaredNorm();
  return terms;
}

FractionParts fractionParts(const ChannelTerms &terms, const CVec &v) {
  FractionParts parts;
  parts.numerator = std::norm(terms.h[0].dot(v) + terms.beta[0]);
  parts.denominator = terms.noise_term;
  for (std::size_t i = 1; i < terms.h.size(); ++i) {
    parts.denominator +=
        terms.powers[i] * std::norm(terms.h[i].dot(v) + terms.beta[i]);
  }
  return parts;
}

double dinkelbachZ(const ChannelTerms &terms, const CVec &v) {
  const FractionParts parts = fractionParts(terms, v);
  if (!(parts.denominator > 0.0)) {
    throw NumericalError("Dinkelbach ratio has a non-positive denominator");
  }
  return parts.ratio();
}

UqpProblem UqpProblem::fromDense(CMat h_mat, CVec h_vec) {
  if (h_mat.rows() != h_mat.cols() || h_mat.rows() != h_vec.size()) {
    throw DimensionError("UQP: H must be square and match h");
  }
  UqpProblem p;
  p.h_mat_ = std::move(h_mat);
  p.h_vec_ = std::move(h_vec);
  Eigen::SelfAdjointEigenSolver<CMat> eig(p.h_mat_, Eigen::EigenvaluesOnly);
  p.lambda2_ = eig.eigenvalues().maxCoeff();
  p.min_eigenvalue_ = eig.eigenvalues().minCoeff();
  return p;
}

UqpProblem buildUqp(const ChannelTerms &terms, double z) {
  if (!(z >= 0.0)) {
    throw NumericalError("Dinkelbach parameter must be non-negative");
  }
  const int m = terms.risSize();
  const Eigen::Index k = static_cast<Eigen::Index>(terms.h.size());

  UqpProblem p;
  p.z_ = z;
  p.factors_.resize(m, k);
  p.weights_.resize(k);
  p.h_vec_ = -terms.beta[0] * terms.h[0];
  p.factors_.col(0) = terms.h[0];
  p.weights_[0] = -1.0;
  for (Eigen::Index i = 1; i < k; ++i) {
    const double weight = z * terms.powers[i];
    p.factors_.col(i) = terms.h[i];
    p.weights_[i] = weight;
    p.h_vec_ += weight * terms.beta[i] * terms.h[i];
  }

  p.lambda_p_ = terms.h[0].squaredNorm() * (1.0 + 1e-3) + 1e-12;

  // Spectrum of the low-rank part F D F^H through a thin QR of F.
  const Eigen::Index rank = std::min<Eigen::Index>(m, k);
  Eigen::HouseholderQR<CMat> qr(p.factors_);
  const CMat q_thin = qr.householderQ() * CMat::Identity(m, rank);
  const CMat r = q_thin.adjoint() * p.factors_;
  const CMat small = r * p.weights_.asDiagonal() * r.adjoint();
  Eigen::SelfAdjointEigenSolver<CMat> eig(small, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("UQP: eigensolver failed on the low-rank core");
  }
  double core_max = eig.eigenvalues().maxCoeff();
  double core_min = eig.eigenvalues().minCoeff();
  if (rank < m) {
    core_max = std::max(core_max, 0.0);
    core_min = std::min(core_min, 0.0);
  }

  p.lambda2_ = p.lambda_p_ + core_max;
  p.lambda_c_ = (static_cast<double>(m) / 8.0) * p.lambda2_ + p.h_vec_.norm();
  p.min_eigenvalue_ = p.lambdaV() + core_min;
  if (!(p.min_eigenvalue_ > 0.0)) {
    std::ostringstream msg;
    msg << "UQP matrix is not positive definite (min eigenvalue "
        << p.min_eigenvalue_ << ")";
    throw NumericalError(msg.str());
  }

  p.h_mat_ = p.factors_ * p.weights_.asDiagonal() * p.factors_.adjoint();
  p.h_mat_.diagonal().array() += p.lambdaV();
  return p;
}

double largestEigenvalueDense(const CMat &h) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(h, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver failed");
  }
  return eig.eigenvalues().maxCoeff();
}

double UqpProblem::shiftedQuadratic(const CVec &x) const {
  if (factors_.size() > 0) {
    const CVec proj = factors_.adjoint() * x;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < proj.size(); ++i) {
      acc += weights_[i] * std::norm(proj[i]);
    }
    return acc;
  }
  return x.dot(h_mat_ * x).real() - lambdaV() * x.squaredNorm();
}

double UqpProblem::objective(const CVec &x) const {
  if (x.size() != size()) {
    throw DimensionError("UQP objective: size mismatch");
  }
  return shiftedQuadratic(x) + lambdaV() * x.squaredNorm() +
         2.0 * x.dot(h_vec_).real();
}

double UqpProblem::objectiveDifference(const CVec &x, const CVec &y) const {
  double norm_diff = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    norm_diff += (std::abs(x[k]) - std::abs(y[k])) *
                 (std::abs(x[k]) + std::abs(y[k]));
  }
  return shiftedQuadratic(x) - shiftedQuadratic(y) + lambdaV() * norm_diff +
         2.0 * (x - y).dot(h_vec_).real();
}

double UqpProblem::reducedObjective(const CVec &v) const {
  return shiftedQuadratic(v) + 2.0 * v.dot(h_vec_).real();
}

CVec euclideanGradient(const UqpProblem &p, const CVec &v) {
  if (v.size() != p.size()) {
    throw DimensionError("gradient: size mismatch");
  }
  return p.hMat() * v + p.hVec();
}

CVec riemannianGradient(const UqpProblem &p, const CVec &v) {
  return projectTangent(v, euclideanGradient(p, v));
}

namespace {

RVec weingartenDiagonal(const CVec &egrad, const CVec &v) {
  RVec q(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    q[k] = (egrad[k] * std::conj(v[k])).real();
  }
  return q;
}

} // namespace

CVec riemannianHessianAction(const UqpProblem &p, const CVec &v,
                             const CVec &xi) {
  const RVec q = weingartenDiagonal(euclideanGradient(p, v), v);
  const CVec y = p.hMat() * xi - q.cast<Complex>().cwiseProduct(xi);
  return projectTangent(v, y);
}

NewtonSystem newtonSystem(const UqpProblem &p, const CVec &v) {
  const Eigen::Index m = v.size();
  const CVec egrad = euclideanGradient(p, v);
  const RVec q = weingartenDiagonal(egrad, v);
  const RMat identity = RMat::Identity(2 * m, 2 * m);

  NewtonSystem sys;
  sys.h_hat = embedMatrix(p.hMat());
  sys.q_hat = embedDiagonal(q);
  sys.v_hat = reflectionMatrix(v);
  const RMat a = sys.h_hat - sys.q_hat;
  const RMat i_minus_v = identity - sys.v_hat;
  sys.hess_r = 0.5 * i_minus_v * a;
  sys.h_h0 = i_minus_v * a * i_minus_v;
  sys.e_hat = toReal(egrad);
  sys.g_hat = 0.5 * i_minus_v * sys.e_hat;

  const RMat bound = sys.h_hat - 0.5 * sys.h_h0;
  sys.lambda1 = largestEigenvalueSymmetric(0.5 * (bound + bound.transpose()));
  return sys;
}

TangentModel tangentModel(const UqpProblem &p, const CVec &v, bool with_bound) {
  const Eigen::Index m = v.size();
  const CVec egrad = euclideanGradient(p, v);
  const RVec q = weingartenDiagonal(egrad, v);

  // B = Diag(v*) H Diag(v)
  const CMat b = v.conjugate().asDiagonal() * p.hMat() * v.asDiagonal();
  const RMat b_re = 0.5 * (b.real() + b.real().transpose());

  TangentModel model;
  model.hessian = b_re;
  model.hessian.diagonal() -= q;
  model.gradient = tangentCoordinates(v, egrad);
  if (!with_bound) {
    return model;
  }

  const RMat b_im = 0.5 * (b.imag() - b.imag().transpose());
  model.bound.resize(2 * m, 2 * m);
  model.bound.topLeftCorner(m, m) = -b_re;
  model.bound.topLeftCorner(m, m).diagonal() += 2.0 * q;
  model.bound.topRightCorner(m, m) = b_im;
  model.bound.bottomLeftCorner(m, m) = b_im.transpose();
  model.bound.bottomRightCorner(m, m) = b_re;
  return model;
}

double loadingFromLambda1(double lambda1, double margin) {
  if (lambda1 > 0.0) {
    return lambda1 * (1.0 + margin) + 1e-10;
  }
  return std::abs(lambda1) * margin + 1e-10;
}

Loading certifiedLoading(const TangentModel &model, double mu_margin) {
  if (model.bound.size() == 0) {
    throw DimensionError("certifiedLoading: model was built without the bound");
  }
  Loading out;
  out.lambda1 = lanczosLargest(model.bound, 48);
  out.mu = loadingFromLambda1(out.lambda1, mu_margin);
  RMat shifted = -model.bound;
  shifted.diagonal().array() += out.mu;
  Eigen::LLT<RMat> certificate(shifted);
  if (certificate.info() != Eigen::Success) {
    out.lambda1 = largestEigenvalueSymmetric(model.bound);
    out.mu = loadingFromLambda1(out.lambda1, mu_margin);
    out.dense = true;
  }
  return out;
}

std::optional<RVec> loadedNewtonStep(const TangentModel &model, double mu) {
  RMat system = model.hessian;
  system.diagonal().array() += 0.5 * mu;
  Eigen::LLT<RMat> llt(system);
  if (llt.info() != Eigen::Success) {
    return std::nullopt;
  }
  RVec c = -llt.solve(model.gradient);
  return c;
}

NewtonDirection improvedNewtonDirection(const UqpProblem &p, const CVec &v,
                                        double mu_margin) {
  const Eigen::Index m = v.size();
  const TangentModel model = tangentModel(p, v);

  NewtonDirection dir;
  const Loading loading = certifiedLoading(model, mu_margin);
  dir.lambda1 = loading.lambda1;
  dir.mu = loading.mu;
  dir.dense_lambda1 = loading.dense;

  if (model.gradient.isZero(0.0)) {
    dir.xi = CVec::Zero(m);
    return dir;
  }

  for (;;) {
    if (auto c = loadedNewtonStep(model, dir.mu)) {
      dir.xi = fromTangentCoordinates(v, *c);
      return dir;
    }
    if (dir.mu_doublings >= 10) {
      throw NumericalError(
          "Newton system is not positive definite after 10 doublings of mu");
    }
    dir.mu *= 2.0;
    ++dir.mu_doublings;
  }
}

CVec improvedNewtonDirectionDense(const UqpProblem &p, const CVec &v,
                                  double mu) {
  const NewtonSystem sys = newtonSystem(p, v);
  RMat system = sys.hess_r;
  system.diagonal().array() += 0.5 * mu;
  const RVec xi = -system.partialPivLu().solve(sys.g_hat);
  return fromReal(xi);
}

} // namespace risradar
