// Copyright 2026 The gbo-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "gbo/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>

#include "gbo/dense.hpp"
#include "gbo/error.hpp"
#include "gbo/fourier.hpp"

namespace gbo {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(const RealField& f) {
  return {f.samples().data(), static_cast<Eigen::Index>(f.size())};
}

RealField from_vector(const Grid1D& g, const Eigen::VectorXd& v) {
  return RealField(g, std::vector<double>(v.data(), v.data() + v.size()));
}

double dot(const RealField& a, const RealField& b) { return as_vector(a).dot(as_vector(b)); }

// Unit L^2 norm, largest-magnitude sample positive.
RealField normalize_sign(RealField f) {
  const double norm = l2_norm(f);
  std::size_t arg = 0;
  for (std::size_t j = 1; j < f.size(); ++j) {
    if (std::abs(f[j]) > std::abs(f[arg])) arg = j;
  }
  f *= (f[arg] < 0.0 ? -1.0 : 1.0) / norm;
  return f;
}

// f minus its component along q.
RealField project_out(RealField f, const RealField& q) {
  f.axpy(-dot(f, q) / dot(q, q), q);
  return f;
}

}  // namespace

Grid1D spectral_grid(double p, std::size_t n) {
  const Grid1D resolved = resolved_grid(p, n, 1e-10);
  return Grid1D(n, std::min(resolved.half_length(), 400.0));
}

struct LinearizedOperator::DenseCache {
  std::once_flag matrix_once;
  Eigen::MatrixXd matrix;
  std::once_flag bordered_once;
  std::optional<dense::LuFactorization> bordered;
};

LinearizedOperator::LinearizedOperator(GroundState ground)
    : ground_(std::move(ground)),
      potential_(ground_.grid()),
      q_prime_(derivative(ground_.field)),
      dense_(std::make_shared<DenseCache>()) {
  const double p = ground_.p;
  for (std::size_t j = 0; j < potential_.size(); ++j) {
    potential_[j] = p * std::pow(std::abs(ground_.field[j]), p - 1.0);
  }
}

LinearizedOperator build_operator(const GroundState& q) { return LinearizedOperator(q); }

RealField LinearizedOperator::apply(const RealField& f) const {
  require_same_grid(f, potential_);
  RealField out = frac_dispersion(f);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += (1.0 - potential_[j]) * f[j];
  return out;
}

const Eigen::MatrixXd& LinearizedOperator::matrix() const {
  require(dense_available(), ErrorCode::kInvalidArgument,
          "dense operator requested on " + std::to_string(grid().n_points()) + " points; the limit is " +
              std::to_string(kDenseLimit));
  std::call_once(dense_->matrix_once, [this] {
    Eigen::MatrixXd m = dense::multiplier_matrix(grid(), [](double xi) { return Complex(1.0 + std::abs(xi)); });
    // The circulant is symmetric in exact arithmetic; remove FFT rounding.
    m = 0.5 * (m + m.transpose()).eval();
    for (Eigen::Index j = 0; j < m.rows(); ++j) m(j, j) -= potential_[static_cast<std::size_t>(j)];
    dense_->matrix = std::move(m);
  });
  return dense_->matrix;
}

RealField LinearizedOperator::apply_dense(const RealField& f) const {
  require_same_grid(f, potential_);
  return from_vector(grid(), matrix() * as_vector(f));
}

double LinearizedOperator::asymmetry() const {
  const Eigen::MatrixXd& m = matrix();
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Spectra

NegativeEigen negative_eigenpair(const LinearizedOperator& op, int count) {
  const dense::SymmetricEigen eig = dense::lowest_eigenpairs(op.matrix(), count);
  NegativeEigen out;
  out.lowest.assign(eig.values.data(), eig.values.data() + eig.values.size());
  const auto negatives = std::count_if(out.lowest.begin(), out.lowest.end(), [](double v) { return v < -1e-6; });
  require(negatives == 1, ErrorCode::kSpectrumAnomaly,
          "expected exactly one negative eigenvalue, found " + std::to_string(negatives));
  out.kappa = -out.lowest.front();
  out.chi0 = normalize_sign(from_vector(op.grid(), eig.vectors.col(0)));
  return out;
}

double localization_score(const RealField& f) {
  const Grid1D& g = f.grid();
  const double inner = 0.25 * g.half_length();
  double in = 0.0, total = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double w = f[j] * f[j];
    total += w;
    if (std::abs(g.point(j)) <= inner) in += w;
  }
  return total > 0.0 ? in / total : 0.0;
}

EdgeEigen edge_eigenpairs(const LinearizedOperator& op, double localization_threshold) {
  require(op.p() > 3.0, ErrorCode::kBadExponent, "edge eigenpairs exist only for p > 3");
  const Grid1D& g = op.grid();
  const Eigen::MatrixXd d1 = dense::multiplier_matrix(g, [](double xi) { return Complex(0.0, xi); });
  const Eigen::MatrixXd a = d1 * op.matrix();
  const std::vector<Complex> spectrum = dense::eigenvalues(a);

  EdgeEigen out;
  double scale = 0.0;
  for (const Complex& z : spectrum) scale = std::max(scale, std::abs(z));
  for (const Complex& z : spectrum) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const Complex& w : spectrum) nearest = std::min(nearest, std::abs(w + z));
    out.pairing_defect = std::max(out.pairing_defect, nearest);
    if (std::abs(z.imag()) <= 1e-10 * scale && std::abs(z.real()) > 1e-3) out.real_eigenvalues.push_back(z);
  }
  std::vector<double> candidates;
  for (const Complex& z : out.real_eigenvalues) {
    if (z.real() > 0.0) candidates.push_back(z.real());
  }
  std::sort(candidates.begin(), candidates.end(), std::greater<>());

  for (double e : candidates) {
    const bool paired = std::any_of(out.real_eigenvalues.begin(), out.real_eigenvalues.end(),
                                    [&](const Complex& z) { return std::abs(z.real() + e) <= 1e-6 * e; });
    if (!paired) continue;
    RealField yp = normalize_sign(from_vector(g, dense::inverse_iteration(a, e)));
    RealField ym = normalize_sign(from_vector(g, dense::inverse_iteration(a, -e)));
    const double lp = localization_score(yp), lm = localization_score(ym);
    if (lp < localization_threshold || lm < localization_threshold) continue;
    out.e0 = e;
    out.y_plus = std::move(yp);
    out.y_minus = std::move(ym);
    out.localization_plus = lp;
    out.localization_minus = lm;
    return out;
  }
  throw Error(ErrorCode::kNoRealPair, "no localized real +-e0 pair among " +
                                          std::to_string(candidates.size()) + " positive real eigenvalues");
}

DualEigen dual_eigenpairs(const LinearizedOperator& op, const EdgeEigen& edge) {
  const RealField ly_minus = op.apply_dense(edge.y_minus);
  const RealField ly_plus = op.apply_dense(edge.y_plus);
  const double np = inner_product(ly_minus, edge.y_plus);
  const double nm = inner_product(ly_plus, edge.y_minus);
  const double guard = 1e-10 * l2_norm(ly_minus) * l2_norm(edge.y_plus);
  require(std::abs(np) > guard && std::abs(nm) > guard, ErrorCode::kDegenerateNormalization,
          "(L Y-, Y+) vanishes; the duals cannot be normalized");
  DualEigen out;
  out.z_plus = (1.0 / np) * ly_minus;
  out.z_minus = (1.0 / nm) * ly_plus;
  return out;
}

// ---------------------------------------------------------------------------
// Inversion on the complement of the kernel

RealField invert_on_complement_dense(const LinearizedOperator& op, const RealField& g) {
  auto& cache = *op.dense_;
  std::call_once(cache.bordered_once, [&] {
    const Eigen::MatrixXd& m = op.matrix();
    const Eigen::Index n = m.rows();
    Eigen::MatrixXd b(n + 1, n + 1);
    b.topLeftCorner(n, n) = m;
    const Eigen::VectorXd q = as_vector(op.kernel_direction()) / as_vector(op.kernel_direction()).norm();
    b.topRightCorner(n, 1) = q;
    b.bottomLeftCorner(1, n) = q.transpose();
    b(n, n) = 0.0;
    cache.bordered.emplace(std::move(b));
  });
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = as_vector(g);
  rhs(n) = 0.0;
  const Eigen::VectorXd sol = cache.bordered->solve(rhs);
  return from_vector(op.grid(), sol.head(n));
}

namespace {

// MINRES on K = S P L P S, S = (1 + |D|)^{-1/2}, P the projector off Q'.
// K is symmetric; f = P S z.
RealField invert_on_complement_minres(const LinearizedOperator& op, const RealField& g, const InvertOptions& options) {
  const RealField& q = op.kernel_direction();
  auto half_resolvent = [](const RealField& f) {
    return apply_multiplier(f, [](double xi) { return Complex(1.0 / std::sqrt(1.0 + std::abs(xi))); });
  };
  auto k_apply = [&](const RealField& z) {
    return half_resolvent(project_out(op.apply(project_out(half_resolvent(z), q)), q));
  };

  const RealField b = half_resolvent(g);
  const Grid1D& grid = op.grid();
  RealField x(grid), w(grid), w1(grid), w2(grid);
  RealField r1 = b, r2 = b, y = b;
  const double beta1 = std::sqrt(dot(b, b));
  if (beta1 == 0.0) return x;
  double beta = beta1, oldb = 0.0, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  bool converged = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    const double s = 1.0 / beta;
    RealField v = s * y;
    y = k_apply(v);
    if (it > 0) y.axpy(-beta / oldb, r1);
    const double alfa = dot(v, y);
    y.axpy(-alfa / beta, r2);
    r1 = r2;
    r2 = y;
    oldb = beta;
    beta = std::sqrt(dot(r2, r2));
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::min());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    w1 = w2;
    w2 = w;
    w = v;
    w.axpy(-oldeps, w1);
    w.axpy(-delta, w2);
    w *= 1.0 / gamma;
    x.axpy(phi, w);
    if (phibar <= options.tol * beta1) {
      converged = true;
      break;
    }
  }
  require(converged, ErrorCode::kSolveFailure, "MINRES did not reach its tolerance");
  return project_out(half_resolvent(x), q);
}

}  // namespace

RealField invert_on_complement(const LinearizedOperator& op, const RealField& g, const InvertOptions& options) {
  require_same_grid(g, op.potential());
  const RealField& q = op.kernel_direction();
  const double gn = l2_norm(g);
  const double qn = l2_norm(q);
  require(std::abs(inner_product(g, q)) <= 1e-8 * gn * qn, ErrorCode::kNotOrthogonal,
          "right-hand side is not orthogonal to Q'");
  if (gn == 0.0) return RealField(op.grid());

  InvertMethod method = options.method;
  if (method == InvertMethod::kAuto) {
    method = op.grid().n_points() <= 2048 ? InvertMethod::kDense : InvertMethod::kIterative;
  }
  RealField f = method == InvertMethod::kDense ? invert_on_complement_dense(op, g)
                                               : invert_on_complement_minres(op, g, options);
  f = project_out(std::move(f), q);
  const double residual = l2_norm(op.apply(f) - g) / gn;
  require(std::isfinite(residual) && residual <= 1e-6, ErrorCode::kSolveFailure,
          "kernel inversion residual " + std::to_string(residual));
  return f;
}

RealField solve_A0(const LinearizedOperator& op, int sigma_j, const InvertOptions& options) {
  require(sigma_j == 1 || sigma_j == -1, ErrorCode::kInvalidArgument, "sigma must be +1 or -1");
  const GroundState& gs = op.ground();
  // p Q^{p-1} is the potential; the right side is even, hence orthogonal to Q'.
  RealField rhs = (gs.kappa0 * sigma_j) * op.potential();
  RealField a = invert_on_complement(op, rhs, options);
  // Restore exact evenness lost to rounding.
  const RealField r = a.reflected();
  a += r;
  a *= 0.5;
  return a;
}

namespace {

// -int_y^{L} g, exact for the trigonometric interpolant: the mean of g
// contributes a linear ramp and the rest a periodic antiderivative.
RealField tail_integral(const RealField& g) {
  const Grid1D& grid = g.grid();
  const double mean = integral(g) / grid.length();
  RealField zero_mean = g;
  for (double& v : zero_mean.samples()) v -= mean;
  const RealField anti = apply_multiplier(zero_mean, [](double xi) {
    return xi == 0.0 ? Complex(0.0) : Complex(0.0, -1.0 / xi);
  });
  // anti' = zero_mean; its value at y = L equals its value at y = -L.
  const double at_end = anti[0];
  RealField out(grid);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double y = grid.point(j);
    out[j] = mean * (y - grid.half_length()) + anti[j] - at_end;
  }
  return out;
}

double window_mean(const RealField& f, double lo, double hi) {
  double s = 0.0;
  int count = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double y = f.grid().point(j);
    if (y >= lo && y <= hi) {
      s += f[j];
      ++count;
    }
  }
  require(count > 0, ErrorCode::kWindowTooNarrow, "plateau window holds no samples");
  return s / count;
}

}  // namespace

B0Profile solve_B0(const LinearizedOperator& op, double a_ij, int sigma_i, int sigma_j, double compatibility_tol,
                   const InvertOptions& options) {
  require((sigma_i == 1 || sigma_i == -1) && (sigma_j == 1 || sigma_j == -1), ErrorCode::kInvalidArgument,
          "sigma must be +1 or -1");
  const GroundState& gs = op.ground();
  const Grid1D& grid = op.grid();
  const double p = gs.p;
  const double half_length = grid.half_length();

  // (y Q^{p-1})' with the same boundary window as Lambda.
  RealField weighted(grid);
  for (std::size_t j = 0; j < weighted.size(); ++j) {
    const double y = grid.point(j);
    weighted[j] = boundary_window(y, half_length) * y * std::pow(gs.field[j], p - 1.0);
  }
  const RealField lambda_q = scaling_generator(gs.field, p);
  RealField g = (-a_ij * sigma_i) * lambda_q;
  g.axpy(-2.0 * p * gs.kappa0 * sigma_j, derivative(weighted));

  B0Profile out;
  out.source = g;
  out.compatibility = std::abs(inner_product(g, gs.field)) / (l2_norm(g) * l2_norm(gs.field));
  require(out.compatibility <= compatibility_tol, ErrorCode::kCompatibilityFailure,
          "source pairs with Q at " + std::to_string(out.compatibility) + " relative; a_ij is inconsistent");

  // B = f0 + G with G = -int_y^inf g and L f0 = -H g - p Q^{p-1} G.
  out.tail_integral = tail_integral(g);
  RealField rhs = -1.0 * hilbert_transform(g);
  for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] -= op.potential()[j] * out.tail_integral[j];
  // (rhs, Q') = -(g, Q), zero up to the compatibility defect checked above.
  rhs = project_out(std::move(rhs), op.kernel_direction());
  RealField b = invert_on_complement(op, rhs, options) + out.tail_integral;
  out.profile = project_out(std::move(b), op.kernel_direction());

  out.left_plateau = window_mean(out.profile, -0.95 * half_length, -0.85 * half_length);
  out.right_plateau = window_mean(out.profile, 0.85 * half_length, 0.95 * half_length);
  out.expected_left = -a_ij * sigma_i * (p - 2.0) / (p - 1.0) * gs.int_Q;
  return out;
}

}  // namespace gbo
