#include "quatkmp/kmp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#ifdef QUATKMP_HAS_QUADMATH
#include <quadmath.h>
#endif

namespace quatkmp::kmp {

namespace {

#ifdef QUATKMP_HAS_QUADMATH
using Wide = __float128;
inline Wide wide_exp(Wide x) { return expq(x); }
inline Wide wide_sin(Wide x) { return sinq(x); }
const Wide kWidePi = M_PIq;
#else
using Wide = long double;
inline Wide wide_exp(Wide x) { return expl(x); }
inline Wide wide_sin(Wide x) { return sinl(x); }
const Wide kWidePi = 3.141592653589793238462643383279502884L;
#endif

Wide kernel_wide(const KernelSpec& spec, Wide a, Wide b) {
  const Wide diff = a - b;
  if (spec.kind == KernelSpec::Kind::gaussian) {
    return wide_exp(-static_cast<Wide>(spec.ell) * diff * diff);
  }
  const Wide s = wide_sin(kWidePi * diff / static_cast<Wide>(spec.period));
  return wide_exp(-static_cast<Wide>(spec.ell) * s * s);
}

constexpr int kMaxOrder = 3;
constexpr double kBinomial[kMaxOrder + 1][kMaxOrder + 1] = {
    {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};

void check_spec(const KernelSpec& spec) {
  if (!(spec.ell > 0.0) || !(spec.delta > 0.0)) {
    throw std::invalid_argument("kernel needs ell > 0 and delta > 0");
  }
  if (spec.kind == KernelSpec::Kind::periodic && !(spec.period > 0.0)) {
    throw std::invalid_argument("periodic kernel needs period > 0");
  }
}

double scalar_time(const Eigen::VectorXd& v, const char* what) {
  if (v.size() != 1) {
    throw LayoutError(std::string(what) + ": time layouts take 1-D inputs, got " +
                      std::to_string(v.size()));
  }
  return v[0];
}

}  // namespace

KernelSpec KernelSpec::gaussian_kernel(double ell, double delta) {
  KernelSpec spec{Kind::gaussian, ell, 0.0, delta};
  check_spec(spec);
  return spec;
}

KernelSpec KernelSpec::periodic_kernel(double ell, double period, double delta) {
  KernelSpec spec{Kind::periodic, ell, period, delta};
  check_spec(spec);
  return spec;
}

BlockLayout BlockLayout::plain(int dim) {
  if (dim < 1) throw LayoutError("plain layout needs a positive dimension");
  return {Kind::plain, dim};
}

std::vector<int> BlockLayout::derivative_orders() const {
  switch (kind) {
    case Kind::time_deriv:
      return {0, 1};
    case Kind::time_accel:
      return {0, 1, 2};
    case Kind::time_jerk:
      return {0, 1, 3};
    case Kind::plain:
      return {};
  }
  return {};
}

double kernel_value(const KernelSpec& spec, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b) {
  check_spec(spec);
  if (a.size() != b.size()) {
    throw DimError("kernel inputs have mismatched dimensions");
  }
  if (spec.kind == KernelSpec::Kind::gaussian) {
    return std::exp(-spec.ell * (a - b).squaredNorm());
  }
  if (a.size() != 1) {
    throw LayoutError("periodic kernel is defined for 1-D inputs only");
  }
  const double s = std::sin(std::numbers::pi * (a[0] - b[0]) / spec.period);
  return std::exp(-spec.ell * s * s);
}

double kernel_fd(const KernelSpec& spec, int order_i, int order_j, double ti,
                 double tj) {
  check_spec(spec);
  if (order_i < 0 || order_i > kMaxOrder || order_j < 0 || order_j > kMaxOrder) {
    throw std::invalid_argument("kernel_fd supports derivative orders 0..3");
  }
  // Both kernels are even in ti - tj, so k_pq(ti, tj) = k_qp(tj, ti) holds
  // exactly; dispatching to one canonical orientation makes the identity
  // bitwise and keeps assembled Gram matrices exactly symmetric.
  if (order_i > order_j || (order_i == order_j && ti > tj)) {
    return kernel_fd(spec, order_j, order_i, tj, ti);
  }
  const Wide delta = spec.delta;
  Wide sum = 0;
  for (int a = 0; a <= order_i; ++a) {
    for (int b = 0; b <= order_j; ++b) {
      const int parity = (order_i - a) + (order_j - b);
      const Wide coeff = (parity % 2 == 0 ? 1.0 : -1.0) *
                         kBinomial[order_i][a] * kBinomial[order_j][b];
      sum += coeff * kernel_wide(spec, static_cast<Wide>(ti) + a * delta,
                                 static_cast<Wide>(tj) + b * delta);
    }
  }
  Wide scale = 1;
  for (int k = 0; k < order_i + order_j; ++k) scale *= delta;
  return static_cast<double>(sum / scale);
}

Eigen::MatrixXd kernel_block(const KernelSpec& spec, const BlockLayout& layout,
                             const Eigen::VectorXd& a,
                             const Eigen::VectorXd& b) {
  if (layout.kind == BlockLayout::Kind::plain) {
    return kernel_value(spec, a, b) *
           Eigen::MatrixXd::Identity(layout.out_dim, layout.out_dim);
  }
  const double ti = scalar_time(a, "kernel_block");
  const double tj = scalar_time(b, "kernel_block");
  // Evenness of the kernels makes block(ti, tj) = block(tj, ti)^T exact;
  // evaluating one canonical orientation keeps it bitwise.
  if (ti > tj) {
    return kernel_block(spec, layout, b, a).transpose();
  }
  const std::vector<int> orders = layout.derivative_orders();
  const int rows = static_cast<int>(orders.size());
  const int max_order = orders.back();

  // All stencils share the same table of shifted kernel values.
  const Wide delta = spec.delta;
  Wide table[kMaxOrder + 1][kMaxOrder + 1];
  for (int shift_i = 0; shift_i <= max_order; ++shift_i) {
    for (int shift_j = 0; shift_j <= max_order; ++shift_j) {
      table[shift_i][shift_j] =
          kernel_wide(spec, static_cast<Wide>(ti) + shift_i * delta,
                      static_cast<Wide>(tj) + shift_j * delta);
    }
  }

  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(3 * rows, 3 * rows);
  for (int oi = 0; oi < rows; ++oi) {
    for (int oj = 0; oj < rows; ++oj) {
      const int p = orders[oi];
      const int q = orders[oj];
      Wide sum = 0;
      for (int shift_i = 0; shift_i <= p; ++shift_i) {
        for (int shift_j = 0; shift_j <= q; ++shift_j) {
          const int parity = (p - shift_i) + (q - shift_j);
          const Wide coeff = (parity % 2 == 0 ? 1.0 : -1.0) *
                             kBinomial[p][shift_i] * kBinomial[q][shift_j];
          sum += coeff * table[shift_i][shift_j];
        }
      }
      Wide scale = 1;
      for (int k = 0; k < p + q; ++k) scale *= delta;
      block.block<3, 3>(3 * oi, 3 * oj) =
          static_cast<double>(sum / scale) * Eigen::Matrix3d::Identity();
    }
  }
  return block;
}

Model fit(const std::vector<gmm::RefPoint>& reference, const KernelSpec& spec,
          const BlockLayout& layout, double lambda) {
  check_spec(spec);
  if (reference.empty()) {
    throw std::invalid_argument("cannot fit an empty reference trajectory");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("lambda must be positive");
  }
  const int block_dim = layout.out_dim;
  const int n = static_cast<int>(reference.size());
  const Eigen::Index input_dim = reference.front().input.size();
  for (const gmm::RefPoint& point : reference) {
    if (point.mean.size() != block_dim || point.cov.rows() != block_dim ||
        point.cov.cols() != block_dim || point.input.size() != input_dim) {
      throw DimError("reference point does not match the layout dimensions");
    }
  }

  const int total = n * block_dim;
  Eigen::MatrixXd system(total, total);
  Eigen::VectorXd mu(total);
  for (int i = 0; i < n; ++i) {
    mu.segment(i * block_dim, block_dim) = reference[i].mean;
    for (int j = i; j < n; ++j) {
      const Eigen::MatrixXd block =
          kernel_block(spec, layout, reference[i].input, reference[j].input);
      system.block(i * block_dim, j * block_dim, block_dim, block_dim) = block;
      if (j > i) {
        system.block(j * block_dim, i * block_dim, block_dim, block_dim) =
            block.transpose();
      }
    }
    system.block(i * block_dim, i * block_dim, block_dim, block_dim) +=
        lambda * reference[i].cov;
  }

  Eigen::VectorXd dual;
  double rcond = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() == Eigen::Success) {
    rcond = llt.rcond();
    dual = llt.solve(mu);
  } else {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() != Eigen::Success) {
      throw SolveError("regularized Gram matrix could not be factorized");
    }
    rcond = ldlt.rcond();
    dual = ldlt.solve(mu);
  }
  if (!(rcond > 1e-14)) {
    throw SolveError("regularized Gram matrix is numerically singular "
                     "(condition estimate above 1e14)");
  }
  if (!dual.allFinite()) {
    throw SolveError("dual coefficients are not finite");
  }

  Model model;
  model.train_inputs.reserve(n);
  for (const gmm::RefPoint& point : reference) {
    model.train_inputs.push_back(point.input);
  }
  model.kernel = spec;
  model.layout = layout;
  model.lambda = lambda;
  model.dual_coeffs = std::move(dual);
  return model;
}

Model fit_constrained(const std::vector<gmm::RefPoint>& reference,
                      const KernelSpec& spec, double lambda,
                      double lambda_accel, PenaltyOrder order) {
  if (!(lambda_accel > 0.0)) {
    throw std::invalid_argument("lambda_accel must be positive");
  }
  for (const gmm::RefPoint& point : reference) {
    if (point.mean.size() != 6) {
      throw DimError("smoothness-constrained fit expects 6-dim reference points");
    }
  }
  std::vector<gmm::RefPoint> augmented;
  augmented.reserve(reference.size());
  for (const gmm::RefPoint& point : reference) {
    gmm::RefPoint aug;
    aug.input = point.input;
    aug.mean = Eigen::VectorXd::Zero(9);
    aug.mean.head<6>() = point.mean;
    aug.cov = Eigen::MatrixXd::Zero(9, 9);
    aug.cov.topLeftCorner<6, 6>() = point.cov;
    aug.cov.bottomRightCorner<3, 3>() =
        (1.0 / lambda_accel) * Eigen::Matrix3d::Identity();
    augmented.push_back(std::move(aug));
  }
  const BlockLayout layout = order == PenaltyOrder::acceleration
                                 ? BlockLayout::time_accel()
                                 : BlockLayout::time_jerk();
  Model model = fit(augmented, spec, layout, lambda);
  model.lambda_accel = lambda_accel;
  return model;
}

Eigen::VectorXd predict(const Model& model, const Eigen::VectorXd& query) {
  const int block_dim = model.layout.out_dim;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(block_dim);
  for (std::size_t i = 0; i < model.train_inputs.size(); ++i) {
    out.noalias() +=
        kernel_block(model.kernel, model.layout, query, model.train_inputs[i]) *
        model.dual_coeffs.segment(i * block_dim, block_dim);
  }
  return out;
}

std::vector<gmm::RefPoint> extend_reference(
    const std::vector<gmm::RefPoint>& reference,
    const std::vector<DesiredPoint>& desired) {
  std::vector<gmm::RefPoint> extended = reference;
  const Eigen::Index out_dim =
      reference.empty() ? (desired.empty() ? 0 : desired.front().mean.size())
                        : reference.front().mean.size();
  extended.reserve(reference.size() + desired.size());
  for (const DesiredPoint& point : desired) {
    if (point.mean.size() != out_dim || point.cov.rows() != out_dim ||
        point.cov.cols() != out_dim) {
      throw DimError("desired point output dimension does not match reference");
    }
    extended.push_back({point.input, point.mean, point.cov});
  }
  return extended;
}

}  // namespace quatkmp::kmp
