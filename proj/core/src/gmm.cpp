#include "quatkmp/gmm.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "quatkmp/rng.hpp"

namespace quatkmp::gmm {

namespace {

constexpr double kCollapsePrior = 1e-8;

struct ComponentDensity {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double log_norm = 0.0;  // -(d/2) log(2 pi) - (1/2) log det

  void init(const Eigen::MatrixXd& cov, const char* what) {
    llt.compute(cov);
    if (llt.info() != Eigen::Success) {
      throw FitError(std::string(what) + ": covariance not positive definite");
    }
    const double log_det =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double d = static_cast<double>(cov.rows());
    log_norm = -0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det);
  }

  double log_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean) const {
    const Eigen::VectorXd delta = x - mean;
    const Eigen::VectorXd half = llt.matrixL().solve(delta);
    return log_norm - 0.5 * half.squaredNorm();
  }
};

double log_sum_exp(const Eigen::VectorXd& values) {
  const double peak = values.maxCoeff();
  if (!std::isfinite(peak)) return peak;
  return peak + std::log((values.array() - peak).exp().sum());
}

// k-means++ seeding followed by one Lloyd pass; returns hard assignments.
std::vector<int> kmeans_init(const Eigen::MatrixXd& data, int n_clusters,
                             Rng& rng) {
  const int n = static_cast<int>(data.rows());
  std::vector<Eigen::VectorXd> centers;
  centers.reserve(n_clusters);
  centers.push_back(data.row(static_cast<int>(rng.uniform() * n)));
  Eigen::VectorXd dist2 =
      (data.rowwise() - centers[0].transpose()).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < n_clusters) {
    const double total = dist2.sum();
    int pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (; pick + 1 < n; ++pick) {
        u -= dist2[pick];
        if (u < 0.0) break;
      }
    } else {
      pick = static_cast<int>(rng.uniform() * n);
    }
    centers.push_back(data.row(pick));
    dist2 = dist2.cwiseMin(
        (data.rowwise() - centers.back().transpose()).rowwise().squaredNorm());
  }

  std::vector<int> assign(n, 0);
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < n_clusters; ++c) {
        const double d = (data.row(i).transpose() - centers[c]).squaredNorm();
        if (d < best) {
          best = d;
          assign[i] = c;
        }
      }
    }
    if (pass == 1) break;
    for (int c = 0; c < n_clusters; ++c) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(data.cols());
      int members = 0;
      for (int i = 0; i < n; ++i) {
        if (assign[i] == c) {
          sum += data.row(i);
          ++members;
        }
      }
      if (members > 0) centers[c] = sum / members;
    }
  }
  return assign;
}

}  // namespace

GaussianMixture fit_em(const Eigen::MatrixXd& data, int input_dim,
                       int n_components, std::uint64_t seed,
                       const EmOptions& opts,
                       std::vector<double>* loglik_trace) {
  const int n = static_cast<int>(data.rows());
  const int dim = static_cast<int>(data.cols());
  if (n_components < 1) throw FitError("need at least one component");
  if (n < n_components) {
    throw FitError("more components (" + std::to_string(n_components) +
                   ") than samples (" + std::to_string(n) + ")");
  }
  if (input_dim < 1 || input_dim >= dim) {
    throw DimError("input_dim must be in [1, dim)");
  }

  GaussianMixture g;
  g.input_dim = input_dim;
  g.output_dim = dim - input_dim;
  g.components.resize(n_components);

  // Initialize from hard cluster assignments.
  Rng rng(seed);
  const std::vector<int> assign = kmeans_init(data, n_components, rng);
  const Eigen::VectorXd global_mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - global_mean.transpose();
  const Eigen::MatrixXd global_cov =
      centered.transpose() * centered / n +
      opts.cov_reg * Eigen::MatrixXd::Identity(dim, dim);
  for (int c = 0; c < n_components; ++c) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    int members = 0;
    for (int i = 0; i < n; ++i) {
      if (assign[i] == c) {
        mean += data.row(i);
        ++members;
      }
    }
    GaussianComponent& comp = g.components[c];
    if (members == 0) {
      comp.prior = 1.0 / n;
      comp.mean = data.row(static_cast<int>(rng.uniform() * n));
      comp.cov = global_cov;
      continue;
    }
    mean /= members;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < n; ++i) {
      if (assign[i] == c) {
        const Eigen::VectorXd delta = data.row(i).transpose() - mean;
        cov += delta * delta.transpose();
      }
    }
    cov /= members;
    cov += opts.cov_reg * Eigen::MatrixXd::Identity(dim, dim);
    comp.prior = static_cast<double>(members) / n;
    comp.mean = mean;
    comp.cov = (members >= 2) ? cov : global_cov;
  }
  {
    double total = 0.0;
    for (const auto& comp : g.components) total += comp.prior;
    for (auto& comp : g.components) comp.prior /= total;
  }

  Eigen::MatrixXd log_resp(n, n_components);
  std::vector<ComponentDensity> densities(n_components);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // E-step in the log domain.
    for (int c = 0; c < n_components; ++c) {
      densities[c].init(g.components[c].cov, "fit_em");
    }
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd x = data.row(i);
      Eigen::VectorXd logp(n_components);
      for (int c = 0; c < n_components; ++c) {
        logp[c] = std::log(g.components[c].prior) +
                  densities[c].log_pdf(x, g.components[c].mean);
      }
      const double lse = log_sum_exp(logp);
      ll += lse;
      log_resp.row(i) = (logp.array() - lse).transpose();
    }
    if (loglik_trace) loglik_trace->push_back(ll);

    // M-step.
    const Eigen::MatrixXd resp = log_resp.array().exp();
    for (int c = 0; c < n_components; ++c) {
      const double weight = resp.col(c).sum();
      GaussianComponent& comp = g.components[c];
      comp.prior = weight / n;
      if (comp.prior < kCollapsePrior) {
        throw FitError("component " + std::to_string(c) +
                       " collapsed (prior " + std::to_string(comp.prior) + ")");
      }
      comp.mean = (data.transpose() * resp.col(c)) / weight;
      Eigen::MatrixXd scattered = data.rowwise() - comp.mean.transpose();
      comp.cov = scattered.transpose() * resp.col(c).asDiagonal() * scattered /
                     weight +
                 opts.cov_reg * Eigen::MatrixXd::Identity(dim, dim);
      comp.cov = 0.5 * (comp.cov + comp.cov.transpose()).eval();
    }

    const double improvement = ll - prev_ll;
    if (iter > 0 && improvement < opts.tol * std::abs(prev_ll)) {
      break;
    }
    prev_ll = ll;
  }
  // Leave the mixture with densities that match the final parameters.
  for (int c = 0; c < n_components; ++c) {
    densities[c].init(g.components[c].cov, "fit_em");
  }
  return g;
}

Eigen::VectorXd responsibilities(const GaussianMixture& g,
                                 const Eigen::VectorXd& input) {
  const int n_comp = static_cast<int>(g.components.size());
  Eigen::VectorXd logw(n_comp);
  for (int c = 0; c < n_comp; ++c) {
    const GaussianComponent& comp = g.components[c];
    ComponentDensity density;
    density.init(comp.cov.topLeftCorner(g.input_dim, g.input_dim),
                 "responsibilities");
    logw[c] = std::log(comp.prior) +
              density.log_pdf(input, comp.mean.head(g.input_dim));
  }
  const double lse = log_sum_exp(logw);
  return (logw.array() - lse).exp();
}

RefPoint condition(const GaussianMixture& g, const Eigen::VectorXd& input) {
  if (input.size() != g.input_dim) {
    throw DimError("conditioning input has dimension " +
                   std::to_string(input.size()) + ", expected " +
                   std::to_string(g.input_dim));
  }
  const int out = g.output_dim;
  const Eigen::VectorXd h = responsibilities(g, input);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(out);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(out, out);
  for (std::size_t c = 0; c < g.components.size(); ++c) {
    const GaussianComponent& comp = g.components[c];
    const auto in_in = comp.cov.topLeftCorner(g.input_dim, g.input_dim);
    const auto out_in = comp.cov.bottomLeftCorner(out, g.input_dim);
    const auto in_out = comp.cov.topRightCorner(g.input_dim, out);
    const auto out_out = comp.cov.bottomRightCorner(out, out);

    Eigen::LLT<Eigen::MatrixXd> llt(in_in);
    if (llt.info() != Eigen::Success) {
      throw ConditionError("input covariance block not positive definite");
    }
    const Eigen::VectorXd cond_mean =
        comp.mean.tail(out) +
        out_in * llt.solve(input - comp.mean.head(g.input_dim));
    const Eigen::MatrixXd cond_cov = out_out - out_in * llt.solve(in_out);

    mean += h[c] * cond_mean;
    second += h[c] * (cond_mean * cond_mean.transpose() + cond_cov);
  }
  RefPoint point;
  point.input = input;
  point.mean = mean;
  point.cov = second - mean * mean.transpose();
  point.cov = 0.5 * (point.cov + point.cov.transpose()).eval();
  if (!point.mean.allFinite() || !point.cov.allFinite()) {
    throw ConditionError("conditioning produced a non-finite result");
  }
  return point;
}

std::vector<Eigen::VectorXd> sample_inputs(const GaussianMixture& g, int count,
                                           std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> priors;
  priors.reserve(g.components.size());
  for (const auto& comp : g.components) priors.push_back(comp.prior);

  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors(g.components.size());
  for (std::size_t c = 0; c < g.components.size(); ++c) {
    factors[c].compute(
        g.components[c].cov.topLeftCorner(g.input_dim, g.input_dim));
    if (factors[c].info() != Eigen::Success) {
      throw ConditionError("input covariance block not positive definite");
    }
  }

  std::vector<Eigen::VectorXd> draws;
  draws.reserve(count);
  for (int i = 0; i < count; ++i) {
    const std::size_t c = rng.categorical(priors);
    Eigen::VectorXd z(g.input_dim);
    for (int d = 0; d < g.input_dim; ++d) z[d] = rng.normal();
    draws.push_back(g.components[c].mean.head(g.input_dim) +
                    factors[c].matrixL() * z);
  }
  return draws;
}

std::vector<RefPoint> build_reference(
    const GaussianMixture& g, const std::vector<Eigen::VectorXd>& inputs) {
  std::vector<RefPoint> reference;
  reference.reserve(inputs.size());
  for (const Eigen::VectorXd& input : inputs) {
    reference.push_back(condition(g, input));
  }
  return reference;
}

}  // namespace quatkmp::gmm
