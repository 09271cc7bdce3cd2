// Copyright 2026 The cmlearn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cmlearn/learning.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cmlearn/error.hpp"

namespace cmlearn {

NullComponentModel::NullComponentModel(Eigen::MatrixXd centers, double width,
                                       Eigen::MatrixXd weights)
    : centers_(std::move(centers)), width_(width), weights_(std::move(weights)) {
  if (centers_.rows() < 1) throw Error(ErrorCode::kInvalidArgument, "no RBF centers");
  if (!(width_ > 0.0)) throw Error(ErrorCode::kInvalidArgument, "RBF width must be positive");
  if (weights_.rows() != centers_.cols() || weights_.cols() != feature_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "RBF weights do not match centers");
  }
}

Eigen::VectorXd NullComponentModel::Features(const JointState& q) const {
  if (q.size() != centers_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "state does not match RBF centers");
  }
  const double scale = -0.5 / (width_ * width_);
  const Eigen::Index m = centers_.rows();
  Eigen::VectorXd phi(feature_dim());
  for (Eigen::Index j = 0; j < m; ++j) {
    phi[j] = std::exp(scale * (centers_.row(j).transpose() - q).squaredNorm());
  }
  phi[m] = 1.0;
  phi.tail(q.size()) = q;
  return phi;
}

Eigen::VectorXd NullComponentModel::Predict(const JointState& q) const {
  return weights_ * Features(q);
}

Samples Flatten(const DemonstrationSet& data) {
  Samples s;
  for (const auto& t : data.trajectories) {
    const std::size_t n = std::min(t.states.size(), t.actions.size());
    for (std::size_t i = 0; i < n; ++i) {
      s.states.push_back(t.states[i]);
      s.actions.push_back(t.actions[i]);
    }
  }
  return s;
}

namespace {

// P(w) u - w, with P(0) = 0.
Eigen::VectorXd ProjectionResidual(const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
  const double c = w.squaredNorm();
  if (c == 0.0) return -w;
  return w * (w.dot(u) / c) - w;
}

// d/dw of ProjectionResidual.
Eigen::MatrixXd ProjectionResidualJacobian(const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
  const Eigen::Index d = w.size();
  const double c = w.squaredNorm();
  if (c == 0.0) return -Eigen::MatrixXd::Identity(d, d);
  const double s = w.dot(u);
  Eigen::MatrixXd jac = (s / c - 1.0) * Eigen::MatrixXd::Identity(d, d);
  jac += w * u.transpose() / c;
  jac -= (2.0 * s / (c * c)) * w * w.transpose();
  return jac;
}

// Deterministic k-means: farthest-point seeding from the sample nearest the
// mean, then Lloyd iterations.
Eigen::MatrixXd KMeans(const Eigen::MatrixXd& x, int k, int iterations) {
  const Eigen::Index n = x.rows();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::Index first = 0;
  (x.rowwise() - mean).rowwise().squaredNorm().minCoeff(&first);
  Eigen::MatrixXd centers(k, x.cols());
  centers.row(0) = x.row(first);
  Eigen::VectorXd dist = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    Eigen::Index far = 0;
    dist.maxCoeff(&far);
    centers.row(c) = x.row(far);
    dist = dist.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < iterations; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += x.row(i);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
      }
    }
  }
  return centers;
}

double MedianPairwiseDistance(const Eigen::MatrixXd& centers) {
  std::vector<double> d;
  for (Eigen::Index i = 0; i < centers.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < centers.rows(); ++j) {
      d.push_back((centers.row(i) - centers.row(j)).norm());
    }
  }
  if (d.empty()) return 1.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid > 0.0 ? *mid : 1.0;
}

}  // namespace

double SeparationObjective(std::span<const Eigen::VectorXd> actions,
                           std::span<const Eigen::VectorXd> u_ns) {
  if (actions.size() != u_ns.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "actions and predictions differ in count");
  }
  double e = 0.0;
  for (std::size_t n = 0; n < actions.size(); ++n) {
    e += ProjectionResidual(actions[n], u_ns[n]).squaredNorm();
  }
  return e;
}

NullComponentModel SeparateNullComponent(const DemonstrationSet& data,
                                         const SeparationOptions& options) {
  if (data.trajectories.size() < 2) {
    throw Error(ErrorCode::kDegenerateData, "need at least two trajectories");
  }
  const Samples s = Flatten(data);
  const auto n = static_cast<Eigen::Index>(s.states.size());
  if (n == 0) throw Error(ErrorCode::kDegenerateData, "demonstration set is empty");
  const auto dof = static_cast<Eigen::Index>(s.states.front().size());

  Eigen::MatrixXd x(n, dof), u(n, dof);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = s.states[static_cast<std::size_t>(i)].transpose();
    u.row(i) = s.actions[static_cast<std::size_t>(i)].transpose();
  }
  if (u.cwiseAbs().maxCoeff() < 1e-12) {
    throw Error(ErrorCode::kDegenerateData, "all demonstrated actions are zero");
  }

  const int n_centers = static_cast<int>(std::clamp<Eigen::Index>(n / 4, 1, options.max_centers));
  const Eigen::MatrixXd centers = KMeans(x, n_centers, options.kmeans_iterations);
  const Eigen::Index m = n_centers + 1 + dof;
  NullComponentModel model(centers, options.width_scale * MedianPairwiseDistance(centers),
                           Eigen::MatrixXd::Zero(dof, m));

  Eigen::MatrixXd phi(n, m);
  for (Eigen::Index i = 0; i < n; ++i) phi.row(i) = model.Features(x.row(i).transpose()).transpose();

  Eigen::MatrixXd gram = phi.transpose() * phi;
  gram.diagonal().array() += options.ridge;
  const Eigen::LDLT<Eigen::MatrixXd> ridge_solver(gram);

  auto objective = [&](const Eigen::MatrixXd& w) {
    const Eigen::MatrixXd pred = phi * w.transpose();
    double e = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      e += ProjectionResidual(u.row(i).transpose(), pred.row(i).transpose()).squaredNorm();
    }
    return e;
  };

  // Initial fit to the raw actions, i.e. u_ns = u. The raw actions
  // themselves score 0 (P u = u), the smooth fit does not.
  const Eigen::MatrixXd w0 = ridge_solver.solve(phi.transpose() * u).transpose();
  Eigen::MatrixXd w = w0;
  model.initial_objective = objective(w0);

  // Refit against projected targets until the objective stalls.
  double e = objective(w);
  for (int it = 0; it < options.refine_iterations; ++it) {
    const Eigen::MatrixXd pred = phi * w.transpose();
    Eigen::MatrixXd targets(n, dof);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd p = pred.row(i).transpose();
      const double c = p.squaredNorm();
      if (c > 0.0) {
        targets.row(i) = (p * (p.dot(u.row(i).transpose()) / c)).transpose();
      } else {
        targets.row(i).setZero();
      }
    }
    const Eigen::MatrixXd next = ridge_solver.solve(phi.transpose() * targets).transpose();
    const double e_next = objective(next);
    if (!(e_next < e)) break;
    const double decrease = e - e_next;
    w = next;
    e = e_next;
    if (decrease < options.refine_tolerance) break;
  }

  // Levenberg-Marquardt on sum_n |P_n u_n - w_n|^2 + ridge |W|^2.
  const Eigen::Index p = dof * m;
  auto levenberg_marquardt = [&](Eigen::MatrixXd w, double ridge) {
    auto total = [&](const Eigen::MatrixXd& wt) { return objective(wt) + ridge * wt.squaredNorm(); };
    double e_total = total(w);
    double mu = -1.0;
    int stalls = 0;
    for (int it = 0; it < options.lm_iterations && e_total > 0.0; ++it) {
      const Eigen::MatrixXd pred = phi * w.transpose();
      Eigen::MatrixXd q(n, dof);
      std::vector<Eigen::MatrixXd> dtd(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd ui = u.row(i).transpose();
        const Eigen::VectorXd wi = pred.row(i).transpose();
        const Eigen::MatrixXd d = ProjectionResidualJacobian(ui, wi);
        q.row(i) = (d.transpose() * ProjectionResidual(ui, wi)).transpose();
        dtd[static_cast<std::size_t>(i)] = d.transpose() * d;
      }
      Eigen::MatrixXd grad = q.transpose() * phi + ridge * w;  // dof x m
      Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p, p);
      Eigen::VectorXd c(n);
      for (Eigen::Index a = 0; a < dof; ++a) {
        for (Eigen::Index b = a; b < dof; ++b) {
          for (Eigen::Index i = 0; i < n; ++i) c[i] = dtd[static_cast<std::size_t>(i)](a, b);
          const Eigen::MatrixXd block = phi.transpose() * (c.asDiagonal() * phi);
          h.block(a * m, b * m, m, m) = block;
          if (a != b) h.block(b * m, a * m, m, m) = block.transpose();
        }
      }
      h.diagonal().array() += ridge;
      Eigen::VectorXd g(p);
      for (Eigen::Index a = 0; a < dof; ++a) g.segment(a * m, m) = grad.row(a).transpose();
      if (mu < 0.0) mu = 1e-6 * h.diagonal().maxCoeff();

      bool accepted = false;
      for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
        Eigen::MatrixXd damped = h;
        damped.diagonal().array() += mu;
        const Eigen::VectorXd step = damped.ldlt().solve(-g);
        Eigen::MatrixXd trial = w;
        for (Eigen::Index a = 0; a < dof; ++a) trial.row(a) += step.segment(a * m, m).transpose();
        const double e_trial = total(trial);
        if (std::isfinite(e_trial) && e_trial < e_total) {
          const double rel = (e_total - e_trial) / e_total;
          w = trial;
          e_total = e_trial;
          mu = std::max(mu / 3.0, 1e-300);
          accepted = true;
          stalls = rel < options.lm_tolerance ? stalls + 1 : 0;
        } else {
          mu *= 4.0;
        }
      }
      if (!accepted || stalls >= 3) break;
    }
    return w;
  };

  w = levenberg_marquardt(w, options.ridge);
  e = objective(w);
  // A poor local minimum shows as a residual far above the usual fit
  // error. Descend again from the plain regression under a heavy ridge,
  // which smooths the landscape, then relax to the working ridge.
  if (e > options.restart_threshold * u.squaredNorm()) {
    const Eigen::MatrixXd alt =
        levenberg_marquardt(levenberg_marquardt(w0, options.restart_ridge), options.ridge);
    if (objective(alt) < e) w = alt;
  }

  model.set_weights(w);
  model.final_objective = objective(w);
  return model;
}

Eigen::VectorXd SphericalPoint(const Eigen::VectorXd& angles, int m) {
  if (angles.size() != m - 1) {
    throw Error(ErrorCode::kDimensionMismatch, "need m - 1 spherical angles");
  }
  Eigen::VectorXd s(m);
  double prod = 1.0;
  for (int i = 0; i < m - 1; ++i) {
    s[i] = prod * std::cos(angles[i]);
    prod *= std::sin(angles[i]);
  }
  s[m - 1] = prod;
  return s;
}

Eigen::MatrixXd ComplementBasis(const Eigen::MatrixXd& rows, int dim) {
  if (rows.rows() == 0) return Eigen::MatrixXd::Identity(dim, dim);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  const auto r = rows.rows();
  return svd.matrixV().rightCols(dim - r);
}

namespace {

// Per-sample quantities needed by the objective: y_n = J_n w_n and the task
// space Gram G_n = J_n J_n^T, so that for A = Lambda J_n
//   w^T A^+ A w = (Lambda y)^T (Lambda G Lambda^T)^{-1} (Lambda y).
struct ObjectiveData {
  std::vector<Eigen::VectorXd> y;
  std::vector<Eigen::MatrixXd> gram;
  std::vector<Eigen::MatrixXd> features;
  std::vector<Eigen::VectorXd> w;
};

ObjectiveData Prepare(std::span<const Eigen::MatrixXd> features,
                      std::span<const Eigen::VectorXd> u_ns) {
  if (features.size() != u_ns.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "features and null components differ in count");
  }
  ObjectiveData d;
  d.y.reserve(features.size());
  d.gram.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    d.y.push_back(features[i] * u_ns[i]);
    d.gram.push_back(features[i] * features[i].transpose());
  }
  d.features.assign(features.begin(), features.end());
  d.w.assign(u_ns.begin(), u_ns.end());
  return d;
}

double Evaluate(const ObjectiveData& d, const Eigen::MatrixXd& lambda) {
  double e = 0.0;
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    const Eigen::VectorXd ly = lambda * d.y[i];
    const Eigen::MatrixXd g = lambda * d.gram[i] * lambda.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    const bool ok = llt.info() == Eigen::Success &&
                    llt.matrixLLT().diagonal().minCoeff() >
                        1e-7 * std::sqrt(g.diagonal().maxCoeff());
    if (ok) {
      e += ly.dot(llt.solve(ly));
    } else {
      const Eigen::MatrixXd a = lambda * d.features[i];
      const Eigen::VectorXd proj = Pseudoinverse(a, PinvPolicy::Truncate()) * (a * d.w[i]);
      e += d.w[i].dot(proj);
    }
  }
  return e;
}

struct RowSearch {
  Eigen::VectorXd angles;
  Eigen::VectorXd row;
  double value = std::numeric_limits<double>::infinity();
};

// BFGS on the spherical angles with central finite-difference gradients.
RowSearch Refine(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                 const LearnOptions& options) {
  const Eigen::Index dim = x.size();
  RowSearch best;
  best.angles = x;
  best.value = f(x);
  if (dim == 0) return best;
  const double h = 1e-7;
  auto gradient = [&](const Eigen::VectorXd& at) {
    Eigen::VectorXd g(dim);
    Eigen::VectorXd probe = at;
    for (Eigen::Index i = 0; i < dim; ++i) {
      probe[i] = at[i] + h;
      const double up = f(probe);
      probe[i] = at[i] - h;
      const double down = f(probe);
      probe[i] = at[i];
      g[i] = (up - down) / (2.0 * h);
    }
    return g;
  };
  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd g = gradient(x);
  double fx = best.value;
  for (int it = 0; it < options.refine_iterations; ++it) {
    Eigen::VectorXd dir = -inv_hessian * g;
    if (dir.dot(g) >= 0.0) {
      inv_hessian.setIdentity();
      dir = -g;
    }
    double t = 1.0;
    Eigen::VectorXd next;
    double f_next = fx;
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      next = x + t * dir;
      f_next = f(next);
      if (f_next <= fx + 1e-4 * t * g.dot(dir)) {
        improved = f_next < fx;
        break;
      }
    }
    const Eigen::VectorXd step = next - x;
    if (!improved || step.lpNorm<Eigen::Infinity>() < options.refine_tolerance) {
      if (improved) {
        x = next;
        fx = f_next;
      }
      break;
    }
    const Eigen::VectorXd g_next = gradient(next);
    const Eigen::VectorXd yk = g_next - g;
    const double sy = step.dot(yk);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      inv_hessian = (eye - rho * step * yk.transpose()) * inv_hessian *
                        (eye - rho * yk * step.transpose()) +
                    rho * step * step.transpose();
    }
    x = next;
    fx = f_next;
    g = g_next;
  }
  best.angles = x;
  best.value = fx;
  return best;
}

}  // namespace

double ConstraintObjective(const Eigen::MatrixXd& lambda, std::span<const Eigen::MatrixXd> features,
                           std::span<const Eigen::VectorXd> u_ns) {
  return Evaluate(Prepare(features, u_ns), lambda);
}

LambdaEstimate LearnLambda(const SerialChain& chain, std::span<const JointState> states,
                           std::span<const Eigen::VectorXd> u_ns, int k_max,
                           const LearnOptions& options) {
  const int dim = chain.task_dim();
  if (k_max < 1 || k_max > dim) {
    throw Error(ErrorCode::kInvalidArgument, "k_max must be in [1, " + std::to_string(dim) + "]");
  }
  if (states.size() != u_ns.size() || states.empty()) {
    throw Error(ErrorCode::kDegenerateData, "need matching, nonempty states and null components");
  }
  std::vector<Eigen::MatrixXd> features;
  features.reserve(states.size());
  for (const auto& q : states) features.push_back(chain.Jacobian(q));
  const ObjectiveData data = Prepare(features, u_ns);

  LambdaEstimate est;
  for (const auto& w : u_ns) est.reference += w.squaredNorm();
  if (!(est.reference > 0.0)) {
    throw Error(ErrorCode::kDegenerateData, "null-space components are all zero");
  }

  Eigen::MatrixXd rows(0, dim);
  for (int j = 0; j < k_max; ++j) {
    const Eigen::MatrixXd basis = ComplementBasis(rows, dim);
    const int m = static_cast<int>(basis.cols());
    const int n_angles = m - 1;
    auto candidate = [&](const Eigen::VectorXd& angles) {
      Eigen::MatrixXd lambda(rows.rows() + 1, dim);
      lambda.topRows(rows.rows()) = rows;
      lambda.bottomRows(1) = (basis * SphericalPoint(angles, m)).transpose();
      return lambda;
    };
    auto objective = [&](const Eigen::VectorXd& angles) { return Evaluate(data, candidate(angles)); };

    // Coarse grid over the half-sphere (rows are sign invariant).
    std::vector<std::pair<double, Eigen::VectorXd>> grid;
    const int cells = n_angles == 0 ? 1 : static_cast<int>(std::pow(options.grid_points, n_angles));
    for (int c = 0; c < cells; ++c) {
      Eigen::VectorXd angles(n_angles);
      int rest = c;
      for (int a = 0; a < n_angles; ++a) {
        angles[a] = kPi * (rest % options.grid_points) / options.grid_points;
        rest /= options.grid_points;
      }
      grid.emplace_back(objective(angles), angles);
    }
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return grid[a].first < grid[b].first; });

    RowSearch best;
    const std::size_t starts = std::min<std::size_t>(order.size(), options.refine_starts);
    for (std::size_t s = 0; s < starts; ++s) {
      RowSearch r = Refine(objective, grid[order[s]].second, options);
      if (r.value < best.value) best = r;
    }
    const double e_j = best.value;
    est.objective_trace.push_back(e_j);
    if (j > 0 && e_j > options.rank_epsilon * est.reference) break;

    const Eigen::VectorXd row = basis * SphericalPoint(best.angles, m);
    rows.conservativeResize(rows.rows() + 1, Eigen::NoChange);
    rows.row(rows.rows() - 1) = row.normalized().transpose();
    est.angles.push_back(best.angles);
    est.objective_value = e_j;
  }
  est.rows = rows;
  est.k = static_cast<int>(rows.rows());
  return est;
}

LambdaEstimate LearnLambda(const DemonstrationSet& data, const NullComponentModel& u_ns, int k_max,
                           const LearnOptions& options) {
  const SerialChain chain = SerialChain::Preset(data.config.chain);
  const Samples s = Flatten(data);
  std::vector<Eigen::VectorXd> w;
  w.reserve(s.states.size());
  for (const auto& q : s.states) w.push_back(u_ns.Predict(q));
  return LearnLambda(chain, s.states, w, k_max, options);
}

ConstraintModel LearnedModel(const LambdaEstimate& estimate) {
  if (estimate.k < 1 || estimate.rows.rows() != estimate.k) {
    throw Error(ErrorCode::kInvalidArgument, "estimate has no accepted rows");
  }
  return ConstraintModel(estimate.rows);
}

}  // namespace cmlearn
