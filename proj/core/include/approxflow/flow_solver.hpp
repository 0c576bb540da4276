#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "approxflow/approximator.hpp"
#include "approxflow/graph.hpp"

namespace approxflow {

// ln sum_i (exp(x_i) + exp(-x_i)), evaluated with a max shift.
double lmax(std::span<const double> x);

// lmax(x), with its gradient written to grad.
double lmax_gradient(std::span<const double> x, std::span<double> grad);

enum class DescentRule {
  kLbfgs,     // limited-memory quasi-Newton directions
  kGradient,  // scaled gradient steps
};

struct SolverParams {
  double epsilon = 0.1;
  int max_iters = 20000;
  // Used when the approximator's quality field is not positive.
  double alpha_hint = 1.0;
  // Upper limit on the alpha used inside the potential (0 = none).
  double alpha_cap = 0.0;
  // First stage uses min(alpha_start, alpha); stalls double it back up to
  // alpha before beta is raised. 0 starts at alpha directly.
  double alpha_start = 4.0;
  DescentRule rule = DescentRule::kLbfgs;
  int lbfgs_memory = 8;
  // Certificates are recomputed every check_every iterations.
  int check_every = 10;
  // beta = beta_constant * ln(2 max(m, rows)) / (eps * current estimate)
  double beta_constant = 1.0;
  // Checks without progress before alpha or beta is raised.
  int stall_checks = 20;
  // Factor applied to alpha on a stall.
  double alpha_growth = 2.0;
  // Also stalled after two checks in a row with no certificate progress and
  // a relative potential drop below this. 0 disables.
  double flat_tol = 1e-3;
  // CSV rows "iter,potential,congestion,best_cut_ratio" when set.
  std::ostream* trace = nullptr;
};

struct SweepCut {
  CutSet cut;
  double ratio = 0.0;
};

// Orders vertices by potential (ties by id) and returns the prefix cut with
// the largest |b(S)| / u(S). A constant potential yields the best singleton.
// Throws std::invalid_argument on non-finite potentials or size mismatch.
SweepCut extract_sweep_cut(const Graph& g, std::span<const double> potential,
                           std::span<const double> b);

struct SolverStats {
  int stages = 0;
  int line_search_halvings = 0;
  int potential_increases = 0;  // must stay 0
  double alpha = 0.0;        // upper limit from the approximator
  double alpha_final = 0.0;  // value in use when the solve ended
  int alpha_raises = 0;
  int beta_raises = 0;
};

// Minimizes (1/beta) [lmax(beta f/u) + lmax(2 alpha beta R (b - B f))] from
// f = 0. The upper bound is the best conserving flow f + (tree route of the
// residual b - B f) seen so far; the lower bound is the best of the sweep cut
// on R^T grad and the cut of R's largest row. Stops when the two are within
// 1 + epsilon or the iteration budget is spent. g must be connected (throws
// std::invalid_argument otherwise) unless some component carries net demand,
// in which case that component is returned as an infeasibility cut.
FlowCutSolution approximator_max_flow(const Graph& g,
                                      const CongestionApproximator& r,
                                      const SolverParams& params,
                                      std::span<const double> b,
                                      SolverStats* stats = nullptr);

}  // namespace approxflow
