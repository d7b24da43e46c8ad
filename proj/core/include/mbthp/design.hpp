#pragma once

// Robust per-branch transceiver synthesis for the two-hop AF relay link:
// THP feedback U at the source together with the source precoder F_s, a
// linear relay precoder F_r and an MMSE receiver W at the destination.
//
// Two covariance structures are supported:
//   case A: transmit-side error covariance Psi = I (Sigma arbitrary PD/PSD)
//   case B: receive-side error covariance Sigma = sigma_e2 * I (Psi arbitrary)
// Any other structure raises UnsupportedConfiguration.
//
// Power bookkeeping uses x_i = sigma_s2 * lambda_Fs,i^2 (source) and y_i, the
// relay power spent on stream i. Both budgets are met with equality.

#include <cstddef>
#include <vector>

#include "mbthp/channel.hpp"
#include "mbthp/linalg.hpp"
#include "mbthp/ordering.hpp"

namespace mbthp {

enum class CovarianceCase { kA, kB };

struct PowerBudget {
  double p_s = 1.0;       // source power
  double p_r = 1.0;       // relay power
  double noise_sr = 1.0;  // relay noise power
  double noise_rd = 1.0;  // destination noise power
};

/// Everything the design needs besides the channel estimates.
struct SystemModel {
  ChannelStatistics stats;
  PowerBudget budget;
  double sigma_s2 = 10.0;  // average symbol energy of the constellation
};

/// Copy of `model` whose error covariances are zero, i.e. the estimates are
/// treated as exact.
SystemModel nonrobust_model(const SystemModel& model);

struct WaterfillOptions {
  double tolerance = 1e-10;  // relative objective change between sweeps
  // largest per-stream power change between sweeps, relative to the budget
  double allocation_tolerance = 1e-9;
  int max_iterations = 500;
};

struct WaterfillState {
  std::vector<double> x;     // source power per stream
  std::vector<double> y;     // relay power per stream
  double mu_s = 0.0;         // water levels
  double mu_r = 0.0;
  std::vector<double> lam1;  // per-stream first-hop gains
  std::vector<double> lam2;  // per-stream second-hop gains
  double beta1 = 1.0;        // case B effective noise levels (1 in case A)
  double beta2 = 1.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // objective after every half-step
};

struct BranchDesign {
  CMatrix f_s;    // n_s x n_d
  CMatrix f_r;    // n_r x n_r
  CMatrix u;      // n_d x n_d, lower unitriangular
  CMatrix phi_s;  // n_d x n_d, unitary
  CMatrix w;      // n_d x n_d
  double sigma_bar2 = 0.0;
  WaterfillState state;
  OrderingPattern order;
  CovarianceCase covariance = CovarianceCase::kA;
};

/// Whitened factors for case A.
struct WhitenedCaseA {
  HermitianEigen sigma_sr;      // EVD of Sigma_sr
  HermitianEigen sigma_rd;      // EVD of T Sigma_rd T^T
  RVector load_sr;              // source-error load times eigenvalues plus noise
  RVector load_rd;
  CMatrix h_sr;                 // whitened first hop
  CMatrix h_rd;                 // whitened (reordered) second hop
  SvdFactors svd_sr;
  SvdFactors svd_rd;
  std::vector<double> lam1;     // leading n_d singular values of h_sr
  std::vector<double> lam2;     // singular values of h_rd
};

/// Objective sum_i ln(1 + a_i b_i / (1 + a_i + b_i)) with
/// a_i = x_i lam1_i^2 / beta1 and b_i = y_i lam2_i^2 / beta2.
double waterfill_objective(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& lam1, const std::vector<double>& lam2,
                           double beta1 = 1.0, double beta2 = 1.0);

/// Relay power that maximizes the objective for fixed x, with the water
/// level found by bisection so that sum(y) == p_r. Returns the water level.
double optimal_relay_allocation(const std::vector<double>& x, const std::vector<double>& lam1,
                                const std::vector<double>& lam2, double p_r, double beta1,
                                double beta2, std::vector<double>& y);

/// Source power counterpart of optimal_relay_allocation.
double optimal_source_allocation(const std::vector<double>& y, const std::vector<double>& lam1,
                                 const std::vector<double>& lam2, double p_s, double beta1,
                                 double beta2, std::vector<double>& x);

/// Alternating water-filling for case A. Without `init_x` it runs once from
/// the uniform split over every subset of live streams and keeps the best
/// result; with `init_x` it runs once from there. Non-convergence is reported
/// in the state.
WaterfillState waterfill_case_a(const std::vector<double>& lam1, const std::vector<double>& lam2,
                                const PowerBudget& budget, const WaterfillOptions& options = {},
                                const std::vector<double>* init_x = nullptr);

/// alpha1 = P_s / sigma_s2 and alpha2 = P_r are the values that meet both
/// budgets with equality; the relay sees source-side error power
/// sigma_s2 * alpha1 * Sigma_sr.
WhitenedCaseA whiten_case_a(const SystemModel& model, const CMatrix& hbar_sr,
                            const CMatrix& hbar_rd, const OrderingPattern& order, double alpha1,
                            double alpha2);

BranchDesign assemble_case_a(const SystemModel& model, const CMatrix& hbar_sr,
                             const CMatrix& hbar_rd, const OrderingPattern& order,
                             const WhitenedCaseA& whitened, const WaterfillState& state);

BranchDesign design_case_a(const SystemModel& model, const CMatrix& hbar_sr,
                           const CMatrix& hbar_rd, const OrderingPattern& order,
                           const WaterfillOptions& options = {});

/// Case B: beta1/beta2 are refreshed from the current allocation once per
/// outer sweep.
BranchDesign design_case_b(const SystemModel& model, const CMatrix& hbar_sr,
                           const CMatrix& hbar_rd, const OrderingPattern& order,
                           const WaterfillOptions& options = {});

/// Dispatches on `covariance` after checking that the statistics have the
/// required structure.
BranchDesign design_branch(CovarianceCase covariance, const SystemModel& model,
                           const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                           const OrderingPattern& order, const WaterfillOptions& options = {});

/// Second-order quantities of the received signal averaged over channel
/// errors and noise.
struct ReceivedCovariance {
  double alpha1 = 0.0;  // tr(F_s F_s^H Psi_sr^T)
  double alpha2 = 0.0;  // tr(F_r R_relay F_r^H Psi_rd^T)
  CMatrix relay;        // E[relay input covariance]
  CMatrix a;            // E[y_d y_d^H]
  CMatrix b;            // interference-plus-noise part of a
  CMatrix cascade;      // T Hbar_rd F_r Hbar_sr
};

ReceivedCovariance received_covariance(const SystemModel& model, const CMatrix& hbar_sr,
                                       const CMatrix& hbar_rd, const OrderingPattern& order,
                                       const CMatrix& f_s, const CMatrix& f_r);

/// W = sigma_s2 U F_s^H Hbar_sr^H F_r^H (T Hbar_rd)^H A^{-1}.
CMatrix mmse_receiver(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                      const OrderingPattern& order, const CMatrix& f_s, const CMatrix& f_r,
                      const CMatrix& u);

/// Error matrix E = U (sigma_s^-2 I + F_s^H H^H B^-1 H F_s)^{-1} U^H reached
/// by the MMSE receiver.
CMatrix mse_matrix(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                   const BranchDesign& design);

/// Expected ||W y_d - v||^2 over errors and noise for the design's own W.
double evaluate_mse(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                    const BranchDesign& design);

/// Same with an arbitrary receiver.
double evaluate_mse(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                    const BranchDesign& design, const CMatrix& w);

double source_power(const SystemModel& model, const CMatrix& f_s);

/// tr(F_r (sigma_s2 Hbar F_s F_s^H Hbar^H + sigma_s2 alpha1 Sigma_sr + noise I) F_r^H)
double relay_expected_power(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& f_s,
                            const CMatrix& f_r);

}  // namespace mbthp
