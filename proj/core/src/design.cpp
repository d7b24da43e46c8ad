#include "mbthp/design.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "mbthp/errors.hpp"

namespace mbthp {
namespace {

constexpr double kDeadGain = 1e-300;

CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

double real_trace(const CMatrix& m) { return m.trace().real(); }

void check_dims(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                const OrderingPattern& order) {
  const auto& d = model.stats.dims;
  const auto ns = static_cast<Eigen::Index>(d.n_s);
  const auto nr = static_cast<Eigen::Index>(d.n_r);
  const auto nd = static_cast<Eigen::Index>(d.n_d);
  if (hbar_sr.rows() != nr || hbar_sr.cols() != ns) {
    throw ContractViolation("source-relay estimate must be n_r x n_s");
  }
  if (hbar_rd.rows() != nd || hbar_rd.cols() != nr) {
    throw ContractViolation("relay-destination estimate must be n_d x n_r");
  }
  if (order.t.rows() != nd || order.t.cols() != nd) {
    throw ContractViolation("ordering pattern must act on n_d streams");
  }
  if (d.n_s < d.n_d || d.n_r < d.n_d) {
    throw ContractViolation("n_s and n_r must be at least n_d");
  }
  if (!(model.budget.p_s > 0.0) || !(model.budget.p_r > 0.0)) {
    throw ContractViolation("power budgets must be positive");
  }
  if (!(model.budget.noise_sr > 0.0) || !(model.budget.noise_rd > 0.0)) {
    throw ContractViolation("noise powers must be positive");
  }
  if (!(model.sigma_s2 > 0.0)) throw ContractViolation("sigma_s2 must be positive");
}

// Power on each stream that maximizes sum ln(1 + a b / (1 + a + b)) over the
// free variable z (gain g, so the free per-stream SNR is g z) given the fixed
// per-stream SNR `fixed`, subject to sum z == total. Returns the water level.
double allocate(const std::vector<double>& fixed, const std::vector<double>& g, double total,
                std::vector<double>& z) {
  const std::size_t n = fixed.size();
  z.assign(n, 0.0);
  auto fill = [&](double mu) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = fixed[i];
      if (a <= 0.0 || g[i] <= kDeadGain) {
        z[i] = 0.0;
        continue;
      }
      // b = (sqrt(a^2 + 4 g a mu) - (2 + a)) / 2 in cancellation-free form.
      const double disc = a * a + 4.0 * g[i] * a * mu;
      const double num = 4.0 * g[i] * a * mu - 4.0 - 4.0 * a;
      const double b = num > 0.0 ? num / (2.0 * (std::sqrt(disc) + 2.0 + a)) : 0.0;
      z[i] = b / g[i];
      sum += z[i];
    }
    return sum;
  };

  bool any = false;
  for (std::size_t i = 0; i < n; ++i) any = any || (fixed[i] > 0.0 && g[i] > kDeadGain);
  if (!any) throw SingularMatrixError("no stream can carry power");

  double lo = 0.0;
  double hi = 1.0;
  int guard = 0;
  while (fill(hi) < total) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000) throw NumericalFailure("water level bracket", n, 1);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fill(mid) < total) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double sum = fill(hi);
  for (double& v : z) v *= total / sum;
  return hi;
}

std::vector<double> gains(const std::vector<double>& lam, double beta) {
  std::vector<double> g(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i) g[i] = lam[i] * lam[i] / beta;
  return g;
}

using BetaUpdate = std::function<void(const std::vector<double>&, const std::vector<double>&,
                                      double&, double&)>;

// Alternating exact maximization: relay allocation for fixed x, then source
// allocation for fixed y. `update` refreshes beta once per sweep.
WaterfillState alternate(const std::vector<double>& lam1, const std::vector<double>& lam2,
                         const PowerBudget& budget, const WaterfillOptions& options,
                         std::vector<double> x, const BetaUpdate& update,
                         const std::vector<double>& y_init) {
  if (lam1.size() != lam2.size() || lam1.empty()) {
    throw ContractViolation("gain profiles must be non-empty and of equal length");
  }
  WaterfillState st;
  st.lam1 = lam1;
  st.lam2 = lam2;
  st.x = std::move(x);
  st.y = y_init;
  // Streams dead on either hop never get power.
  for (std::size_t i = 0; i < lam1.size(); ++i) {
    if (!(lam1[i] * lam1[i] > kDeadGain && lam2[i] * lam2[i] > kDeadGain)) st.x[i] = 0.0;
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    if (update) update(st.x, st.y, st.beta1, st.beta2);
    const auto g1 = gains(lam1, st.beta1);
    const auto g2 = gains(lam2, st.beta2);

    std::vector<double> a(lam1.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = st.x[i] * g1[i];
    const std::vector<double> x_prev = st.x;
    const std::vector<double> y_prev = st.y;
    st.mu_r = allocate(a, g2, budget.p_r, st.y);
    st.objective_trace.push_back(
        waterfill_objective(st.x, st.y, lam1, lam2, st.beta1, st.beta2));

    std::vector<double> b(lam1.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = st.y[i] * g2[i];
    st.mu_s = allocate(b, g1, budget.p_s, st.x);
    const double obj = waterfill_objective(st.x, st.y, lam1, lam2, st.beta1, st.beta2);
    st.objective_trace.push_back(obj);

    st.iterations = it + 1;
    double moved = 0.0;
    for (std::size_t i = 0; i < st.x.size(); ++i) {
      moved = std::max(moved, std::abs(st.x[i] - x_prev[i]) / budget.p_s);
      moved = std::max(moved, std::abs(st.y[i] - y_prev[i]) / budget.p_r);
    }
    if (std::abs(obj - prev) <= options.tolerance * std::max(std::abs(obj), 1e-300) &&
        moved <= options.allocation_tolerance) {
      st.converged = true;
      break;
    }
    prev = obj;
  }
  if (update) update(st.x, st.y, st.beta1, st.beta2);
  return st;
}

// The per-stream objective is not jointly concave, so alternation can settle
// on a point that spreads power over streams when concentrating it is better.
// Streams switched off at the start stay off, so one run per starting support
// covers those corners; the best final objective wins, larger supports first
// on ties.
WaterfillState alternate_over_supports(const std::vector<double>& lam1,
                                       const std::vector<double>& lam2, const PowerBudget& budget,
                                       const WaterfillOptions& options, const BetaUpdate& update) {
  const std::size_t n = lam1.size();
  if (n != lam2.size() || n == 0) {
    throw ContractViolation("gain profiles must be non-empty and of equal length");
  }
  if (n > 16) throw ContractViolation("at most 16 streams are supported");
  unsigned alive = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (lam1[i] * lam1[i] > kDeadGain && lam2[i] * lam2[i] > kDeadGain) alive |= 1u << i;
  }
  if (alive == 0) throw SingularMatrixError("all streams have zero gain");

  std::vector<unsigned> supports;
  for (unsigned mask = alive; mask != 0; mask = (mask - 1) & alive) supports.push_back(mask);
  std::stable_sort(supports.begin(), supports.end(), [](unsigned a, unsigned b) {
    return __builtin_popcount(a) > __builtin_popcount(b);
  });

  WaterfillState best;
  double best_obj = -std::numeric_limits<double>::infinity();
  for (unsigned mask : supports) {
    const double share = 1.0 / static_cast<double>(__builtin_popcount(mask));
    std::vector<double> x(n, 0.0), y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        x[i] = budget.p_s * share;
        if (update) y[i] = budget.p_r * share;
      }
    }
    WaterfillState st = alternate(lam1, lam2, budget, options, std::move(x), update, y);
    const double obj = waterfill_objective(st.x, st.y, lam1, lam2, st.beta1, st.beta2);
    if (obj > best_obj) {
      best_obj = obj;
      best = std::move(st);
    }
  }
  return best;
}

std::vector<double> to_vector(const RVector& v, Eigen::Index n) {
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n && i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
  return out;
}

bool near_identity(const CMatrix& m, double tol) {
  return (m - identity(m.rows())).norm() <= tol;
}

bool proportional_to_identity(const CMatrix& m, double tol) {
  if (m.rows() == 0) return true;
  const Complex c = m(0, 0);
  return (m - c * identity(m.rows())).norm() <= tol * std::max(1.0, std::abs(c));
}

// Shared tail of both cases: the GMD of the per-stream MSE profile gives the
// stream rotation Phi_s and the feedback matrix U.
struct Tail {
  CMatrix phi;
  CMatrix u;
  double sigma_bar2;
  RVector lam_s;
  RVector lam_r;
};

Tail gmd_tail(const WaterfillState& st, double sigma_s2) {
  const auto n = static_cast<Eigen::Index>(st.x.size());
  Tail t;
  t.lam_s = RVector::Zero(n);
  t.lam_r = RVector::Zero(n);
  RVector inv_sqrt_sigma(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double l1 = st.lam1[k] * st.lam1[k];
    const double l2 = st.lam2[k] * st.lam2[k];
    const double ls2 = st.x[k] / sigma_s2;
    const double lr2 = st.y[k] / (st.x[k] * l1 + st.beta1);
    t.lam_s(i) = std::sqrt(ls2);
    t.lam_r(i) = std::sqrt(lr2);
    const double den = st.beta1 * l2 * lr2 + st.beta2;
    const double sigma_ii = 1.0 / sigma_s2 + l1 * l2 * ls2 * lr2 / den;
    inv_sqrt_sigma(i) = 1.0 / std::sqrt(sigma_ii);
  }
  const GmdFactors g = gmd(CMatrix(inv_sqrt_sigma.cast<Complex>().asDiagonal()));
  t.phi = g.p;
  const double sbar = g.r(0, 0).real();
  t.sigma_bar2 = sbar * sbar;
  const CMatrix rh = g.r.adjoint();
  CMatrix u = sbar * rh.triangularView<Eigen::Lower>().solve(identity(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    u(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) u(i, j) = 0.0;
  }
  t.u = u;
  return t;
}

void finish(BranchDesign& d, const SystemModel& model, const CMatrix& hbar_sr,
            const CMatrix& hbar_rd) {
  d.w = mmse_receiver(model, hbar_sr, hbar_rd, d.order, d.f_s, d.f_r, d.u);
}

}  // namespace

SystemModel nonrobust_model(const SystemModel& model) {
  SystemModel m = model;
  m.stats.sigma_e2 = 0.0;
  m.stats.sigma_sr.setZero();
  m.stats.sigma_rd.setZero();
  return m;
}

double waterfill_objective(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& lam1, const std::vector<double>& lam2,
                           double beta1, double beta2) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = x[i] * lam1[i] * lam1[i] / beta1;
    const double b = y[i] * lam2[i] * lam2[i] / beta2;
    total += std::log1p(a * b / (1.0 + a + b));
  }
  return total;
}

double optimal_relay_allocation(const std::vector<double>& x, const std::vector<double>& lam1,
                                const std::vector<double>& lam2, double p_r, double beta1,
                                double beta2, std::vector<double>& y) {
  const auto g1 = gains(lam1, beta1);
  std::vector<double> a(x.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = x[i] * g1[i];
  return allocate(a, gains(lam2, beta2), p_r, y);
}

double optimal_source_allocation(const std::vector<double>& y, const std::vector<double>& lam1,
                                 const std::vector<double>& lam2, double p_s, double beta1,
                                 double beta2, std::vector<double>& x) {
  const auto g2 = gains(lam2, beta2);
  std::vector<double> b(y.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = y[i] * g2[i];
  return allocate(b, gains(lam1, beta1), p_s, x);
}

WaterfillState waterfill_case_a(const std::vector<double>& lam1, const std::vector<double>& lam2,
                                const PowerBudget& budget, const WaterfillOptions& options,
                                const std::vector<double>* init_x) {
  if (!init_x) return alternate_over_supports(lam1, lam2, budget, options, nullptr);
  std::vector<double> x = *init_x;
  if (x.size() != lam1.size()) throw ContractViolation("initial allocation has wrong length");
  return alternate(lam1, lam2, budget, options, std::move(x), nullptr,
                   std::vector<double>(lam1.size(), 0.0));
}

WhitenedCaseA whiten_case_a(const SystemModel& model, const CMatrix& hbar_sr,
                            const CMatrix& hbar_rd, const OrderingPattern& order, double alpha1,
                            double alpha2) {
  check_dims(model, hbar_sr, hbar_rd, order);
  const auto nd = static_cast<Eigen::Index>(model.stats.dims.n_d);
  WhitenedCaseA w;
  w.sigma_sr = evd_hermitian(model.stats.sigma_sr);
  const CMatrix sigma_rd_hat = order.t * model.stats.sigma_rd * order.t.transpose();
  w.sigma_rd = evd_hermitian(sigma_rd_hat);
  w.load_sr = (model.sigma_s2 * alpha1) * w.sigma_sr.values.cwiseMax(0.0) +
              RVector::Constant(w.sigma_sr.values.size(), model.budget.noise_sr);
  w.load_rd = alpha2 * w.sigma_rd.values.cwiseMax(0.0) +
              RVector::Constant(w.sigma_rd.values.size(), model.budget.noise_rd);
  const RVector isr = w.load_sr.cwiseSqrt().cwiseInverse();
  const RVector ird = w.load_rd.cwiseSqrt().cwiseInverse();
  w.h_sr = isr.cast<Complex>().asDiagonal() * (w.sigma_sr.vectors.adjoint() * hbar_sr);
  w.h_rd = ird.cast<Complex>().asDiagonal() *
           (w.sigma_rd.vectors.adjoint() * (order.t * hbar_rd));
  w.svd_sr = svd(w.h_sr);
  w.svd_rd = svd(w.h_rd);
  w.lam1 = to_vector(w.svd_sr.sigma, nd);
  w.lam2 = to_vector(w.svd_rd.sigma, nd);
  return w;
}

BranchDesign assemble_case_a(const SystemModel& model, const CMatrix& hbar_sr,
                             const CMatrix& hbar_rd, const OrderingPattern& order,
                             const WhitenedCaseA& whitened, const WaterfillState& state) {
  const auto nd = static_cast<Eigen::Index>(model.stats.dims.n_d);
  const Tail t = gmd_tail(state, model.sigma_s2);
  BranchDesign d;
  d.covariance = CovarianceCase::kA;
  d.order = order;
  d.state = state;
  d.phi_s = t.phi;
  d.u = t.u;
  d.sigma_bar2 = t.sigma_bar2;
  d.f_s = whitened.svd_sr.v.leftCols(nd) * t.lam_s.cast<Complex>().asDiagonal() * t.phi;
  const CMatrix f_r_white = whitened.svd_rd.v.leftCols(nd) * t.lam_r.cast<Complex>().asDiagonal() *
                            whitened.svd_sr.u.leftCols(nd).adjoint();
  const RVector isr = whitened.load_sr.cwiseSqrt().cwiseInverse();
  d.f_r = f_r_white * isr.cast<Complex>().asDiagonal() * whitened.sigma_sr.vectors.adjoint();
  finish(d, model, hbar_sr, hbar_rd);
  return d;
}

BranchDesign design_case_a(const SystemModel& model, const CMatrix& hbar_sr,
                           const CMatrix& hbar_rd, const OrderingPattern& order,
                           const WaterfillOptions& options) {
  const double alpha1 = model.budget.p_s / model.sigma_s2;
  const double alpha2 = model.budget.p_r;
  const WhitenedCaseA w = whiten_case_a(model, hbar_sr, hbar_rd, order, alpha1, alpha2);
  const WaterfillState st = waterfill_case_a(w.lam1, w.lam2, model.budget, options);
  return assemble_case_a(model, hbar_sr, hbar_rd, order, w, st);
}

BranchDesign design_case_b(const SystemModel& model, const CMatrix& hbar_sr,
                           const CMatrix& hbar_rd, const OrderingPattern& order,
                           const WaterfillOptions& options) {
  check_dims(model, hbar_sr, hbar_rd, order);
  const auto nd = static_cast<Eigen::Index>(model.stats.dims.n_d);
  const SvdFactors s1 = svd(hbar_sr);
  const SvdFactors s2 = svd(order.t * hbar_rd);
  const auto lam1 = to_vector(s1.sigma, nd);
  const auto lam2 = to_vector(s2.sigma, nd);

  const double e_sr = model.stats.sigma_sr(0, 0).real();
  const double e_rd = model.stats.sigma_rd(0, 0).real();
  const CMatrix vs = s1.v.leftCols(nd);
  const CMatrix vr = s2.v.leftCols(nd);
  const RVector psi_sr = (vs.adjoint() * model.stats.psi_sr.transpose() * vs).diagonal().real();
  const RVector psi_rd = (vr.adjoint() * model.stats.psi_rd.transpose() * vr).diagonal().real();
  const double n_sr = model.budget.noise_sr;
  const double n_rd = model.budget.noise_rd;

  auto update = [&](const std::vector<double>& x, const std::vector<double>& y, double& b1,
                    double& b2) {
    double load1 = 0.0;
    double load2 = 0.0;
    for (Eigen::Index i = 0; i < nd; ++i) {
      load1 += x[static_cast<std::size_t>(i)] * psi_sr(i);
      load2 += y[static_cast<std::size_t>(i)] * psi_rd(i);
    }
    b1 = e_sr * load1 + n_sr;
    b2 = e_rd * load2 + n_rd;
  };

  WaterfillState st = alternate_over_supports(lam1, lam2, model.budget, options, update);

  const Tail t = gmd_tail(st, model.sigma_s2);
  BranchDesign d;
  d.covariance = CovarianceCase::kB;
  d.order = order;
  d.state = std::move(st);
  d.phi_s = t.phi;
  d.u = t.u;
  d.sigma_bar2 = t.sigma_bar2;
  d.f_s = vs * t.lam_s.cast<Complex>().asDiagonal() * t.phi;
  d.f_r = vr * t.lam_r.cast<Complex>().asDiagonal() * s1.u.leftCols(nd).adjoint();
  finish(d, model, hbar_sr, hbar_rd);
  return d;
}

BranchDesign design_branch(CovarianceCase covariance, const SystemModel& model,
                           const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                           const OrderingPattern& order, const WaterfillOptions& options) {
  const bool exact = model.stats.sigma_e2 == 0.0;
  if (covariance == CovarianceCase::kA) {
    if (!exact && !(near_identity(model.stats.psi_sr, 1e-12) &&
                    near_identity(model.stats.psi_rd, 1e-12))) {
      throw UnsupportedConfiguration(
          "case A needs identity transmit-side error correlation (alpha = 0)");
    }
    return design_case_a(model, hbar_sr, hbar_rd, order, options);
  }
  if (!exact && !(proportional_to_identity(model.stats.sigma_sr, 1e-12) &&
                  proportional_to_identity(model.stats.sigma_rd, 1e-12))) {
    throw UnsupportedConfiguration(
        "case B needs white receive-side error correlation (beta = 0)");
  }
  return design_case_b(model, hbar_sr, hbar_rd, order, options);
}

ReceivedCovariance received_covariance(const SystemModel& model, const CMatrix& hbar_sr,
                                       const CMatrix& hbar_rd, const OrderingPattern& order,
                                       const CMatrix& f_s, const CMatrix& f_r) {
  const auto& st = model.stats;
  const double s2 = model.sigma_s2;
  ReceivedCovariance rc;
  const CMatrix fsfs = f_s * f_s.adjoint();
  rc.alpha1 = real_trace(fsfs * st.psi_sr.transpose());
  const CMatrix hf = hbar_sr * f_s;
  const CMatrix signal = s2 * hf * hf.adjoint();
  const CMatrix disturbance =
      (s2 * rc.alpha1) * st.sigma_sr + model.budget.noise_sr * identity(hbar_sr.rows());
  rc.relay = signal + disturbance;
  rc.alpha2 = real_trace(f_r * rc.relay * f_r.adjoint() * st.psi_rd.transpose());
  const CMatrix hrd = order.t * hbar_rd;
  const CMatrix g = hrd * f_r;
  rc.cascade = g * hbar_sr;
  rc.b = g * disturbance * g.adjoint() +
         rc.alpha2 * (order.t * st.sigma_rd * order.t.transpose()) +
         model.budget.noise_rd * identity(hrd.rows());
  const CMatrix hs = rc.cascade * f_s;
  rc.a = rc.b + s2 * hs * hs.adjoint();
  return rc;
}

CMatrix mmse_receiver(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                      const OrderingPattern& order, const CMatrix& f_s, const CMatrix& f_r,
                      const CMatrix& u) {
  const ReceivedCovariance rc = received_covariance(model, hbar_sr, hbar_rd, order, f_s, f_r);
  const Eigen::LLT<CMatrix> llt(rc.a);
  if (llt.info() != Eigen::Success) throw SingularMatrixError("received covariance not PD");
  // W = s2 U F^H H^H A^-1, i.e. W^H = A^-1 (s2 H F U^H) as A is Hermitian.
  const CMatrix rhs = model.sigma_s2 * rc.cascade * f_s * u.adjoint();
  return llt.solve(rhs).adjoint();
}

CMatrix mse_matrix(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                   const BranchDesign& design) {
  const ReceivedCovariance rc =
      received_covariance(model, hbar_sr, hbar_rd, design.order, design.f_s, design.f_r);
  const Eigen::LLT<CMatrix> llt(rc.b);
  if (llt.info() != Eigen::Success) throw SingularMatrixError("interference covariance not PD");
  const CMatrix hf = rc.cascade * design.f_s;
  const auto n = design.f_s.cols();
  CMatrix inner = identity(n) / model.sigma_s2 + hf.adjoint() * llt.solve(hf);
  inner = 0.5 * (inner + inner.adjoint()).eval();
  const CMatrix inv = inner.llt().solve(identity(n));
  return design.u * inv * design.u.adjoint();
}

double evaluate_mse(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                    const BranchDesign& design) {
  return evaluate_mse(model, hbar_sr, hbar_rd, design, design.w);
}

double evaluate_mse(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& hbar_rd,
                    const BranchDesign& design, const CMatrix& w) {
  const ReceivedCovariance rc =
      received_covariance(model, hbar_sr, hbar_rd, design.order, design.f_s, design.f_r);
  const double s2 = model.sigma_s2;
  const double t1 = real_trace(w * rc.a * w.adjoint());
  const double t2 = real_trace(w * rc.cascade * design.f_s * design.u.adjoint());
  const double t3 = real_trace(design.u * design.u.adjoint());
  return t1 - 2.0 * s2 * t2 + s2 * t3;
}

double source_power(const SystemModel& model, const CMatrix& f_s) {
  return model.sigma_s2 * f_s.squaredNorm();
}

double relay_expected_power(const SystemModel& model, const CMatrix& hbar_sr, const CMatrix& f_s,
                            const CMatrix& f_r) {
  const auto& st = model.stats;
  const double s2 = model.sigma_s2;
  const double alpha1 = real_trace(f_s * f_s.adjoint() * st.psi_sr.transpose());
  const CMatrix hf = hbar_sr * f_s;
  const CMatrix relay = s2 * hf * hf.adjoint() + (s2 * alpha1) * st.sigma_sr +
                        model.budget.noise_sr * identity(hbar_sr.rows());
  return real_trace(f_r * relay * f_r.adjoint());
}

}  // namespace mbthp
