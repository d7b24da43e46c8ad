#include "mbthp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mbthp/errors.hpp"

namespace mbthp {
namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kPdThreshold = 1e-12;

bool all_finite(const CMatrix& a) {
  return a.unaryExpr([](const Complex& z) {
            return std::isfinite(z.real()) && std::isfinite(z.imag());
          })
      .all();
}

// Index of the first entry with the largest magnitude.
Eigen::Index dominant_entry(const CVector& col) {
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    const double mag = std::abs(col(i));
    if (mag > best_mag * (1.0 + 1e-12)) {
      best_mag = mag;
      best = i;
    }
  }
  return best;
}

Complex unit_phase(const Complex& z) {
  const double mag = std::abs(z);
  return mag > 0.0 ? z / mag : Complex{1.0, 0.0};
}

void check_hermitian(const CMatrix& a) {
  if (a.rows() != a.cols()) {
    throw ContractViolation("Hermitian matrix must be square");
  }
  const double scale = a.norm();
  if ((a - a.adjoint()).norm() > kHermitianTol * std::max(scale, 1e-300)) {
    throw ContractViolation("matrix is not Hermitian");
  }
}

}  // namespace

SvdFactors svd(const CMatrix& a) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw ContractViolation("svd: empty matrix");
  }
  if (!all_finite(a)) {
    throw ContractViolation("svd: non-finite entries");
  }
  Eigen::JacobiSVD<CMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("svd did not converge", static_cast<std::size_t>(a.rows()),
                           static_cast<std::size_t>(a.cols()));
  }
  SvdFactors out{solver.matrixU(), solver.singularValues(), solver.matrixV()};

  const Eigen::Index k = out.sigma.size();
  for (Eigen::Index i = 0; i < k; ++i) {
    const Complex phase = std::conj(unit_phase(out.u(dominant_entry(out.u.col(i)), i)));
    out.u.col(i) *= phase;
    out.v.col(i) *= phase;
  }
  for (Eigen::Index i = k; i < out.u.cols(); ++i) {
    out.u.col(i) *= std::conj(unit_phase(out.u(dominant_entry(out.u.col(i)), i)));
  }
  for (Eigen::Index i = k; i < out.v.cols(); ++i) {
    out.v.col(i) *= std::conj(unit_phase(out.v(dominant_entry(out.v.col(i)), i)));
  }
  return out;
}

HermitianEigen evd_hermitian(const CMatrix& a) {
  check_hermitian(a);
  const Eigen::Index n = a.rows();

  // Diagonal input: skip the iterative solver so equal eigenvalues keep their
  // original order and the eigenvectors are exact unit vectors.
  const bool diagonal = (a - CMatrix(a.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  if (diagonal) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
      return a(x, x).real() > a(y, y).real();
    });
    HermitianEigen out{CMatrix::Zero(n, n), RVector(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]).real();
      out.vectors(order[static_cast<std::size_t>(i)], i) = 1.0;
    }
    return out;
  }

  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("Hermitian eigensolver did not converge",
                           static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  }
  HermitianEigen out{CMatrix(n, n), RVector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = n - 1 - i;
    out.values(i) = solver.eigenvalues()(src);
    CVector col = solver.eigenvectors().col(src);
    col *= std::conj(unit_phase(col(dominant_entry(col))));
    out.vectors.col(i) = col;
  }
  return out;
}

CMatrix inv_sqrt_psd(const CMatrix& a) {
  const HermitianEigen eig = evd_hermitian(a);
  const double largest = eig.values(0);
  const double smallest = eig.values(eig.values.size() - 1);
  if (!(largest > 0.0) || smallest <= kPdThreshold * largest) {
    throw SingularMatrixError("inv_sqrt_psd: matrix is not positive definite");
  }
  const RVector scale = eig.values.cwiseSqrt().cwiseInverse();
  return eig.vectors * scale.asDiagonal() * eig.vectors.adjoint();
}

CMatrix sqrt_psd(const CMatrix& a) {
  const HermitianEigen eig = evd_hermitian(a);
  const RVector scale = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * scale.asDiagonal() * eig.vectors.adjoint();
}

GmdFactors gmd(const CMatrix& a) {
  if (a.rows() != a.cols()) {
    throw ContractViolation("gmd: matrix must be square");
  }
  const SvdFactors f = svd(a);
  const Eigen::Index n = a.rows();
  const double largest = f.sigma(0);
  const double smallest = f.sigma(n - 1);
  if (!(largest > 0.0) || smallest <= kPdThreshold * largest) {
    throw SingularMatrixError("gmd: matrix is rank deficient");
  }
  const double target = std::exp(f.sigma.array().log().mean());

  Eigen::MatrixXd r = f.sigma.asDiagonal();
  CMatrix q = f.u;
  CMatrix p = f.v;

  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    // Bring a partner into slot k+1 so that target lies between the two
    // diagonal entries; the trailing block is still diagonal.
    const bool above = r(k, k) >= target;
    Eigen::Index partner = k + 1;
    for (Eigen::Index j = k + 1; j < n; ++j) {
      const bool better = above ? r(j, j) < r(partner, partner) : r(j, j) > r(partner, partner);
      if (better) partner = j;
    }
    if (partner != k + 1) {
      r.row(k + 1).swap(r.row(partner));
      r.col(k + 1).swap(r.col(partner));
      q.col(k + 1).swap(q.col(partner));
      p.col(k + 1).swap(p.col(partner));
    }

    const double d1 = r(k, k);
    const double d2 = r(k + 1, k + 1);
    const double gap = d1 * d1 - d2 * d2;
    double c = 1.0;
    double s = 0.0;
    if (std::abs(gap) > 1e-15 * d1 * d1) {
      c = std::sqrt(std::clamp((target * target - d2 * d2) / gap, 0.0, 1.0));
      s = std::sqrt(std::max(0.0, 1.0 - c * c));
    }
    Eigen::Matrix2d right;
    right << c, -s, s, c;
    Eigen::Matrix2d left;
    left << c * d1, -s * d2, s * d2, c * d1;
    left /= target;
    if (s == 0.0) left.setIdentity();

    r.middleRows(k, 2) = (left.transpose() * r.middleRows(k, 2)).eval();
    r.middleCols(k, 2) = (r.middleCols(k, 2) * right).eval();
    r(k + 1, k) = 0.0;
    q.middleCols(k, 2) = (q.middleCols(k, 2) * left.cast<Complex>()).eval();
    p.middleCols(k, 2) = (p.middleCols(k, 2) * right.cast<Complex>()).eval();
  }

  return GmdFactors{q, r.cast<Complex>(), p};
}

CMatrix permutation_matrix(std::span<const std::size_t> perm) {
  const std::size_t n = perm.size();
  if (n == 0) {
    throw ContractViolation("permutation must be non-empty");
  }
  std::vector<bool> seen(n, false);
  for (const std::size_t idx : perm) {
    if (idx >= n || seen[idx]) {
      throw ContractViolation("invalid permutation: repeated or out-of-range index");
    }
    seen[idx] = true;
  }
  CMatrix t = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i])) = 1.0;
  }
  return t;
}

double relative_error(const CMatrix& a, const CMatrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

bool is_unitary(const CMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const CMatrix gram = a.adjoint() * a;
  return (gram - CMatrix::Identity(a.rows(), a.cols())).norm() <= tol;
}

}  // namespace mbthp
