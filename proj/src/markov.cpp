#include "aoi/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace aoi::markov {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kResidualTol = 1e-9;
constexpr double kStationaryTol = 1e-10;

double max_abs(const Matrix& m) {
  double s = 0.0;
  for (double v : m.a) s = std::max(s, std::fabs(v));
  return s;
}

// Elimination with partial pivoting shared by solve/invert/rank. Returns the
// number of pivots found above the threshold; a and rhs are reduced in place.
int eliminate(Matrix& a, Matrix* rhs, double pivot_tol) {
  int n = a.rows;
  int rank = 0;
  for (int col = 0; col < n && rank < n; ++col) {
    int piv = -1;
    double best = pivot_tol;
    for (int r = rank; r < n; ++r) {
      double v = std::fabs(a(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (piv < 0) continue;
    if (piv != rank) {
      for (int j = 0; j < a.cols; ++j) std::swap(a(piv, j), a(rank, j));
      if (rhs)
        for (int j = 0; j < rhs->cols; ++j) std::swap((*rhs)(piv, j), (*rhs)(rank, j));
    }
    for (int r = 0; r < n; ++r) {
      if (r == rank) continue;
      double f = a(r, col) / a(rank, col);
      if (f == 0.0) continue;
      for (int j = 0; j < a.cols; ++j) a(r, j) -= f * a(rank, j);
      a(r, col) = 0.0;
      if (rhs)
        for (int j = 0; j < rhs->cols; ++j) (*rhs)(r, j) -= f * (*rhs)(rank, j);
    }
    ++rank;
  }
  return rank;
}

// Solve a X = B for all columns of B at once. Throws on singular a.
Matrix solve_multi(Matrix a, Matrix b) {
  int n = a.rows;
  double tol = 1e-13 * std::max(1.0, max_abs(a));
  if (eliminate(a, &b, tol) < n) throw MarkovError("singular linear system");
  Matrix x(n, b.cols);
  // After full Gauss-Jordan the remaining a is diagonal up to column order.
  for (int r = 0; r < n; ++r) {
    int col = -1;
    for (int j = 0; j < n; ++j)
      if (a(r, j) != 0.0) {
        col = j;
        break;
      }
    if (col < 0) throw MarkovError("singular linear system");
    for (int j = 0; j < b.cols; ++j) x(col, j) = b(r, j) / a(r, col);
  }
  return x;
}

}  // namespace

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix multiply(const Matrix& x, const Matrix& y) {
  if (x.cols != y.rows) throw MarkovError("matrix dimension mismatch");
  Matrix out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      double v = x(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) out(i, j) += v * y(k, j);
    }
  return out;
}

std::vector<double> solve(Matrix a, std::vector<double> b) {
  if (a.rows != a.cols || static_cast<size_t>(a.rows) != b.size())
    throw MarkovError("matrix dimension mismatch");
  Matrix rhs(a.rows, 1);
  for (int i = 0; i < a.rows; ++i) rhs(i, 0) = b[i];
  Matrix x = solve_multi(std::move(a), std::move(rhs));
  return x.a;
}

Matrix invert(Matrix a) {
  if (a.rows != a.cols) throw MarkovError("matrix dimension mismatch");
  int n = a.rows;
  return solve_multi(std::move(a), Matrix::identity(n));
}

void AbsorbingChain::validate() const {
  int k = transient.rows;
  if (k == 0 || transient.cols != k) throw MarkovError("transient block must be square and nonempty");
  if (absorb.rows != k || absorb.cols < 1)
    throw MarkovError("absorb block must have one row per transient state");
  for (double v : transient.a)
    if (!(v >= 0.0 && v <= 1.0)) throw MarkovError("transition probability out of [0,1]");
  for (double v : absorb.a)
    if (!(v >= 0.0 && v <= 1.0)) throw MarkovError("transition probability out of [0,1]");
  for (int i = 0; i < k; ++i) {
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += transient(i, j);
    for (int j = 0; j < absorb.cols; ++j) s += absorb(i, j);
    if (std::fabs(s - 1.0) > kRowSumTol)
      throw MarkovError("row " + std::to_string(i) + " of [Q|R] does not sum to 1");
  }
}

AbsorptionStats absorption_stats(const AbsorbingChain& chain) {
  chain.validate();
  int k = chain.transient.rows;
  Matrix a = Matrix::identity(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) -= chain.transient(i, j);

  Matrix fundamental;
  try {
    fundamental = invert(a);
  } catch (const MarkovError&) {
    throw NonAbsorbingChain("non-absorbing chain: I - Q is singular");
  }
  Matrix check = multiply(a, fundamental);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (std::fabs(check(i, j) - (i == j ? 1.0 : 0.0)) > kResidualTol)
        throw NonAbsorbingChain("non-absorbing chain: fundamental matrix residual too large");

  AbsorptionStats stats;
  stats.fundamental = fundamental;
  stats.expected_steps.assign(k, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) stats.expected_steps[i] += fundamental(i, j);

  // phi = (2N - I) v - v (.) v
  stats.step_variance.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    double acc = 0.0;
    for (int j = 0; j < k; ++j)
      acc += (2.0 * fundamental(i, j) - (i == j ? 1.0 : 0.0)) * stats.expected_steps[j];
    acc -= stats.expected_steps[i] * stats.expected_steps[i];
    if (acc < 0.0 && acc > -1e-12) acc = 0.0;  // rounding at deterministic absorption
    stats.step_variance[i] = acc;
  }
  return stats;
}

void StochasticMatrix::validate() const {
  int n = entries.rows;
  if (n == 0 || entries.cols != n) throw MarkovError("stochastic matrix must be square and nonempty");
  for (double v : entries.a)
    if (!(v >= 0.0 && v <= 1.0)) throw MarkovError("transition probability out of [0,1]");
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += entries(i, j);
    if (std::fabs(s - 1.0) > kRowSumTol)
      throw MarkovError("row " + std::to_string(i) + " does not sum to 1");
  }
}

std::vector<double> stationary_distribution(const StochasticMatrix& m) {
  m.validate();
  int n = m.entries.rows;

  // Balance system B theta = 0 with B = P^T - I. The rows of B always carry
  // one structural dependency; any further rank loss means the stationary
  // vector is not unique.
  Matrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = m.entries(j, i) - (i == j ? 1.0 : 0.0);
  Matrix probe = b;
  int rank = eliminate(probe, nullptr, 1e-10 * std::max(1.0, max_abs(b)));
  if (rank != n - 1)
    throw AmbiguousStationaryState("ambiguous stationary state: rank " + std::to_string(rank) +
                                   " for " + std::to_string(n) + " states");

  for (int j = 0; j < n; ++j) b(n - 1, j) = 1.0;
  std::vector<double> rhs(n, 0.0);
  rhs[n - 1] = 1.0;
  std::vector<double> theta = solve(std::move(b), std::move(rhs));

  double sum = 0.0;
  for (double& v : theta) {
    if (v < 0.0 && v > -1e-12) v = 0.0;
    if (v < 0.0) throw MarkovError("stationary distribution has a negative component");
    sum += v;
  }
  for (double& v : theta) v /= sum;

  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += theta[i] * m.entries(i, j);
    if (std::fabs(acc - theta[j]) > kStationaryTol)
      throw MarkovError("stationary distribution residual too large");
  }
  return theta;
}

std::vector<double> quadratic_real_roots(double a, double b, double c) {
  if (a == 0.0 && b == 0.0) throw std::invalid_argument("degenerate equation: a = b = 0");
  if (a == 0.0) return {-c / b};
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {};
  if (disc == 0.0) return {-b / (2.0 * a)};
  double s = std::sqrt(disc);
  double q = -0.5 * (b + std::copysign(s, b));
  // q = 0 only when b = 0 and c = 0: the roots collapse at the origin.
  if (q == 0.0) return {0.0};
  std::vector<double> roots{q / a, c / q};
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace aoi::markov
