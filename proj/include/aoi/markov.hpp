#pragma once

#include <stdexcept>
#include <vector>

namespace aoi::markov {

struct MarkovError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonAbsorbingChain : MarkovError {
  using MarkovError::MarkovError;
};
struct AmbiguousStationaryState : MarkovError {
  using MarkovError::MarkovError;
};

// Dense row-major matrix. Chains here have at most ~10 states, so there is no
// point in anything fancier than Gaussian elimination.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  static Matrix identity(int n);

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

Matrix multiply(const Matrix& x, const Matrix& y);
// Partial-pivot Gaussian elimination; throws MarkovError on a singular system.
std::vector<double> solve(Matrix a, std::vector<double> b);
Matrix invert(Matrix a);

// Transient block Q and absorbing block R of a chain in canonical form
// [[Q, R], [0, I]].
struct AbsorbingChain {
  Matrix transient;  // Q, k x k
  Matrix absorb;     // R, k x a
  void validate() const;
};

struct AbsorptionStats {
  Matrix fundamental;                  // (I - Q)^-1
  std::vector<double> expected_steps;  // row sums; the initial state is counted
  std::vector<double> step_variance;
};

AbsorptionStats absorption_stats(const AbsorbingChain& chain);

struct StochasticMatrix {
  Matrix entries;
  void validate() const;
};

// Unique stationary row vector of an irreducible chain; solved by replacing
// one balance equation with the normalization constraint. A rank deficiency
// beyond the structural one means the vector is not unique and is reported
// as an error rather than picking a representative arbitrarily.
std::vector<double> stationary_distribution(const StochasticMatrix& m);

// Real roots in ascending order, citardauq form for the cancellation-prone
// root. a = 0 degrades to the linear root; a = b = 0 is an error.
std::vector<double> quadratic_real_roots(double a, double b, double c);

}  // namespace aoi::markov
