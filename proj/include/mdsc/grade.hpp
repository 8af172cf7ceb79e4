#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdsc/code_model.hpp"

namespace mdsc {

enum class Objective { cycle6, cycle8 };

const char* to_string(Objective o);
Objective objective_from_string(const std::string& s);

// Joint probability-distribution matrix: coeffs[i][j] is the probability that
// a base-matrix 1 is assigned to component i of auxiliary matrix j. Row i must
// sum to row_targets[i] (the edge distribution of the underlying SC code) and
// everything to 1.
struct ProbDistMatrix {
  int memory = 0;  // m: rows are 0..m
  int copies = 1;  // M: columns are 0..M-1
  std::vector<double> coeffs;       // (m+1) x M row-major
  std::vector<double> row_targets;  // length m+1

  ProbDistMatrix() = default;
  ProbDistMatrix(int m, int M)
      : memory(m), copies(M), coeffs(static_cast<size_t>(m + 1) * M, 0.0),
        row_targets(m + 1, 0.0) {}

  double& at(int i, int j) { return coeffs[static_cast<size_t>(i) * copies + j]; }
  double at(int i, int j) const { return coeffs[static_cast<size_t>(i) * copies + j]; }
  double row_sum(int i) const;
  double column0_sum() const;

  // Enforces the simplex invariants: entries >= 0, rows sum to targets,
  // everything sums to 1. Throws std::invalid_argument outside tol.
  void validate(double tol = 1e-9) const;
};

// Coefficient grid of a two-variable polynomial. Entry (r, s) is the
// coefficient of X^(x_off+r) Y^(y_off+s); the offsets make negative exponents
// (from substituting X^-1, Y^-1) representable.
struct CoeffGrid {
  int rows = 0, cols = 0;
  int x_off = 0, y_off = 0;
  std::vector<double> a;

  CoeffGrid() = default;
  CoeffGrid(int r, int c, int xo = 0, int yo = 0)
      : rows(r), cols(c), x_off(xo), y_off(yo), a(static_cast<size_t>(r) * c, 0.0) {}

  double& at(int r, int s) { return a[static_cast<size_t>(r) * cols + s]; }
  double at(int r, int s) const { return a[static_cast<size_t>(r) * cols + s]; }
  // Coefficient of X^xdeg Y^ydeg (0 outside the stored window).
  double coeff(int xdeg, int ydeg) const;

  static CoeffGrid from_prob(const ProbDistMatrix& P);  // f(X,Y;P)
};

// Product-polynomial coefficients; conv of a single grid is the grid itself.
CoeffGrid conv(const CoeffGrid& A, const CoeffGrid& B);
CoeffGrid conv(const std::vector<CoeffGrid>& grids);

// Substitute (X^-1, Y^-1): reverses both axes and negates the degree window.
CoeffGrid mirror(const CoeffGrid& A);

// Substitute (X^2, Y^2): entries move to doubled indices, zeros between.
CoeffGrid square_grid(const CoeffGrid& A);

// Sum of coefficients of X^xdeg Y^ydeg over all ydeg congruent to yres mod M.
double coeff_sum_mod(const CoeffGrid& G, int xdeg, int yres, int M);

// Two-phase row projection: shift each row back onto its target hyperplane,
// then zero negatives and rescale the rest to preserve the row sum. Throws
// std::runtime_error if a row with a positive target collapses to all zeros
// (signals a divergent step; the caller reduces the step size).
void force(ProbDistMatrix& P);

long long binom(int n, int k);

// Expected cycle-6 candidate count N6 in the MD protograph (Theorem-style
// closed form: 6 C(gamma,3) C(kappa,3) * sum_{M|b} [f^3 fbar^3]_{0,b}).
double objective_n6(const ProbDistMatrix& P, int gamma, int kappa);

// Four-pattern-family cycle-8 candidate count N8; w1 (the doubly-traversed
// 4-cycle family) is dropped by default since prime z kills those lifts.
double objective_n8(const ProbDistMatrix& P, int gamma, int kappa, bool w1_zero = true);

// Entry-wise dN/dp as an (m+1) x M row-major grid.
std::vector<double> gradient_n6(const ProbDistMatrix& P, int gamma, int kappa);
std::vector<double> gradient_n8(const ProbDistMatrix& P, int gamma, int kappa,
                                bool w1_zero = true);

struct GradeConfig {
  double alpha = 0.02;     // gradient step size
  double epsilon = 1e-8;   // convergence accuracy on |F_cur - F_prev|
  double density_cap = 30.0;  // target MD density T, percent
  Objective objective = Objective::cycle6;
  bool w1_zero = true;
  long long max_iters = 50000;
  long long min_iters = 0;  // suppress the density stop before this many iterations

  void validate() const;
};

struct Forecast {
  Objective objective = Objective::cycle6;
  double n_candidates = 0;  // N6 or N8
  double e_cycles = 0;      // E6 = N*(2L-m)/2*M  or  E8 = N*(L-m)*M
  double e_obj = 0;         // N / z
  double lower = 0;         // N*(L-chi+1)*M, chi = max replica span
  double upper = 0;         // N*L*M (exact for cycle-8)
};

// Requires L > chi (m+1 for cycle-6, 2m+1 for cycle-8).
Forecast forecast(const ProbDistMatrix& P, const CodeParams& p, Objective obj,
                  bool w1_zero = true);

struct MdGradeResult {
  ProbDistMatrix P;
  Forecast fc;
  long long iterations = 0;
  double objective_final = 0;  // F_cur at the stopping test
  std::string status;          // "density" | "converged" | "max_iters"
};

// Gradient descent on the probability-distribution matrix: start with all
// mass in column 0 at the SC edge distribution p_star, step along the
// normalized gradient, re-project with force, stop when the relocated mass
// reaches the density cap or the objective stalls within epsilon.
MdGradeResult md_grade(const CodeParams& p, const std::vector<double>& p_star,
                       const GradeConfig& cfg);

// Locally-optimal SC edge distribution: minimizes the single-variable (M=1)
// specialization of the chosen objective over the full simplex, uniform start
// plus seeded random restarts, keeping the lowest objective.
std::vector<double> grade_1d(const CodeParams& p, Objective obj, bool w1_zero = true,
                             uint64_t seed = 1);

}  // namespace mdsc
