#include "mdsc/grade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mdsc/rng.hpp"

namespace mdsc {

const char* to_string(Objective o) { return o == Objective::cycle6 ? "cycle6" : "cycle8"; }

Objective objective_from_string(const std::string& s) {
  if (s == "cycle6" || s == "6") return Objective::cycle6;
  if (s == "cycle8" || s == "8") return Objective::cycle8;
  throw std::invalid_argument("unknown objective: " + s);
}

double ProbDistMatrix::row_sum(int i) const {
  double s = 0;
  for (int j = 0; j < copies; ++j) s += at(i, j);
  return s;
}

double ProbDistMatrix::column0_sum() const {
  double s = 0;
  for (int i = 0; i <= memory; ++i) s += at(i, 0);
  return s;
}

void ProbDistMatrix::validate(double tol) const {
  if (static_cast<int>(row_targets.size()) != memory + 1 ||
      static_cast<int>(coeffs.size()) != (memory + 1) * copies)
    throw std::invalid_argument("probability matrix dimensions inconsistent");
  double total = 0;
  for (int i = 0; i <= memory; ++i) {
    double rs = 0;
    for (int j = 0; j < copies; ++j) {
      double v = at(i, j);
      if (v < -tol) throw std::invalid_argument("negative probability entry");
      rs += v;
    }
    if (std::abs(rs - row_targets[i]) > tol)
      throw std::invalid_argument("row sum deviates from its target");
    total += rs;
  }
  if (std::abs(total - 1.0) > tol)
    throw std::invalid_argument("probabilities do not sum to 1");
}

double CoeffGrid::coeff(int xdeg, int ydeg) const {
  int r = xdeg - x_off, s = ydeg - y_off;
  if (r < 0 || r >= rows || s < 0 || s >= cols) return 0.0;
  return at(r, s);
}

CoeffGrid CoeffGrid::from_prob(const ProbDistMatrix& P) {
  CoeffGrid g(P.memory + 1, P.copies);
  g.a = P.coeffs;
  return g;
}

CoeffGrid conv(const CoeffGrid& A, const CoeffGrid& B) {
  CoeffGrid C(A.rows + B.rows - 1, A.cols + B.cols - 1, A.x_off + B.x_off, A.y_off + B.y_off);
  for (int r1 = 0; r1 < A.rows; ++r1)
    for (int s1 = 0; s1 < A.cols; ++s1) {
      double av = A.at(r1, s1);
      if (av == 0.0) continue;
      for (int r2 = 0; r2 < B.rows; ++r2) {
        double* out = &C.a[static_cast<size_t>(r1 + r2) * C.cols + s1];
        const double* bp = &B.a[static_cast<size_t>(r2) * B.cols];
        for (int s2 = 0; s2 < B.cols; ++s2) out[s2] += av * bp[s2];
      }
    }
  return C;
}

CoeffGrid conv(const std::vector<CoeffGrid>& grids) {
  if (grids.empty()) throw std::invalid_argument("conv of an empty list");
  CoeffGrid acc = grids[0];
  for (size_t i = 1; i < grids.size(); ++i) acc = conv(acc, grids[i]);
  return acc;
}

CoeffGrid mirror(const CoeffGrid& A) {
  CoeffGrid B(A.rows, A.cols, -(A.x_off + A.rows - 1), -(A.y_off + A.cols - 1));
  for (int r = 0; r < A.rows; ++r)
    for (int s = 0; s < A.cols; ++s) B.at(r, s) = A.at(A.rows - 1 - r, A.cols - 1 - s);
  return B;
}

CoeffGrid square_grid(const CoeffGrid& A) {
  CoeffGrid B(2 * A.rows - 1, 2 * A.cols - 1, 2 * A.x_off, 2 * A.y_off);
  for (int r = 0; r < A.rows; ++r)
    for (int s = 0; s < A.cols; ++s) B.at(2 * r, 2 * s) = A.at(r, s);
  return B;
}

double coeff_sum_mod(const CoeffGrid& G, int xdeg, int yres, int M) {
  int r = xdeg - G.x_off;
  if (r < 0 || r >= G.rows) return 0.0;
  double s = 0;
  for (int c = 0; c < G.cols; ++c) {
    int ydeg = G.y_off + c;
    if (((ydeg - yres) % M + M) % M == 0) s += G.at(r, c);
  }
  return s;
}

void force(ProbDistMatrix& P) {
  const int M = P.copies;
  for (int t = 0; t <= P.memory; ++t) {
    double target = P.row_targets[t];
    double s = P.row_sum(t);
    double shift = (target - s) / M;
    for (int j = 0; j < M; ++j) P.at(t, j) += shift;
    double pos = 0;
    for (int j = 0; j < M; ++j) pos += std::max(P.at(t, j), 0.0);
    if (pos <= 0.0) {
      if (target > 1e-15) throw std::runtime_error("force: row collapsed to zero");
      for (int j = 0; j < M; ++j) P.at(t, j) = 0.0;
      continue;
    }
    double scale = target / pos;
    for (int j = 0; j < M; ++j) P.at(t, j) = std::max(P.at(t, j), 0.0) * scale;
  }
}

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

namespace {

struct Weights8 {
  double w1, w2, w3, w4;
};

Weights8 cycle8_weights(int gamma, int kappa) {
  if (gamma < 3 || kappa < 4)
    throw std::invalid_argument("cycle-8 objective needs gamma >= 3 and kappa >= 4");
  Weights8 w;
  w.w1 = static_cast<double>(binom(gamma, 2) * binom(kappa, 2));
  w.w2 = 3.0 * binom(gamma, 2) * binom(kappa, 3) + 3.0 * binom(gamma, 3) * binom(kappa, 2);
  w.w3 = 18.0 * binom(gamma, 3) * binom(kappa, 3);
  w.w4 = 6.0 * binom(gamma, 2) * binom(kappa, 4) + 6.0 * binom(gamma, 4) * binom(kappa, 2) +
         36.0 * binom(gamma, 3) * binom(kappa, 4) + 36.0 * binom(gamma, 4) * binom(kappa, 3) +
         72.0 * binom(gamma, 4) * binom(kappa, 4);
  return w;
}

// Shared partial products for one evaluation point.
struct Factors {
  int M;
  CoeffGrid A, Ab, A2, A4, Ab2, Ab3, Ab4, S, Sb;
  bool with_squares;

  explicit Factors(const ProbDistMatrix& P, bool squares) : with_squares(squares) {
    M = P.copies;
    A = CoeffGrid::from_prob(P);
    Ab = mirror(A);
    A2 = conv(A, A);
    Ab2 = conv(Ab, Ab);
    A4 = conv(A2, A2);
    Ab3 = conv(Ab2, Ab);
    Ab4 = conv(Ab2, Ab2);
    if (squares) {
      S = square_grid(A);
      Sb = mirror(S);
    }
  }
};

}  // namespace

double objective_n6(const ProbDistMatrix& P, int gamma, int kappa) {
  Factors f(P, false);
  CoeffGrid prod = conv(conv(f.A2, f.A), conv(f.Ab2, f.Ab));
  return 6.0 * binom(gamma, 3) * binom(kappa, 3) * coeff_sum_mod(prod, 0, 0, f.M);
}

std::vector<double> gradient_n6(const ProbDistMatrix& P, int gamma, int kappa) {
  Factors f(P, false);
  CoeffGrid prod = conv(conv(f.A2, f.A), f.Ab2);  // f^3 fbar^2
  double w = 36.0 * binom(gamma, 3) * binom(kappa, 3);
  std::vector<double> G(static_cast<size_t>(P.memory + 1) * P.copies);
  for (int i = 0; i <= P.memory; ++i)
    for (int j = 0; j < P.copies; ++j)
      G[static_cast<size_t>(i) * P.copies + j] = w * coeff_sum_mod(prod, i, j, f.M);
  return G;
}

double objective_n8(const ProbDistMatrix& P, int gamma, int kappa, bool w1_zero) {
  Weights8 w = cycle8_weights(gamma, kappa);
  Factors f(P, true);
  double val = 0;
  if (!w1_zero)
    val += w.w1 * coeff_sum_mod(conv(conv(f.S, f.S), conv(f.Sb, f.Sb)), 0, 0, f.M);
  val += w.w2 * coeff_sum_mod(conv(conv(f.S, f.Sb), conv(f.A2, f.Ab2)), 0, 0, f.M);
  val += w.w3 * coeff_sum_mod(conv(conv(f.S, f.A2), f.Ab4), 0, 0, f.M);
  val += w.w4 * coeff_sum_mod(conv(f.A4, f.Ab4), 0, 0, f.M);
  return val;
}

std::vector<double> gradient_n8(const ProbDistMatrix& P, int gamma, int kappa, bool w1_zero) {
  Weights8 w = cycle8_weights(gamma, kappa);
  Factors f(P, true);
  const int M = P.copies;

  CoeffGrid t1, t2, t3, t4, t5, t6, t7;
  if (!w1_zero) t1 = conv(conv(f.S, f.S), f.Sb);
  t2 = conv(conv(f.S, f.A2), f.Ab2);
  t3 = conv(conv(f.S, f.Sb), conv(f.A2, f.Ab));
  t4 = conv(f.A2, f.Ab4);
  t5 = conv(conv(f.S, f.A), f.Ab4);
  t6 = conv(conv(f.S, f.A2), f.Ab3);
  t7 = conv(f.A4, f.Ab3);

  std::vector<double> G(static_cast<size_t>(P.memory + 1) * M);
  for (int i = 0; i <= P.memory; ++i)
    for (int j = 0; j < M; ++j) {
      double g = 0;
      if (!w1_zero) g += 4.0 * w.w1 * coeff_sum_mod(t1, 2 * i, 2 * j, M);
      g += 2.0 * w.w2 * coeff_sum_mod(t2, 2 * i, 2 * j, M);
      g += 4.0 * w.w2 * coeff_sum_mod(t3, i, j, M);
      g += 1.0 * w.w3 * coeff_sum_mod(t4, -2 * i, -2 * j, M);
      g += 2.0 * w.w3 * coeff_sum_mod(t5, -i, -j, M);
      g += 4.0 * w.w3 * coeff_sum_mod(t6, i, j, M);
      g += 8.0 * w.w4 * coeff_sum_mod(t7, i, j, M);
      G[static_cast<size_t>(i) * M + j] = g;
    }
  return G;
}

void GradeConfig::validate() const {
  if (alpha <= 0) throw std::invalid_argument("alpha must be positive");
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  if (density_cap <= 0 || density_cap >= 100)
    throw std::invalid_argument("density cap must be in (0, 100)");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
}

Forecast forecast(const ProbDistMatrix& P, const CodeParams& p, Objective obj, bool w1_zero) {
  const int chi = obj == Objective::cycle6 ? p.memory + 1 : 2 * p.memory + 1;
  if (p.coupling_len <= chi)
    throw std::invalid_argument("coupling length must exceed the maximum cycle span");
  Forecast fc;
  fc.objective = obj;
  const double L = p.coupling_len, m = p.memory, M = p.copies;
  fc.n_candidates = obj == Objective::cycle6 ? objective_n6(P, p.gamma, p.kappa)
                                             : objective_n8(P, p.gamma, p.kappa, w1_zero);
  fc.e_cycles = obj == Objective::cycle6 ? fc.n_candidates * (2 * L - m) / 2.0 * M
                                         : fc.n_candidates * (L - m) * M;
  fc.e_obj = fc.n_candidates / p.z;
  fc.lower = fc.n_candidates * (L - chi + 1) * M;
  fc.upper = fc.n_candidates * L * M;
  return fc;
}

namespace {

struct LoopEval {
  double value;
  std::vector<double> grad;
};

LoopEval eval_objective(const ProbDistMatrix& P, int gamma, int kappa, Objective obj,
                        bool w1_zero) {
  if (obj == Objective::cycle6)
    return {objective_n6(P, gamma, kappa), gradient_n6(P, gamma, kappa)};
  return {objective_n8(P, gamma, kappa, w1_zero), gradient_n8(P, gamma, kappa, w1_zero)};
}

// One normalized step followed by the projection; halves the step on a
// divergent projection. Returns false if the step size underflowed.
bool descend_step(ProbDistMatrix& P, const std::vector<double>& grad, double alpha) {
  double norm = 0;
  for (double g : grad) norm += g * g;
  norm = std::sqrt(norm);
  if (norm == 0) return true;
  while (alpha > 1e-14) {
    ProbDistMatrix trial = P;
    for (size_t k = 0; k < grad.size(); ++k) trial.coeffs[k] -= alpha * grad[k] / norm;
    try {
      force(trial);
      P = std::move(trial);
      return true;
    } catch (const std::runtime_error&) {
      alpha *= 0.5;  // divergent step
    }
  }
  return false;
}

}  // namespace

MdGradeResult md_grade(const CodeParams& p, const std::vector<double>& p_star,
                       const GradeConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(p_star.size()) != p.memory + 1)
    throw std::invalid_argument("p_star must have m+1 entries");
  double ssum = 0;
  for (double v : p_star) {
    if (v < 0) throw std::invalid_argument("p_star entries must be nonnegative");
    ssum += v;
  }
  if (std::abs(ssum - 1.0) > 1e-9) throw std::invalid_argument("p_star must sum to 1");

  MdGradeResult res;
  ProbDistMatrix P(p.memory, p.copies);
  P.row_targets = p_star;
  for (int i = 0; i <= p.memory; ++i) P.at(i, 0) = p_star[i];

  double f_prev = 0, f_cur = 0;
  long long iter = 0;
  std::string status;
  for (;;) {
    LoopEval ev = eval_objective(P, p.gamma, p.kappa, cfg.objective, cfg.w1_zero);
    f_cur = ev.value;
    ++iter;
    if (!descend_step(P, ev.grad, cfg.alpha)) {
      status = "stalled";
      break;
    }
    double pct = 100.0 * P.column0_sum();
    bool density_reached = pct <= 100.0 - cfg.density_cap && iter >= cfg.min_iters;
    bool stalled = std::abs(f_cur - f_prev) <= cfg.epsilon;
    if (density_reached || stalled || iter >= cfg.max_iters) {
      status = density_reached ? "density" : (stalled ? "converged" : "max_iters");
      break;
    }
    f_prev = f_cur;
  }

  res.P = std::move(P);
  res.iterations = iter;
  res.objective_final = f_cur;
  res.status = status;
  res.fc = forecast(res.P, p, cfg.objective, cfg.w1_zero);
  return res;
}

namespace {

// Projection of a full vector onto {v >= 0, sum v = target}, same two-phase
// rule as force applied to a single row.
void force_vector(std::vector<double>& v, double target) {
  double s = 0;
  for (double x : v) s += x;
  double shift = (target - s) / static_cast<double>(v.size());
  double pos = 0;
  for (double& x : v) {
    x += shift;
    pos += std::max(x, 0.0);
  }
  if (pos <= 0) throw std::runtime_error("force: vector collapsed to zero");
  for (double& x : v) x = std::max(x, 0.0) * (target / pos);
}

double eval_1d(const std::vector<double>& v, int gamma, int kappa, Objective obj, bool w1_zero,
               std::vector<double>* grad) {
  ProbDistMatrix P(static_cast<int>(v.size()) - 1, 1);
  P.coeffs = v;
  P.row_targets = v;
  if (grad) {
    *grad = obj == Objective::cycle6 ? gradient_n6(P, gamma, kappa)
                                     : gradient_n8(P, gamma, kappa, w1_zero);
  }
  return obj == Objective::cycle6 ? objective_n6(P, gamma, kappa)
                                  : objective_n8(P, gamma, kappa, w1_zero);
}

double descend_1d(std::vector<double>& v, int gamma, int kappa, Objective obj, bool w1_zero,
                  double alpha, double epsilon, long long max_iters) {
  std::vector<double> grad;
  double f_prev = 0, f_cur = 0;
  for (long long iter = 0; iter < max_iters; ++iter) {
    f_cur = eval_1d(v, gamma, kappa, obj, w1_zero, &grad);
    double norm = 0;
    for (double g : grad) norm += g * g;
    norm = std::sqrt(norm);
    if (norm == 0) break;
    std::vector<double> trial = v;
    for (size_t k = 0; k < v.size(); ++k) trial[k] -= alpha * grad[k] / norm;
    force_vector(trial, 1.0);
    v = std::move(trial);
    if (std::abs(f_cur - f_prev) <= epsilon) break;
    f_prev = f_cur;
  }
  return eval_1d(v, gamma, kappa, obj, w1_zero, nullptr);
}

}  // namespace

std::vector<double> grade_1d(const CodeParams& p, Objective obj, bool w1_zero, uint64_t seed) {
  if (p.memory < 1) throw std::invalid_argument("grade_1d needs memory >= 1");
  const int n = p.memory + 1;
  Rng rng(seed);
  std::vector<double> best;
  double best_f = 0;

  const int restarts = 5;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> v(n, 1.0 / n);
    if (r > 0) {
      double s = 0;
      for (double& x : v) {
        x = -std::log(1.0 - rng.uniform01());  // exponential, i.e. Dirichlet(1)
        s += x;
      }
      for (double& x : v) x /= s;
    }
    descend_1d(v, p.gamma, p.kappa, obj, w1_zero, 0.02, 1e-10, 20000);
    // polish with a decaying step so the KKT residual tightens
    double f = 0;
    for (double a = 0.01; a > 1e-6; a *= 0.5)
      f = descend_1d(v, p.gamma, p.kappa, obj, w1_zero, a, 1e-13, 2000);
    if (best.empty() || f < best_f) {
      best = v;
      best_f = f;
    }
  }
  return best;
}

}  // namespace mdsc
