#include "mdsc/code_model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace mdsc {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; 1LL * d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

void CodeParams::validate(bool require_prime_z) const {
  if (gamma < 3) throw std::invalid_argument("gamma must be >= 3");
  if (kappa <= gamma) throw std::invalid_argument("kappa must be > gamma");
  if (z < 2) throw std::invalid_argument("z must be >= 2");
  if (memory < 0) throw std::invalid_argument("memory must be >= 0");
  if (coupling_len <= memory)
    throw std::invalid_argument("coupling length L must exceed memory m");
  if (copies < 1) throw std::invalid_argument("copies M must be >= 1");
  if (require_prime_z && !is_prime(z))
    throw std::invalid_argument("z must be prime for the cycle-8 design flow");
}

namespace {
void check_dims(const IntGrid& g, const CodeParams& p, const char* what) {
  if (g.rows != p.gamma || g.cols != p.kappa)
    throw std::invalid_argument(std::string(what) + " matrix must be gamma x kappa");
}
void check_range(const IntGrid& g, int lo, int hi, const char* what) {
  for (int v : g.data)
    if (v < lo || v > hi)
      throw std::invalid_argument(std::string(what) + " entry out of range");
}
}  // namespace

void validate_partitioning(const PartitioningMatrix& K, const CodeParams& p) {
  check_dims(K.m, p, "partitioning");
  check_range(K.m, 0, p.memory, "partitioning");
}

void validate_lifting(const LiftingMatrix& L, const CodeParams& p) {
  check_dims(L.m, p, "lifting");
  check_range(L.m, 0, p.z - 1, "lifting");
}

void validate_relocation(const RelocationMatrix& R, const CodeParams& p) {
  check_dims(R.m, p, "relocation");
  check_range(R.m, 0, p.copies - 1, "relocation");
}

void SparseQcMatrix::check() const {
  std::set<std::pair<int, int>> seen;
  for (const auto& b : blocks) {
    if (b.row < 0 || b.row >= block_rows || b.col < 0 || b.col >= block_cols)
      throw std::invalid_argument("block index out of range");
    if (b.power < 0 || b.power >= z)
      throw std::invalid_argument("circulant power out of range");
    if (!seen.insert({b.row, b.col}).second)
      throw std::invalid_argument("duplicate block position");
  }
}

SparseQcMatrix build_sc_protograph(const PartitioningMatrix& K, const CodeParams& p) {
  validate_partitioning(K, p);
  SparseQcMatrix H;
  H.block_rows = (p.memory + p.coupling_len) * p.gamma;
  H.block_cols = p.coupling_len * p.kappa;
  H.z = p.z;
  H.fold_rows = p.gamma;
  H.fold_cols = p.kappa;
  H.blocks.reserve(static_cast<size_t>(p.coupling_len) * p.gamma * p.kappa);
  for (int r = 1; r <= p.coupling_len; ++r)
    for (int i = 0; i < p.gamma; ++i)
      for (int j = 0; j < p.kappa; ++j)
        H.blocks.push_back({(r - 1 + K.m.at(i, j)) * p.gamma + i, (r - 1) * p.kappa + j, 0});
  return H;
}

SparseQcMatrix build_sc_matrix(const PartitioningMatrix& K, const LiftingMatrix& L,
                               const CodeParams& p) {
  validate_lifting(L, p);
  SparseQcMatrix H = build_sc_protograph(K, p);
  for (auto& b : H.blocks) b.power = L.m.at(b.row % p.gamma, b.col % p.kappa);
  return H;
}

SparseQcMatrix build_md_matrix(const PartitioningMatrix& K, const LiftingMatrix& L,
                               const RelocationMatrix& R, const CodeParams& p) {
  validate_relocation(R, p);
  const int M = p.copies;
  if (M == 1) {
    for (int v : R.m.data)
      if (v != 0)
        throw std::invalid_argument("nonzero relocation entry with a single copy");
  }
  SparseQcMatrix sc = build_sc_matrix(K, L, p);
  SparseQcMatrix H;
  H.block_rows = M * sc.block_rows;
  H.block_cols = M * sc.block_cols;
  H.z = p.z;
  H.fold_rows = p.gamma;
  H.fold_cols = p.kappa;
  H.blocks.reserve(sc.blocks.size() * M);
  for (int c = 0; c < M; ++c) {
    for (const auto& b : sc.blocks) {
      int l = R.m.at(b.row % p.gamma, b.col % p.kappa);
      int copy_col = ((c - l) % M + M) % M;
      H.blocks.push_back({c * sc.block_rows + b.row, copy_col * sc.block_cols + b.col, b.power});
    }
  }
  return H;
}

double md_density(const RelocationMatrix& R) {
  if (R.m.data.empty()) return 0.0;
  long long nz = std::count_if(R.m.data.begin(), R.m.data.end(), [](int v) { return v != 0; });
  return 100.0 * static_cast<double>(nz) / static_cast<double>(R.m.data.size());
}

std::vector<long long> component_census(const PartitioningMatrix& K, int memory) {
  std::vector<long long> counts(memory + 1, 0);
  for (int v : K.m.data) {
    if (v < 0 || v > memory) throw std::invalid_argument("partitioning entry out of range");
    ++counts[v];
  }
  return counts;
}

double design_rate(const CodeParams& p) {
  return 1.0 - static_cast<double>((p.memory + p.coupling_len) * p.gamma) /
                   static_cast<double>(p.coupling_len * p.kappa);
}

}  // namespace mdsc
