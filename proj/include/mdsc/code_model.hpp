#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mdsc {

// Dense row-major integer grid. Shared storage for partitioning, lifting and
// relocation matrices as well as generic matrix I/O.
struct IntGrid {
  int rows = 0;
  int cols = 0;
  std::vector<int> data;

  IntGrid() = default;
  IntGrid(int r, int c, int fill = 0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  int& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  int at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
  bool operator==(const IntGrid&) const = default;
};

// Family parameters of an MD-SC code: base matrix is gamma x kappa, circulant
// size z, coupling length L, memory m (m+1 component matrices), M coupled
// copies.
struct CodeParams {
  int gamma = 0;
  int kappa = 0;
  int z = 1;
  int coupling_len = 1;  // L
  int memory = 0;        // m
  int copies = 1;        // M

  // Throws std::invalid_argument on violated constraints. require_prime_z
  // additionally enforces primality (needed by the cycle-8 design flow, where
  // protograph 4-cycles must not be able to lift into 8-cycles).
  void validate(bool require_prime_z = false) const;
};

bool is_prime(int n);

struct PartitioningMatrix {
  IntGrid m;  // entries in {0..memory}
};

struct LiftingMatrix {
  IntGrid m;  // circulant powers in {0..z-1}
};

struct RelocationMatrix {
  IntGrid m;  // auxiliary index in {0..copies-1}; 0 = not relocated
};

void validate_partitioning(const PartitioningMatrix&, const CodeParams&);
void validate_lifting(const LiftingMatrix&, const CodeParams&);
void validate_relocation(const RelocationMatrix&, const CodeParams&);

// One nonzero circulant block of a lifted matrix.
struct QcBlock {
  int row = 0;    // block-row index
  int col = 0;    // block-col index
  int power = 0;  // circulant power in {0..z-1}
};

// Block-sparse representation of a quasi-cyclic parity-check matrix. The
// expanded binary matrix has size (block_rows*z) x (block_cols*z); block
// (r,c,f) expands to the z x z matrix with 1 at (a, b) iff b = a - f (mod z),
// i.e. the identity cyclically shifted left f times.
//
// fold_rows/fold_cols record the base-matrix period of the block grid (gamma
// and kappa for SC/MD constructions): block (R,C) descends from base position
// (R mod fold_rows, C mod fold_cols). A value of 0 means "unstructured"; the
// whole block grid is then its own base.
struct SparseQcMatrix {
  int block_rows = 0;
  int block_cols = 0;
  int z = 1;
  int fold_rows = 0;
  int fold_cols = 0;
  std::vector<QcBlock> blocks;

  int base_rows() const { return fold_rows > 0 ? fold_rows : block_rows; }
  int base_cols() const { return fold_cols > 0 ? fold_cols : block_cols; }
  long long expanded_rows() const { return 1LL * block_rows * z; }
  long long expanded_cols() const { return 1LL * block_cols * z; }

  // Throws if a (row,col) pair appears twice or an index/power is out of range.
  void check() const;
};

// All-one base matrix spread over L replicas: replica r (1-based) places base
// position (i,j) at block-row (r-1+K(i,j))*gamma + i, block-col (r-1)*kappa + j.
// Powers are all zero.
SparseQcMatrix build_sc_protograph(const PartitioningMatrix& K, const CodeParams& p);

// Same sparsity with circulant powers taken from the lifting matrix.
SparseQcMatrix build_sc_matrix(const PartitioningMatrix& K, const LiftingMatrix& L,
                               const CodeParams& p);

// M copies of the SC matrix coupled block-circulantly: every block whose base
// position has relocation value l > 0 moves from the diagonal copy c into copy
// column (c - l) mod M (a left shift by l*L*kappa*z expanded columns). Copy
// block (R,C) therefore holds exactly the circulants with relocation value
// (R-C) mod M.
SparseQcMatrix build_md_matrix(const PartitioningMatrix& K, const LiftingMatrix& L,
                               const RelocationMatrix& R, const CodeParams& p);

// Percentage of relocated circulants (nonzero relocation entries).
double md_density(const RelocationMatrix& R);

// counts[a] = number of base positions assigned to component a; sums to
// gamma*kappa.
std::vector<long long> component_census(const PartitioningMatrix& K, int memory);

// Design rate 1 - (m+L)*gamma / (L*kappa); identical for the SC code and the
// M-fold MD construction built from it.
double design_rate(const CodeParams& p);

}  // namespace mdsc
