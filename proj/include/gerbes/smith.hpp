#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace gerbes {

using IntMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Smith normal form D = S * A * T with S, T unimodular and
/// D diagonal, d_1 | d_2 | ... | d_r > 0.
struct SmithForm {
  IntMat D;
  IntMat S;     // accumulated row operations (m x m)
  IntMat T;     // accumulated column operations (n x n)
  IntMat Tinv;  // T^{-1}, maintained alongside T
  int rank = 0;

  std::int64_t diag(int i) const { return D(i, i); }
};

SmithForm smith_normal_form(const IntMat& A);

// Basis of the integer kernel lattice of A (columns). Empty matrix with
// A.cols() rows when the kernel is trivial.
IntMat kernel_basis(const SmithForm& f);

// Exact integer solution of A x = b, if one exists.
std::optional<IntVec> solve_integer(const SmithForm& f, const IntVec& b);

}  // namespace gerbes
