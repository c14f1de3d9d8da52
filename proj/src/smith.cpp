#include "gerbes/smith.hpp"

#include <cstdlib>
#include <stdexcept>

namespace gerbes {

namespace {

void swap_rows(SmithForm& f, int a, int b) {
  f.D.row(a).swap(f.D.row(b));
  f.S.row(a).swap(f.S.row(b));
}

void swap_cols(SmithForm& f, int a, int b) {
  f.D.col(a).swap(f.D.col(b));
  f.T.col(a).swap(f.T.col(b));
  f.Tinv.row(a).swap(f.Tinv.row(b));
}

// row a -= q * row b
void add_row(SmithForm& f, int a, int b, std::int64_t q) {
  f.D.row(a) -= q * f.D.row(b);
  f.S.row(a) -= q * f.S.row(b);
}

// col a -= q * col b ; Tinv: row b += q * row a
void add_col(SmithForm& f, int a, int b, std::int64_t q) {
  f.D.col(a) -= q * f.D.col(b);
  f.T.col(a) -= q * f.T.col(b);
  f.Tinv.row(b) += q * f.Tinv.row(a);
}

void negate_row(SmithForm& f, int a) {
  f.D.row(a) = -f.D.row(a);
  f.S.row(a) = -f.S.row(a);
}

}  // namespace

SmithForm smith_normal_form(const IntMat& A) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  SmithForm f;
  f.D = A;
  f.S = IntMat::Identity(m, m);
  f.T = IntMat::Identity(n, n);
  f.Tinv = IntMat::Identity(n, n);

  int k = 0;
  while (k < m && k < n) {
    // Locate a pivot: smallest |entry| != 0 in the trailing block.
    int pi = -1, pj = -1;
    std::int64_t best = 0;
    for (int i = k; i < m; ++i)
      for (int j = k; j < n; ++j) {
        std::int64_t v = std::abs(f.D(i, j));
        if (v != 0 && (pi < 0 || v < best)) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;  // trailing block is zero
    if (pi != k) swap_rows(f, k, pi);
    if (pj != k) swap_cols(f, k, pj);

    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = k + 1; i < m; ++i) {
        if (f.D(i, k) != 0) {
          std::int64_t q = f.D(i, k) / f.D(k, k);
          add_row(f, i, k, q);
          if (f.D(i, k) != 0) {  // remainder became the smaller pivot
            swap_rows(f, k, i);
            clean = false;
          }
        }
      }
      for (int j = k + 1; j < n; ++j) {
        if (f.D(k, j) != 0) {
          std::int64_t q = f.D(k, j) / f.D(k, k);
          add_col(f, j, k, q);
          if (f.D(k, j) != 0) {
            swap_cols(f, k, j);
            clean = false;
          }
        }
      }
    }
    if (f.D(k, k) < 0) negate_row(f, k);
    ++k;
  }
  f.rank = 0;
  for (int i = 0; i < std::min(m, n); ++i)
    if (f.D(i, i) != 0) ++f.rank;

  // Enforce the divisibility chain d_i | d_{i+1}.
  for (int i = 0; i + 1 < f.rank; ++i) {
    for (int j = i + 1; j < f.rank; ++j) {
      if (f.D(j, j) % f.D(i, i) != 0) {
        // fold d_j into position i and re-diagonalize the 2x2 block
        add_col(f, i, j, -1);  // col i += col j
        bool clean = false;
        while (!clean) {
          clean = true;
          if (f.D(j, i) != 0) {
            std::int64_t q = f.D(j, i) / f.D(i, i);
            add_row(f, j, i, q);
            if (f.D(j, i) != 0) {
              swap_rows(f, i, j);
              clean = false;
            }
          }
          if (f.D(i, j) != 0) {
            std::int64_t q = f.D(i, j) / f.D(i, i);
            add_col(f, j, i, q);
            if (f.D(i, j) != 0) {
              swap_cols(f, i, j);
              clean = false;
            }
          }
        }
        if (f.D(i, i) < 0) negate_row(f, i);
        if (f.D(j, j) < 0) negate_row(f, j);
      }
    }
  }
  return f;
}

IntMat kernel_basis(const SmithForm& f) {
  const int n = static_cast<int>(f.T.rows());
  const int r = f.rank;
  IntMat K(n, n - r);
  for (int j = r; j < n; ++j) K.col(j - r) = f.T.col(j);
  return K;
}

std::optional<IntVec> solve_integer(const SmithForm& f, const IntVec& b) {
  // A x = b  <=>  D y = S b with x = T y.
  IntVec c = f.S * b;
  const int n = static_cast<int>(f.T.rows());
  const int m = static_cast<int>(f.S.rows());
  IntVec y = IntVec::Zero(n);
  for (int i = 0; i < m; ++i) {
    std::int64_t d = (i < std::min<int>(m, n)) ? f.D(i, i) : 0;
    if (d == 0) {
      if (c(i) != 0) return std::nullopt;
    } else {
      if (c(i) % d != 0) return std::nullopt;
      y(i) = c(i) / d;
    }
  }
  return IntVec(f.T * y);
}

}  // namespace gerbes
