#pragma once

#include <cstddef>
#include <vector>

#include "thetalab/numeric.hpp"

namespace thetalab::linalg {

using RationalVector = std::vector<Rational>;
/// Dense, row-major; rows may be read as generators of a row space.
using RationalMatrix = std::vector<RationalVector>;

/// Rank by fraction-free (Bareiss) elimination after clearing denominators.
std::size_t rank(const RationalMatrix& A);

/// Reduced row echelon form; pivot columns written to *pivots when given.
RationalMatrix rref(RationalMatrix A, std::vector<std::size_t>* pivots = nullptr);

/// Basis of {x : A x = 0}; cols is the column count (needed when A has no rows).
RationalMatrix nullspace(const RationalMatrix& A, std::size_t cols);

/// Nonzero rows of the RREF: a canonical basis of the row space.
RationalMatrix row_basis(const RationalMatrix& A);

/// Basis of rowspace(A) intersected with rowspace(B).
RationalMatrix intersect_row_spaces(const RationalMatrix& A, const RationalMatrix& B, std::size_t cols);

RationalMatrix multiply(const RationalMatrix& A, const RationalMatrix& B);
RationalMatrix identity(std::size_t n);
RationalMatrix transpose(const RationalMatrix& A, std::size_t cols);

}  // namespace thetalab::linalg
