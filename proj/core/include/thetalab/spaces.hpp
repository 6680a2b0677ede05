#pragma once

// Exact linear algebra on the delta basis of sections of L^{tensor N} on X^N:
// the image of phi_N^*, its alternating part E and the subspace E^0, and
// the parity split of the level-m sections.

#include <cstddef>
#include <vector>

#include "thetalab/lattice.hpp"
#include "thetalab/rational_linalg.hpp"
#include "thetalab/siegel.hpp"

namespace thetalab::spaces {

using Tuple = std::vector<lattice::GroupElement>;

/// Indexing of the delta basis {delta_b : b in B(L^{tensor N})^N}.
class DeltaBasis {
 public:
  DeltaBasis(long long N, lattice::LevelStructure level);

  long long N() const noexcept { return N_; }
  const lattice::LevelStructure& level() const noexcept { return level_; }
  const lattice::FiniteAbelianGroup& base_group() const noexcept { return base_; }
  const lattice::FiniteAbelianGroup& power_group() const noexcept { return power_; }
  std::size_t size() const noexcept { return size_; }

  std::size_t index_of(const Tuple& b) const;
  Tuple tuple_at(std::size_t index) const;

 private:
  long long N_;
  lattice::LevelStructure level_;
  lattice::FiniteAbelianGroup base_;
  lattice::FiniteAbelianGroup power_;
  std::size_t size_ = 0;
};

/// 0/1 indicator of the fiber over d (and h for the general form).
linalg::RationalVector image_vector(const Tuple& d, long long N, const lattice::LevelStructure& level);
linalg::RationalVector image_vector(const Tuple& d, const Tuple& h, long long N, const lattice::LevelStructure& level);

struct ImageReport {
  std::size_t dimension = 0;
  BigInt formula;             ///< N^{(N-2)g} |B(L)|^N
  bool d_type_only = false;   ///< gcd(level, N) != 1: only d-type generators enumerated
  std::size_t generators = 0;
};

ImageReport image_dimension(long long N, const lattice::LevelStructure& level);

struct ParitySplit {
  std::size_t plus = 0;
  std::size_t minus = 0;
  linalg::RationalMatrix projector_plus;
  linalg::RationalMatrix projector_minus;
  linalg::RationalMatrix basis_minus;  ///< delta_c - delta_{-c}, one per orbit with c != -c
};

/// Involution delta_c -> delta_{-c} on the level-L sections.
ParitySplit parity_split(const lattice::LevelStructure& level);

struct SpaceReport {
  long long N = 0;
  ImageReport image;
  std::size_t e_dim = 0;
  std::size_t e0_dim = 0;
  std::size_t v_plus = 0;
  std::size_t v_minus = 0;
  bool e_alternating = true;
  bool e0_alternating = true;
  bool e0_in_e = true;
  linalg::RationalMatrix e_basis;
  linalg::RationalMatrix e0_basis;
};

SpaceReport e_space_dims(long long N, const lattice::LevelStructure& level);

/// v o sigma = sgn(sigma) v for every permutation of the N slots (checked on
/// adjacent transpositions, which generate S_N).
bool is_alternating(const linalg::RationalVector& v, const DeltaBasis& basis);

/// sum_b v_b prod_i theta_{L^N}[b_i](x_i).
Complex evaluate_delta_vector(const linalg::RationalVector& v, const DeltaBasis& basis, const SiegelMatrix& omega,
                              const std::vector<ComplexVector>& x, double epsilon = 1e-15);

}  // namespace thetalab::spaces
