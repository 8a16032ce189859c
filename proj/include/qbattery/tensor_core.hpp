#pragma once

#include <cstddef>

#include "qbattery/matrix.hpp"

namespace qbattery {

/// Many-body operator on n_sites qubits. Site 0 is the leftmost (most
/// significant) tensor factor: basis index b = sum_r bit_r 2^(N-1-r).
struct Operator {
  CMatrix matrix;
  int n_sites = 0;
  bool hermitian = false;

  std::size_t dim() const noexcept { return matrix.dim(); }
};

enum class PauliAxis { identity, x, y, z };
enum class Boundary { periodic, open };

/// Largest supported chain length. Defaults to 12; QBATTERY_MAX_SITES overrides.
int max_sites();

Operator pauli(PauliAxis axis);

/// I x ... x op x ... x I with op at site `site`.
Operator embed_site(const Operator& op, int site, int n_sites);

/// embed_site(op_a, r) * embed_site(op_b, (r+1) mod N).
Operator two_site_term(const Operator& op_a, const Operator& op_b, int r, int n_sites,
                       Boundary boundary);

/// Distinct nearest-neighbour bonds (r, r+1 mod N). With periodic boundaries
/// the wrap bond is added only when it differs from bond 0, i.e. for N > 2.
int bond_count(int n_sites, Boundary boundary);

}  // namespace qbattery
