#include "qbattery/tensor_core.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace qbattery {

namespace {

constexpr int kDefaultMaxSites = 12;

void check_sites(int n_sites) {
  if (n_sites < 1) throw std::invalid_argument("n_sites must be >= 1");
  if (n_sites > max_sites()) {
    throw std::invalid_argument("n_sites = " + std::to_string(n_sites) +
                                " exceeds the dense cap of " + std::to_string(max_sites()) +
                                " (set QBATTERY_MAX_SITES to raise it)");
  }
}

}  // namespace

int max_sites() {
  if (const char* env = std::getenv("QBATTERY_MAX_SITES")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 24) return static_cast<int>(v);
  }
  return kDefaultMaxSites;
}

Operator pauli(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::identity:
      return {CMatrix::identity(2), 1, true};
    case PauliAxis::x:
      return {CMatrix{{0.0, 1.0}, {1.0, 0.0}}, 1, true};
    case PauliAxis::y:
      return {CMatrix{{0.0, -kI}, {kI, 0.0}}, 1, true};
    case PauliAxis::z:
      return {CMatrix{{1.0, 0.0}, {0.0, -1.0}}, 1, true};
  }
  throw std::invalid_argument("pauli: unknown axis");
}

Operator embed_site(const Operator& op, int site, int n_sites) {
  if (op.dim() != 2) throw std::invalid_argument("embed_site: operator must be 2x2");
  check_sites(n_sites);
  if (site < 0 || site >= n_sites) {
    throw std::out_of_range("embed_site: site " + std::to_string(site) + " outside [0, " +
                            std::to_string(n_sites) + ")");
  }
  // Direct index construction: out(b, b') = op(bit_r(b), bit_r(b')) when all
  // other bits agree.
  const std::size_t dim = std::size_t{1} << n_sites;
  const std::size_t mask = std::size_t{1} << (n_sites - 1 - site);
  CMatrix m(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    const std::size_t rest = b & ~mask;
    const int bit = (b & mask) ? 1 : 0;
    for (int bp = 0; bp < 2; ++bp) {
      const cplx v = op.matrix(bit, bp);
      if (v == cplx{}) continue;
      m(b, rest | (bp ? mask : 0)) = v;
    }
  }
  return {std::move(m), n_sites, op.hermitian};
}

Operator two_site_term(const Operator& op_a, const Operator& op_b, int r, int n_sites,
                       Boundary boundary) {
  check_sites(n_sites);
  if (r < 0 || r >= n_sites) {
    throw std::out_of_range("two_site_term: bond " + std::to_string(r) + " outside [0, " +
                            std::to_string(n_sites) + ")");
  }
  if (boundary == Boundary::open && r == n_sites - 1) {
    throw std::invalid_argument("two_site_term: open boundary has no bond at r = N-1");
  }
  const int s = (r + 1) % n_sites;
  Operator a = embed_site(op_a, r, n_sites);
  const Operator b = embed_site(op_b, s, n_sites);
  // Distinct sites commute, so the product of Hermitian factors stays Hermitian.
  const bool herm = op_a.hermitian && op_b.hermitian && (r != s);
  return {a.matrix * b.matrix, n_sites, herm};
}

int bond_count(int n_sites, Boundary boundary) {
  if (n_sites < 2) return 0;
  if (boundary == Boundary::open || n_sites == 2) return n_sites - 1;
  return n_sites;
}

}  // namespace qbattery
