#pragma once

#include "qbattery/tensor_core.hpp"

namespace qbattery {

/// XYZ chain in a transverse field:
///   H = (J/4) sum [(1+g) XX + (1-g) YY] + (delta/4) sum ZZ + (h/2) sum Z
struct BatterySpec {
  double J = 1.0;
  double gamma = 0.0;
  double delta = 0.0;
  double h = 1.0;
  int n_sites = 2;
  Boundary boundary = Boundary::periodic;
};

enum class ChargerKind { pt, pt_hermitian, rt, rt_hermitian };

struct ChargerSpec {
  ChargerKind kind = ChargerKind::pt;
  double alpha = 0.0;        // PT kinds only
  double gamma_prime = 0.0;  // RT kinds only
  double J = 1.0;            // RT kinds only
  double h_prime = 0.0;      // RT kinds only
  int n_sites = 2;
  Boundary boundary = Boundary::periodic;
};

enum class SymmetryKind { pt, rt };
enum class Phase { unbroken_real, broken_complex };

Operator build_battery_xyz(const BatterySpec& spec);

/// sum_r X_r
Operator build_noninteracting_battery(int n_sites);

/// Affine map of the spectrum onto [-1, 1]. Throws DegenerateSpectrumError for H ~ I.
Operator normalize_spectrum(const Operator& h);

/// sum_r [X_r + i sin(alpha) Z_r]
Operator build_pt_charger(double alpha, int n_sites);
/// sum_r [X_r + sin(alpha) Z_r]
Operator build_pt_hermitian_charger(double alpha, int n_sites);

/// XY chain with imaginary anisotropy i*gamma' (RT) or its Hermitian partner
/// with real anisotropy gamma' (RT_HERMITIAN), plus (h'/2) sum Z.
Operator build_rt_charger(const ChargerSpec& spec);

/// Dispatches on spec.kind.
Operator build_charger(const ChargerSpec& spec);

/// ||S conj(H) S^-1 - H||_F / ||H||_F with S = prod_r X_r (PT) or
/// S = exp[-i (pi/4) sum_r Z_r] (RT).
double check_antilinear_symmetry(const Operator& h, SymmetryKind kind);

Phase classify_phase(const Operator& h);

}  // namespace qbattery
