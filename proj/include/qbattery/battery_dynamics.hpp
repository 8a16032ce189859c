#pragma once

#include <functional>
#include <variant>

#include "qbattery/model_builders.hpp"
#include "qbattery/state_prep.hpp"
#include "qbattery/tensor_core.hpp"

namespace qbattery {

/// Time series of the battery figures of merit on a uniform grid over (0, t_max].
struct PowerTrace {
  RVector times;
  RVector work;
  RVector power;
  RVector ergotropy;  // empty when not requested
  double t_star = 0.0;
  double p_max = 0.0;
};

struct DeltaRecord {
  double p_max_nonhermitian = 0.0;
  double p_max_hermitian = 0.0;
  double delta = 0.0;  // p_max_nonhermitian - p_max_hermitian
  double t_star_nonhermitian = 0.0;
  double t_star_hermitian = 0.0;
};

struct TraceOptions {
  bool ergotropy = true;
  bool refine = true;
};

inline constexpr double kDefaultTMax = 10.0;
inline constexpr int kDefaultGrid = 2000;

/// K rho K^dagger / tr(...) or K psi / ||K psi||, plus the pre-normalization
/// trace (squared norm for pure states).
struct Propagated {
  QuantumState state;
  double raw_trace;
};
Propagated propagate(const CMatrix& k, const QuantumState& rho0);

/// exp(-i H t) applied to rho0 and renormalized. Throws NormalizationUnderflowError
/// when the unnormalized trace drops below 1e-300.
QuantumState evolve_normalized(const Operator& h_charge, const QuantumState& rho0, double t);

/// Real part of tr[H_B (rho_t - rho0)]; ConsistencyError if |Im| >= 1e-10.
double work(const Operator& h_b, const QuantumState& rho0, const QuantumState& rho_t);

/// tr(H_B rho) minus the passive-state energy.
double ergotropy(const Operator& h_b, const QuantumState& rho);
/// Same, with the ascending battery spectrum supplied by the caller.
double ergotropy(const Operator& h_b, const RVector& battery_spectrum, const QuantumState& rho);

/// Visits the normalized state at t_k = k * dt for k = 1..n_steps. Each state is
/// built from independently exponentiated factors exp(-i H 2^j dt) (at most
/// log2(n_steps) of them), never by repeated stepping.
void for_each_grid_state(const Operator& h_charge, const QuantumState& rho0, double dt,
                         int n_steps,
                         const std::function<void(int, const QuantumState&)>& visit);

PowerTrace power_trace(const Operator& h_b, const Operator& h_charge, const QuantumState& rho0,
                       double t_max = kDefaultTMax, int n_grid = kDefaultGrid,
                       TraceOptions options = {});

DeltaRecord delta_p_max(const Operator& h_b, const Operator& nonhermitian,
                        const Operator& hermitian, const QuantumState& rho0,
                        double t_max = kDefaultTMax, int n_grid = kDefaultGrid);

// Model-level pipeline ---------------------------------------------------------

struct NonInteractingBattery {
  int n_sites = 2;
};
using BatteryModel = std::variant<BatterySpec, NonInteractingBattery>;

enum class InitKind { ground, ground_projector, thermal };

struct InitialCondition {
  InitKind kind = InitKind::ground;
  double beta = 0.0;  // thermal only; scaled by the battery's energy unit
};

struct PreparedBattery {
  Operator raw;
  Operator normalized;
  /// |h| for the XYZ battery, |J| = 1 for the non-interacting one.
  double energy_unit = 1.0;
};

PreparedBattery prepare_battery(const BatteryModel& model);

/// ground: pure ground state of the normalized battery.
/// ground_projector: equal mixture over the ground space.
/// thermal: exp(-beta H_raw / energy_unit) / Z.
QuantumState prepare_initial_state(const PreparedBattery& battery, const InitialCondition& init);

DeltaRecord delta_p_max(const BatteryModel& battery, const ChargerSpec& nonhermitian,
                        const ChargerSpec& hermitian, const InitialCondition& init,
                        double t_max = kDefaultTMax, int n_grid = kDefaultGrid);

}  // namespace qbattery
