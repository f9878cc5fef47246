#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wapf/domain.hpp"
#include "wapf/fields.hpp"
#include "wapf/gravity.hpp"
#include "wapf/monitor.hpp"
#include "wapf/transport.hpp"

namespace wapf {

enum class Integrator { Euler, RK4, ExactTransport2D };

struct SolverConfig {
  Integrator integrator = Integrator::RK4;
  double cfl = 0.5;
  double t_end = 1.0;
  std::optional<double> dt_max;
  /// Snapshot interval; 0 keeps only the initial and final states.
  double snapshot_every = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Default CFL number for an integrator (0.9 Euler / exact transport, 0.5 RK4).
double default_cfl(Integrator integrator);

/// dt = min(cfl * min(eps / U, sqrt(eps / Gamma)), dt_max) where U is the
/// largest cellwise sum of |u_a| and Gamma = max |grad Phi| (both floored at
/// 1e-30).
double choose_dt(const FluidState& state, const GravityField& field, const SolverConfig& cfg,
                 const DomainSpec& domain);

/// Owns the gravity solver so that repeated steps reuse its transforms.
class Stepper {
 public:
  Stepper(const DomainSpec& domain, const GravityConfig& gravity, const SolverConfig& solver);

  const DomainSpec& domain() const { return domain_; }
  const GravityConfig& gravity_config() const { return gcfg_; }
  const SolverConfig& solver_config() const { return scfg_; }

  GravityField field(const FluidState& state) const { return gravity_.compute(state); }

  /// Transport plus gravity source, with the field recomputed from `state`
  /// unless supplied.
  RhsOutput rhs(const FluidState& state, const GravityField* field = nullptr) const;

  /// Advance by dt. Throws PositivityError if any density is not strictly
  /// positive afterwards. `field_at_t` may carry the field of `state`.
  FluidState step(const FluidState& state, double dt, const GravityField* field_at_t = nullptr) const;

 private:
  DomainSpec domain_;
  GravityConfig gcfg_;
  SolverConfig scfg_;
  GravitySolver gravity_;
};

FluidState step(const FluidState& state, const DomainSpec& domain, const GravityConfig& gravity,
                const SolverConfig& solver, double dt);

/// Callbacks invoked during run(). Either may be empty.
struct RunObserver {
  std::function<void(const DiagnosticsRecord&)> on_record;
  std::function<void(const FluidState&)> on_snapshot;
};

struct RunResult {
  std::vector<FluidState> snapshots;
  std::vector<DiagnosticsRecord> diagnostics;
  FluidState final_state;
  std::size_t steps = 0;
};

/// Loops choose_dt/step until t_end. One diagnostics record per step (the
/// record of step n describes the state before the step and the dt taken),
/// plus a final record with dt = 0. Snapshots are taken at t = 0, every
/// snapshot_every (steps are shortened to land on those times) and at t_end.
/// When `keep_in_memory` is false, snapshots and records only go to the
/// observer.
RunResult run(const FluidState& initial, const DomainSpec& domain, const GravityConfig& gravity,
              const SolverConfig& solver, const RunObserver& observer = {}, bool keep_in_memory = true);

}  // namespace wapf
