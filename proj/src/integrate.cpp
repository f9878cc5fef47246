#include "wapf/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wapf/error.hpp"

namespace wapf {

namespace {

constexpr double kFloor = 1e-30;

// out = base + h * k, time untouched.
FluidState axpy(const FluidState& base, const RhsOutput& k, double h) {
  FluidState out = base;
  for (std::size_t s = 0; s < out.species.size(); ++s) {
    auto& o = out.species[s];
    const auto& d = k.species[s];
    for (std::size_t c = 0; c < o.rho.size(); ++c) o.rho[c] += h * d.rho[c];
    for (std::size_t a = 0; a < o.mom.size(); ++a)
      for (std::size_t c = 0; c < o.rho.size(); ++c) o.mom[a][c] += h * d.mom[a][c];
    if (o.energy)
      for (std::size_t c = 0; c < o.rho.size(); ++c) (*o.energy)[c] += h * (*d.energy)[c];
  }
  return out;
}

void check_positive(const FluidState& state) {
  for (const auto& s : state.species) {
    for (std::size_t c = 0; c < s.rho.size(); ++c) {
      if (!(s.rho[c] > 0.0)) throw PositivityError(c, state.time, s.rho[c]);
    }
  }
}

// max over cells of sum_a |u_a|, all species
double max_speed_sum(const FluidState& state) {
  double best = 0.0;
  for (const auto& s : state.species) {
    for (std::size_t c = 0; c < s.rho.size(); ++c) {
      double sum = 0.0;
      for (const auto& m : s.mom) sum += std::abs(m[c] / s.rho[c]);
      best = std::max(best, sum);
    }
  }
  return best;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) {
    throw Error(ErrorKind::Config, "cfl must lie in (0, 1], got " + std::to_string(cfl));
  }
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorKind::Config, "t_end must be finite and non-negative");
  }
  if (dt_max && !(*dt_max > 0.0)) throw Error(ErrorKind::Config, "dt_max must be positive");
  if (!(snapshot_every >= 0.0) || !std::isfinite(snapshot_every)) {
    throw Error(ErrorKind::Config, "snapshot_every must be finite and non-negative");
  }
}

double default_cfl(Integrator integrator) { return integrator == Integrator::RK4 ? 0.5 : 0.9; }

double choose_dt(const FluidState& state, const GravityField& field, const SolverConfig& cfg,
                 const DomainSpec& domain) {
  const double eps = domain.epsilon;
  const double U = std::max(max_speed_sum(state), kFloor);
  const double gamma = std::max(field.grad_phi.empty() ? 0.0 : field.max_norm(), kFloor);
  double dt = cfg.cfl * std::min(eps / U, std::sqrt(eps / gamma));
  if (cfg.dt_max) dt = std::min(dt, *cfg.dt_max);
  return dt;
}

Stepper::Stepper(const DomainSpec& domain, const GravityConfig& gravity, const SolverConfig& solver)
    : domain_(domain), gcfg_(gravity), scfg_(solver), gravity_(domain, gravity) {
  domain_.validate();
  gcfg_.validate();
  scfg_.validate();
  if (scfg_.integrator == Integrator::ExactTransport2D && domain_.dim != 2) {
    throw Error(ErrorKind::Config, "the exact transport integrator requires dim = 2");
  }
}

RhsOutput Stepper::rhs(const FluidState& state, const GravityField* field) const {
  RhsOutput out = transport_rhs(state, domain_);
  if (gcfg_.enabled) {
    if (field) {
      apply_gravity_source(out, state, *field);
    } else {
      apply_gravity_source(out, state, gravity_.compute(state));
    }
  }
  return out;
}

FluidState Stepper::step(const FluidState& state, double dt, const GravityField* field_at_t) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::InvalidValue, "step: dt must be positive and finite");
  }
  check_shape(state, domain_);
  FluidState next;
  switch (scfg_.integrator) {
    case Integrator::Euler: {
      next = axpy(state, rhs(state, field_at_t), dt);
      break;
    }
    case Integrator::RK4: {
      const RhsOutput k1 = rhs(state, field_at_t);
      FluidState s2 = axpy(state, k1, 0.5 * dt);
      s2.time = state.time + 0.5 * dt;
      const RhsOutput k2 = rhs(s2);
      FluidState s3 = axpy(state, k2, 0.5 * dt);
      s3.time = s2.time;
      const RhsOutput k3 = rhs(s3);
      FluidState s4 = axpy(state, k3, dt);
      s4.time = state.time + dt;
      const RhsOutput k4 = rhs(s4);
      next = state;
      const double w = dt / 6.0;
      for (std::size_t s = 0; s < next.species.size(); ++s) {
        auto& o = next.species[s];
        const auto &a1 = k1.species[s], &a2 = k2.species[s], &a3 = k3.species[s], &a4 = k4.species[s];
        const std::size_t n = o.rho.size();
        for (std::size_t c = 0; c < n; ++c)
          o.rho[c] += w * (a1.rho[c] + 2.0 * a2.rho[c] + 2.0 * a3.rho[c] + a4.rho[c]);
        for (std::size_t ax = 0; ax < o.mom.size(); ++ax)
          for (std::size_t c = 0; c < n; ++c)
            o.mom[ax][c] +=
                w * (a1.mom[ax][c] + 2.0 * a2.mom[ax][c] + 2.0 * a3.mom[ax][c] + a4.mom[ax][c]);
        if (o.energy)
          for (std::size_t c = 0; c < n; ++c)
            (*o.energy)[c] += w * ((*a1.energy)[c] + 2.0 * (*a2.energy)[c] + 2.0 * (*a3.energy)[c] +
                                   (*a4.energy)[c]);
      }
      break;
    }
    case Integrator::ExactTransport2D: {
      // transport, then a first-order kick with the field of the transported
      // density (a stale field would drag moving concentrations back)
      next = exact_transport_step_2d(state, domain_, dt);
      if (gcfg_.enabled) {
        const GravityField f = gravity_.compute(next);
        for (auto& s : next.species)
          for (std::size_t a = 0; a < s.mom.size(); ++a)
            for (std::size_t c = 0; c < s.rho.size(); ++c) s.mom[a][c] -= dt * s.rho[c] * f.grad_phi[a][c];
      }
      break;
    }
  }
  next.time = state.time + dt;
  check_positive(next);
  return next;
}

FluidState step(const FluidState& state, const DomainSpec& domain, const GravityConfig& gravity,
                const SolverConfig& solver, double dt) {
  return Stepper(domain, gravity, solver).step(state, dt);
}

RunResult run(const FluidState& initial, const DomainSpec& domain, const GravityConfig& gravity,
              const SolverConfig& solver, const RunObserver& observer, bool keep_in_memory) {
  Stepper stepper(domain, gravity, solver);
  check_shape(initial, domain);
  check_positive(initial);

  RunResult result;
  auto snapshot = [&](const FluidState& s) {
    if (observer.on_snapshot) observer.on_snapshot(s);
    if (keep_in_memory) result.snapshots.push_back(s);
  };
  auto record = [&](const DiagnosticsRecord& r) {
    if (observer.on_record) observer.on_record(r);
    if (keep_in_memory) result.diagnostics.push_back(r);
  };

  FluidState state = initial;
  GravityField field = stepper.field(state);
  const InitialStats stats = initial_stats(state, domain, gravity, field);
  const double t0 = state.time;
  const double t_end = t0 + solver.t_end;
  snapshot(state);

  // snapshot times are t0 + k * every; steps are shortened to hit them
  std::size_t next_snap = 1;
  auto snap_time = [&](std::size_t k) {
    return solver.snapshot_every > 0.0 ? t0 + static_cast<double>(k) * solver.snapshot_every
                                       : std::numeric_limits<double>::infinity();
  };

  std::size_t n = 0;
  while (state.time < t_end) {
    double dt = choose_dt(state, field, solver, domain);
    double target = std::min(t_end, snap_time(next_snap));
    bool hits_target = false;
    if (state.time + dt >= target) {
      dt = target - state.time;
      hits_target = true;
    } else if (state.time + 2.0 * dt > target) {
      // avoid a sliver step before the target
      dt = 0.5 * (target - state.time);
    }
    DiagnosticsRecord rec = monitor(state, field, domain, stats);
    rec.step = n;
    rec.dt = dt;
    record(rec);
    try {
      state = stepper.step(state, dt, &field);
    } catch (const PositivityError& e) {
      std::ostringstream msg;
      msg << "step " << n << " at t=" << rec.t << ": " << e.what();
      throw Error(ErrorKind::PositivityViolation, msg.str());
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "step " << n << " at t=" << rec.t << ": " << e.what();
      throw Error(e.kind(), msg.str());
    }
    if (hits_target) state.time = target;  // remove roundoff in the landing time
    ++n;
    field = stepper.field(state);
    if (hits_target && state.time < t_end) {
      snapshot(state);
      ++next_snap;
    } else {
      while (snap_time(next_snap) <= state.time && state.time < t_end) ++next_snap;
    }
  }
  DiagnosticsRecord last = monitor(state, field, domain, stats);
  last.step = n;
  last.dt = 0.0;
  record(last);
  if (solver.t_end > 0.0) snapshot(state);
  result.steps = n;
  result.final_state = std::move(state);
  return result;
}

}  // namespace wapf
