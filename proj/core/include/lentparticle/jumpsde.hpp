#pragma once
/// Exact jump-by-jump solution of the SDE, its first variation K, the inverse
/// flow Kbar, the carre du champ accumulator C and the generator path A.
///
/// Every pass over a path walks the same event plan (Euler grid merged with
/// the jump times), so the driver increments are shared between passes.

#include <iosfwd>
#include <vector>

#include "lentparticle/scenario.hpp"

namespace lp {

struct Event {
  double time = 0.0;   // end of the step, or the jump time
  bool is_jump = false;
  std::size_t jump = 0;
  double dt = 0.0;
  double dz = 0.0;     // driver increment: dt for the time driver, N(0, dt) for Brownian
};

std::vector<Event> plan_events(const Scenario& sc, const MarkedPoissonPath& path);

/// Derivatives of (X, Gamma, A) at T along the frozen direction of coordinate j.
struct GammaTableRow {
  SVec<double> dX;       // equals row j of Gamma (consistency check)
  SMat<double> dGamma;   // Gamma[X_j, Gamma_kl]
  SVec<double> dA;
};

struct Trajectory {
  int dim = 0;
  int level = 0;  // 0: state, 1: flow and C, 2: generator and Gamma table
  double horizon = 0.0;
  std::vector<Event> events;
  std::vector<ResolvedMark> marks;
  std::vector<JumpEval> jumps;
  std::vector<std::size_t> jump_event;  // event index of each jump
  std::vector<SVec<double>> x;          // x[0] = x0, x[k+1] after event k
  std::vector<SMat<double>> jac;        // step Jacobian of event k
  std::vector<SMat<double>> K, Kbar, C; // indexed like x
  std::vector<SVec<double>> A;
  std::vector<GammaTableRow> table;

  const SVec<double>& terminal() const { return x.back(); }
  /// K C K^T after event k (k = -1: terminal)
  SMat<double> gamma_at(long k = -1) const;
  /// Kbar just after jump i
  const SMat<double>& kbar_after_jump(std::size_t i) const { return Kbar[jump_event[i] + 1]; }
  /// d X_T / d v_i = K_T Kbar(s_i) d_v c_i   (d x p)
  SMat<double> mark_gradient(std::size_t i) const;
};

/// Level 0: state path only.
Trajectory solve(const Scenario& sc, const MarkedPoissonPath& path);

/// First variation and inverse flow from the logged step Jacobians. A jump
/// with |det(I + D_x c)| < 1e-12 fails the invertibility hypothesis.
void flow(Trajectory& traj);

/// Generator path A; needs C (see accumulate_malliavin) and second-order jump data.
void generator_path(const Scenario& sc, Trajectory& traj);

/// Pairwise table Gamma[X_j, Gamma_kl] by directional passes over the marks.
void gamma_table(const Scenario& sc, Trajectory& traj);

/// The augmented system (X, K, Kbar, C [, A, table]) solved in one sweep.
class JetSystem {
 public:
  JetSystem(const Scenario& sc, int order);
  int order() const { return order_; }
  /// number of scalar state components carried by the sweep
  int size() const;
  Trajectory solve(const MarkedPoissonPath& path) const;

 private:
  const Scenario* sc_;
  int order_;
};

JetSystem augment_jet(const Scenario& sc, int order);

/// Result of a sweep with Taylor-valued marks v_i + eps * w_i.
struct DirectionalPass {
  SVec<Taylor> x;
  SMat<Taylor> gamma;
  SVec<Taylor> A;
  std::vector<SMat<Taylor>> grad;  // d X_T / d v_i
  std::vector<SVec<Taylor>> xi;    // bottom weights at each jump
};

/// `direction[i]` has one entry per mark coordinate of jump i.
DirectionalPass directional_pass(const Scenario& sc, const Trajectory& traj,
                                 const std::vector<SVec<double>>& direction, int level);

/// time, X..., detK, trC (flow columns empty below level 1)
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace lp
