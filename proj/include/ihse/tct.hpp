#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "ihse/collision.hpp"
#include "ihse/core.hpp"
#include "ihse/scattering.hpp"

namespace ihse {

/// Numerical slack shared by the single-collision flow and the simulator.
struct Tolerances {
  double contact_tol = kDefaultContactTol;
  double grazing_tol = kDefaultGrazingTol;
  double simultaneity_tol = kDefaultSimultaneityTol;
  double crit_tol = kDefaultCritTol;
};

enum class ExclusionReason { Grazing, Simultaneous, CriticalEnergy, Recollision, BoundaryStart };

std::string_view to_string(ExclusionReason reason);

struct FreeFlight {};

struct SingleCollision {
  PairIndex pair;
  double t_c = 0.0;
  CollisionKind kind = CollisionKind::Elastic;
};

struct Excluded {
  ExclusionReason reason = ExclusionReason::Grazing;
  std::optional<PairIndex> pair;  // offending pair when there is one
  double time = 0.0;              // when the offending contact happens
};

using TctDomainClass = std::variant<FreeFlight, SingleCollision, Excluded>;

/// Same variant and, for collisions, the same pair and law. Finite-difference
/// stencils must stay on one branch.
bool same_branch(const TctDomainClass& a, const TctDomainClass& b);

struct CollisionRecord {
  PairIndex pair;
  double t_c = 0.0;
  ScatteringOutcome outcome;
};

struct TctResult {
  Configuration final;
  TctDomainClass classification;
  std::optional<CollisionRecord> collision;
};

/// Places cfg in the free domain (no contact in (0, tau]), the single-collision
/// domain of one pair, or reports the first failed admissibility condition:
/// non-interior start, grazing contact, a second colliding pair, the critical
/// energy band, or any contact after the scattering.
TctDomainClass classify_tct_domain(const Configuration& cfg, double tau, const ModelParams& params,
                                   const Tolerances& tol = {});

/// Transport-collision-transport map on [0, tau]. Throws
/// Error(ExcludedConfiguration) outside the free and single-collision domains.
TctResult tct_flow(const Configuration& cfg, double tau, const ModelParams& params,
                   const Tolerances& tol = {});

struct FlowJacobianDet {
  double det = 1.0;
  double prefactor = 1.0;  // 1 + grad_X t_c . (V - V'), from the analytic gradients
  double det_n = 1.0;      // determinant of the velocity-block scattering Jacobian
};

/// Analytic determinant of the flow Jacobian: 1 on the free domain, and the
/// product prefactor * det_n for one collision. Throws Error(Unsupported) for
/// an emission collision when d != 2 and Error(ExcludedConfiguration) outside
/// the domain.
FlowJacobianDet analytic_flow_jacobian_det(const Configuration& cfg, double tau,
                                           const ModelParams& params, const Tolerances& tol = {});

}  // namespace ihse
