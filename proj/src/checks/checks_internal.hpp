#pragma once

#include "arcs/checks.hpp"

namespace arcs::checks {

CheckResult compact_representation(const CheckOptions& opts);
CheckResult eigendecomposition_fidelity(const CheckOptions& opts);
CheckResult subproblem_optimality(const CheckOptions& opts);
CheckResult holder_sandwich(const CheckOptions& opts);
CheckResult sr1_curvature_recovery(const CheckOptions& opts);
CheckResult lemma1_bound(const CheckOptions& opts);
CheckResult deterministic_convergence(const CheckOptions& opts);
CheckResult iris_experiment(const CheckOptions& opts);
CheckResult autoencoder_experiment(const CheckOptions& opts);
CheckResult batch_growth(const CheckOptions& opts);
CheckResult gradient_conformance(const CheckOptions& opts);
CheckResult complexity_scaling(const CheckOptions& opts);
CheckResult cli_determinism(const CheckOptions& opts);

}  // namespace arcs::checks
