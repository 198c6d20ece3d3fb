#pragma once

#include <iosfwd>
#include <vector>

#include "fda/types.hpp"

namespace fda {

/// Hermitian SDP in trace form: maximize Tr{C X} over X ⪰ 0 subject to
/// Tr{A_i X} = b_i, Tr{G_j X} ≤ h_j, Tr{F_k X} ≥ g_k. At least one equality
/// or ≤ constraint must bound Tr{X}.
struct SdpConstraint {
  CMat matrix;
  double value = 0.0;
};

struct SdpProblem {
  CMat objective;
  std::vector<SdpConstraint> eq;
  std::vector<SdpConstraint> le;
  std::vector<SdpConstraint> ge;
  int dim() const { return static_cast<int>(objective.rows()); }
};

enum class SdpStatus { optimal, infeasible, max_iter };

struct SdpSolution {
  CMat x_opt;
  double objective_value = 0.0;
  double duality_gap = 0.0;       // |primal − dual|, original scaling
  SdpStatus status = SdpStatus::max_iter;
  double max_eq_residual = 0.0;   // post-unscaling
  double max_ineq_violation = 0.0;
  int iterations = 0;
};

/// Infeasible-start Mehrotra predictor-corrector with HKM directions.
/// Complex Hermitian data is solved through the real symmetric embedding
/// [[Re, −Im], [Im, Re]]; traces double under the embedding, so right-hand
/// sides are doubled internally and the objective halved on the way out.
/// Constraints are normalized so max(‖A_i‖_F, |b_i|) = 1 before solving;
/// reported residuals are post-unscaling. Deterministic: identical problems
/// and tolerances yield identical solutions bit-for-bit.
SdpSolution solve(const SdpProblem& problem, double tol = 1e-7, int max_iter = 100);

/// Order-2n symmetric embedding of a Hermitian matrix; PSD preserved both
/// ways, Tr{A X} = ½ Tr{A_emb X_emb}. Throws on non-Hermitian input.
Mat hermitian_to_real_embedding(const CMat& h);
CMat real_embedding_to_hermitian(const Mat& e);

/// Dense re/im text dump for cross-checking against external solvers.
void dump_problem(const SdpProblem& problem, std::ostream& os);

}  // namespace fda
