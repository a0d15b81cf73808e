#pragma once

#include "psar/tensor_core.hpp"

#include <string>
#include <vector>

namespace psar {

/// Trace-preserving channel in Kraus form.
struct KrausChannel {
  std::vector<Matrix> kraus;
  int dim_in = 0;
  int dim_out = 0;

  KrausChannel() = default;
  KrausChannel(std::vector<Matrix> ops, int dim_in, int dim_out);

  /// Max-entry deviation of sum_k K_k^dag K_k from the identity.
  double trace_preservation_defect() const;
};

enum class NoiseKind { Depolarizing, Dephasing };

/// Convex admixture parameter q in [0,1]: q = 1 is the noiseless gate,
/// q = 0 is pure noise.
struct NoiseModel {
  NoiseKind kind;
  double q;

  NoiseModel(NoiseKind kind, double q);
};

std::string to_string(NoiseKind kind);

struct PhaseAngle {
  double radians = 0.0;
};

/// diag(1, e^{i phi}).
Eigen::Matrix2cd phase_gate_unitary(PhaseAngle phi);

/// Channel with the single Kraus operator u (u need not be square).
KrausChannel unitary_channel(const Matrix& u);

/// The noisy phase gate: q * U_phi + (1-q) * noise, with the depolarizing
/// branch realized by the Pauli twirl and the dephasing branch by
/// {I, sigma_z}/sqrt(2). Kraus set is the union of the sqrt-weight scaled
/// branch sets; zero-weight branches are dropped.
KrausChannel noisy_phase_gate(const NoiseModel& noise, PhaseAngle phi);

/// Choi operator sum_k |K_k>><<K_k| on [out_label, in_label], using the
/// row-major double-ket convention |A>> = sum_mn A_mn |m>|n>.
LabeledOperator kraus_to_choi(const KrausChannel& ch,
                              const std::string& out_label = "out",
                              const std::string& in_label = "in");

/// Apply a channel to one factor of a density operator.
LabeledOperator apply_kraus(const KrausChannel& ch,
                            const LabeledOperator& state,
                            const std::string& target);

/// Apply a channel given as a two-factor Choi operator on [out, in] to one
/// factor of a density operator. Implemented by direct index contraction;
/// serves as an independent oracle for apply_kraus.
LabeledOperator apply_choi(const LabeledOperator& choi,
                           const LabeledOperator& state,
                           const std::string& target);

/// Choi matrix |U_phi>><<U_phi| of the phase gate (4x4, raw matrix).
Matrix phase_gate_choi_matrix(PhaseAngle phi);

/// Choi matrix |00><00| + |11><11| of the completely dephasing channel.
Matrix dephasing_choi_matrix();

}  // namespace psar
