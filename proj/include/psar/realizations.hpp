#pragma once

#include "psar/channel.hpp"
#include "psar/psar.hpp"
#include "psar/tensor_core.hpp"

#include <utility>
#include <vector>

namespace psar {

/// One correction round of the CNOT-feedback realization. Round k uses
/// 2^(k-1) gate applications on the state left after the previous failure;
/// probabilities are reported both unconditionally and conditioned on
/// reaching the round.
struct VmcRound {
  int round_index = 0;
  long uses_this_round = 0;
  long cumulative_uses = 0;
  double success_probability = 0.0;              // unconditional, 2^-k
  double conditional_success_probability = 0.0;  // given all prior failures
  double cumulative_success = 0.0;               // 1 - 2^-k
  RetrievedDecomposition success_channel;
  RetrievedDecomposition failure_channel;
  LabeledOperator success_choi;  // normalized, on [out, in]
  LabeledOperator failure_choi;  // normalized, on [out, in]
};

/// Simulates k_max rounds of the CNOT-feedback scheme at process level:
/// each round stores the noisy gate into |+>, applies CNOT with the data
/// qubit as control and measures the memory. Channels are propagated as CP
/// maps, not for a fixed input state. Requires 2^k_max - 1 <= kMaxUses.
std::vector<VmcRound> vmc_run(const NoiseModel& noise, PhaseAngle phi,
                              int k_max);

/// Ancilla-free probe |Omega> = (1/sqrt(N+1)) sum_j |j-bar> on N qubits.
Vector vq_probe(int n);

/// Controlled shift-down on the virtual qudit: |c>|t-bar> ->
/// |c>|(t - c mod N+1)-bar| on the span of the |j-bar>, identity on its
/// orthogonal complement. Unitary on qubit (x) N qubits (control first).
Matrix conditional_shift(int n);

/// One measurement outcome of the virtual-qudit retrieval.
struct VqOutcome {
  enum class Kind { SuccessBlock, Fail, Complement };
  Kind kind = Kind::SuccessBlock;
  /// Computational basis index of the memory projector for Complement
  /// outcomes; -1 otherwise.
  long complement_index = -1;
  /// Outcome probability for the maximally mixed input, Tr(choi)/2. For
  /// the aggregated outcomes of this protocol the probability is input
  /// independent; per-input probabilities follow from the raw Choi.
  double probability = 0.0;
  /// Unnormalized Choi operator of the conditional branch on [out, in];
  /// its trace equals twice the branch probability.
  LabeledOperator choi;
};

/// Simulates the virtual-qudit scheme at process level: noisy gates on
/// every qubit of |Omega>, conditional shift with the data qubit as
/// control, projective memory measurement with the success block
/// Pi_{0..N-1}, the failure projector |N-bar><N-bar| and one projector per
/// complement basis state.
std::vector<VqOutcome> vq_run(const NoiseModel& noise, PhaseAngle phi, int n);

/// Dephasing closed form: success probability n/(n+1) and failure-branch
/// unitary weight q^n. The success branch consumes only nearest-neighbor
/// coherences of the virtual qudit, so its unitary weight is q for every n;
/// the failure branch consumes the wrap-around coherence damped n times and
/// carries the inverse phase -n*phi.
std::pair<double, double> vq_dephasing_closed_form(int n, double q);

}  // namespace psar
