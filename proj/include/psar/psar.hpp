#pragma once

#include "psar/channel.hpp"
#include "psar/comb.hpp"
#include "psar/tensor_core.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace psar {

/// Largest number of gate uses handled by the compressed-ancilla path.
inline constexpr int kMaxUses = 10;
/// Largest number of uses for which the explicit Choi-of-N-uses
/// cross-check route is built (4^N-dimensional operators).
inline constexpr int kMaxUsesChoiRoute = 4;

/// Reconstruction residual above which a retrieved operator is rejected
/// as not being a U_phi / dephasing mixture.
inline constexpr double kModelFamilyTol = 1e-6;

/// Memory-register qubit label for use i (1-based).
std::string memory_qubit_label(int i);
/// Input-register qubit label for use i (1-based).
std::string input_qubit_label(int i);
inline const std::string kAncillaLabel = "Ap";
inline const std::string kRetrievalInLabel = "C";
inline const std::string kRetrievalOutLabel = "D";

/// Basis index of |j-bar> = |0^(n-j)> (x) |1^j> within n qubits.
long jbar_index(int n, int j);

/// The optimal probe: (1/sqrt(N+1)) sum_j |j-bar>_A |j>_A' with the
/// ancilla stored in the compressed (N+1)-dimensional basis.
struct ProbeState {
  int n_uses = 0;
  Vector vector;       // on A1..An (x) Ap
  SpaceLayout layout;  // [A1..An, Ap]
};

ProbeState probe_state(int n);

/// Post-storage state on B (x) A', dimension 2^N (N+1).
struct MemoryState {
  int n_uses = 0;
  LabeledOperator rho;  // labels B1..Bn, Ap
};

/// Store N uses of the noisy phase gate into the probe: the channel acts
/// independently on each qubit of the A register, the ancilla is untouched.
MemoryState store(int n, const NoiseModel& noise, PhaseAngle phi);

/// Storage with an explicit channel per use; the branch-expansion oracle
/// behind store().
MemoryState store_with_channels(int n, const std::vector<KrausChannel>& uses);

/// Independent storage route: builds the Choi operator of the N-fold
/// product channel explicitly and links it with the probe. Limited to
/// n <= kMaxUsesChoiRoute.
MemoryState store_via_choi(int n, const NoiseModel& noise, PhaseAngle phi);

/// The retrieval operator R_s on M (x) C (x) D, supported on the span of
/// |j-bar>_B |j>_A' and extended by zero on its orthogonal complement.
struct RetrievalOperator {
  int n_uses = 0;
  LabeledOperator op;  // labels B1..Bn, Ap, C, D
};

RetrievalOperator retrieval_operator(int n);

/// R_s linked with the memory: the retrieved 4x4 Choi operator on C (x) D.
/// Its trace divided by two is the success probability.
LabeledOperator retrieve(const RetrievalOperator& rs, const MemoryState& mem);

/// Weights of a retrieved operator written as
/// p * (a |U_phi>><<U_phi| + b P), extracted from the (00)/(11) corner
/// entries and validated by full reconstruction.
struct RetrievedDecomposition {
  double p_success = 0.0;
  double unitary_weight = 0.0;
  double dephasing_weight = 0.0;
  double phase = 0.0;
  double residual_norm = 0.0;
};

/// Thrown when the reconstruction residual exceeds kModelFamilyTol.
class OutOfModelFamilyError : public std::runtime_error {
 public:
  OutOfModelFamilyError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

RetrievedDecomposition decompose_retrieved(const LabeledOperator& choi);

struct ClosedForm {
  double p_success = 0.0;
  double q_prime = 0.0;
};

/// Depolarizing noise: p = (n/(n+1)) ((1+q)/2)^n, q' = 2q/(1+q).
ClosedForm depolarizing_closed_form(int n, double q);

/// Dephasing noise: p = n/(n+1), q' = q.
ClosedForm dephasing_closed_form(int n, double q);

struct BinomialCoefficients {
  double unitary_coeff = 0.0;
  double dephasing_coeff = 0.0;
};

/// The two binomial sums governing the depolarizing retrieval: the
/// coefficients of |U_phi>><<U_phi| and of |00><00| + |11><11| in the
/// retrieved operator, each divided by (n+1).
BinomialCoefficients binomial_expansion_check(int n, double q);

}  // namespace psar
