#include "psar/psar.hpp"

#include <cmath>
#include <stdexcept>

namespace psar {

namespace {

void validate_uses(int n, int n_max) {
  if (n < 1 || n > n_max)
    throw std::invalid_argument("number of uses must lie in [1, " +
                                std::to_string(n_max) + "]");
}

SpaceLayout probe_layout(int n, bool memory_side) {
  std::vector<Factor> fs;
  for (int i = 1; i <= n; ++i)
    fs.push_back({memory_side ? memory_qubit_label(i) : input_qubit_label(i), 2});
  fs.push_back({kAncillaLabel, n + 1});
  return SpaceLayout(std::move(fs));
}

double binomial(int n, int k) {
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}

}  // namespace

std::string memory_qubit_label(int i) { return "B" + std::to_string(i); }
std::string input_qubit_label(int i) { return "A" + std::to_string(i); }

long jbar_index(int n, int j) {
  if (j < 0 || j > n) throw std::invalid_argument("jbar_index: j out of range");
  return (1L << j) - 1;
}

ProbeState probe_state(int n) {
  validate_uses(n, kMaxUses);
  SpaceLayout layout = probe_layout(n, /*memory_side=*/false);
  Vector v = Vector::Zero(layout.total_dim());
  const double amp = 1.0 / std::sqrt(static_cast<double>(n + 1));
  for (int j = 0; j <= n; ++j)
    v(jbar_index(n, j) * (n + 1) + j) = amp;
  return {n, std::move(v), std::move(layout)};
}

MemoryState store_with_channels(int n,
                                const std::vector<KrausChannel>& uses) {
  validate_uses(n, kMaxUses);
  if (static_cast<int>(uses.size()) != n)
    throw std::invalid_argument("store_with_channels: need one channel per use");
  const ProbeState probe = probe_state(n);
  LabeledOperator rho{Matrix(probe.vector * probe.vector.adjoint()),
                      probe.layout};
  for (int i = 1; i <= n; ++i)
    rho = apply_kraus(uses[static_cast<std::size_t>(i - 1)], rho,
                      input_qubit_label(i));
  for (int i = 1; i <= n; ++i)
    rho = relabel(rho, input_qubit_label(i), memory_qubit_label(i));
  return {n, std::move(rho)};
}

MemoryState store(int n, const NoiseModel& noise, PhaseAngle phi) {
  return store_with_channels(
      n, std::vector<KrausChannel>(static_cast<std::size_t>(n),
                                   noisy_phase_gate(noise, phi)));
}

MemoryState store_via_choi(int n, const NoiseModel& noise, PhaseAngle phi) {
  validate_uses(n, kMaxUsesChoiRoute);
  const KrausChannel ch = noisy_phase_gate(noise, phi);
  LabeledOperator total =
      kraus_to_choi(ch, memory_qubit_label(1), input_qubit_label(1));
  for (int i = 2; i <= n; ++i)
    total = kron(total,
                 kraus_to_choi(ch, memory_qubit_label(i), input_qubit_label(i)));
  const ProbeState probe = probe_state(n);
  LabeledOperator psi{Matrix(probe.vector * probe.vector.adjoint()),
                      probe.layout};
  LabeledOperator mem = link_product(total, psi);

  std::vector<std::string> order;
  for (int i = 1; i <= n; ++i) order.push_back(memory_qubit_label(i));
  order.push_back(kAncillaLabel);
  return {n, permute(mem, order)};
}

RetrievalOperator retrieval_operator(int n) {
  validate_uses(n, kMaxUses);
  SpaceLayout layout = probe_layout(n, /*memory_side=*/true);
  std::vector<Factor> fs = layout.factors();
  fs.push_back({kRetrievalInLabel, 2});
  fs.push_back({kRetrievalOutLabel, 2});
  SpaceLayout full(std::move(fs));

  // Flat index of |j-bar>_B |j>_A' within M.
  auto m_index = [&](int j) { return jbar_index(n, j) * (n + 1) + j; };

  const long dim = full.total_dim();
  Matrix rs = Matrix::Zero(dim, dim);
  for (int J = 0; J < n; ++J)
    for (int k = 0; k <= 1; ++k)
      for (int kp = 0; kp <= 1; ++kp) {
        const long row = (m_index(J + k) * 2 + k) * 2 + k;
        const long col = (m_index(J + kp) * 2 + kp) * 2 + kp;
        rs(row, col) += 1.0;
      }
  return {n, LabeledOperator{std::move(rs), std::move(full)}};
}

LabeledOperator retrieve(const RetrievalOperator& rs, const MemoryState& mem) {
  if (rs.n_uses != mem.n_uses)
    throw std::invalid_argument("retrieve: mismatched number of uses");
  return link_product(rs.op, mem.rho);
}

RetrievedDecomposition decompose_retrieved(const LabeledOperator& choi) {
  if (choi.matrix.rows() != 4 || choi.matrix.cols() != 4)
    throw std::invalid_argument("decompose_retrieved: expected a 4x4 operator");
  RetrievedDecomposition d;
  const double tr = choi.matrix.trace().real();
  d.p_success = tr / 2.0;

  const Complex corner = choi.matrix(0, 3);
  const double alpha = std::abs(corner);
  const double beta = choi.matrix(0, 0).real() - alpha;
  d.phase = -std::arg(corner);
  if (tr > 0.0) {
    d.unitary_weight = 2.0 * alpha / tr;
    d.dephasing_weight = 2.0 * beta / tr;
  } else {
    d.unitary_weight = 0.0;
    d.dephasing_weight = 1.0;
  }

  Matrix rec = alpha * phase_gate_choi_matrix({d.phase}) +
               beta * dephasing_choi_matrix();
  d.residual_norm = max_abs_diff(choi.matrix, rec);
  if (d.residual_norm > kModelFamilyTol)
    throw OutOfModelFamilyError(
        "retrieved operator is not a phase-gate/dephasing mixture (residual " +
            std::to_string(d.residual_norm) + ")",
        d.residual_norm);
  return d;
}

ClosedForm depolarizing_closed_form(int n, double q) {
  if (n < 1) throw std::invalid_argument("depolarizing_closed_form: n must be >= 1");
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("depolarizing_closed_form: q must lie in [0,1]");
  const double p = static_cast<double>(n) / (n + 1) *
                   std::pow((1.0 + q) / 2.0, n);
  return {p, 2.0 * q / (1.0 + q)};
}

ClosedForm dephasing_closed_form(int n, double q) {
  if (n < 1) throw std::invalid_argument("dephasing_closed_form: n must be >= 1");
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("dephasing_closed_form: q must lie in [0,1]");
  return {static_cast<double>(n) / (n + 1), q};
}

BinomialCoefficients binomial_expansion_check(int n, double q) {
  if (n < 1)
    throw std::invalid_argument("binomial_expansion_check: n must be >= 1");
  BinomialCoefficients out;
  for (int k = 0; k <= n; ++k) {
    const double w = binomial(n, k) * std::pow(q, n - k) *
                     std::pow(1.0 - q, k) / std::pow(2.0, k);
    out.unitary_coeff += w * (n - k);
    out.dephasing_coeff += w * k;
  }
  out.unitary_coeff /= n + 1;
  out.dephasing_coeff /= n + 1;
  return out;
}

}  // namespace psar
