#include "psar/realizations.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <functional>
#include <stdexcept>

namespace psar {

namespace {

using Matrix2 = Eigen::Matrix2cd;
using Matrix4 = Eigen::Matrix4cd;

const SpaceLayout kQubitChoiLayout{{"out", 2}, {"in", 2}};

// Superoperators act on row-major vectorized qubit operators:
// vec(rho)[2m + m'] = rho(m, m').
Matrix4 superop_of(const std::function<Matrix2(const Matrix2&)>& map) {
  Matrix4 s;
  for (int n = 0; n < 2; ++n)
    for (int np = 0; np < 2; ++np) {
      Matrix2 basis = Matrix2::Zero();
      basis(n, np) = 1.0;
      const Matrix2 image = map(basis);
      for (int m = 0; m < 2; ++m)
        for (int mp = 0; mp < 2; ++mp)
          s(2 * m + mp, 2 * n + np) = image(m, mp);
    }
  return s;
}

Matrix4 choi_of_superop(const Matrix4& s) {
  Matrix4 choi;
  for (int m = 0; m < 2; ++m)
    for (int mp = 0; mp < 2; ++mp)
      for (int n = 0; n < 2; ++n)
        for (int np = 0; np < 2; ++np)
          choi(2 * m + n, 2 * mp + np) = s(2 * m + mp, 2 * n + np);
  return choi;
}

Matrix2 apply_superop(const Matrix4& s, const Matrix2& rho) {
  Eigen::Vector4cd v;
  v << rho(0, 0), rho(0, 1), rho(1, 0), rho(1, 1);
  const Eigen::Vector4cd w = s * v;
  Matrix2 out;
  out << w(0), w(1), w(2), w(3);
  return out;
}

Matrix4 kraus_superop(const KrausChannel& ch) {
  return superop_of([&](const Matrix2& rho) {
    Matrix2 acc = Matrix2::Zero();
    for (const auto& k : ch.kraus) acc += k * rho * k.adjoint();
    return acc;
  });
}

double branch_probability(const Matrix4& choi) {
  return choi.trace().real() / 2.0;
}

RetrievedDecomposition decompose_qubit_choi(const Matrix4& choi) {
  return decompose_retrieved(LabeledOperator{choi, kQubitChoiLayout});
}

}  // namespace

std::vector<VmcRound> vmc_run(const NoiseModel& noise, PhaseAngle phi,
                              int k_max) {
  if (k_max < 1 || (1L << k_max) - 1 > kMaxUses)
    throw std::invalid_argument("vmc_run: k_max out of range");

  const Matrix4 gate = kraus_superop(noisy_phase_gate(noise, phi));

  // CNOT with control on the data qubit, target on the memory qubit.
  Eigen::Matrix4cd cnot = Eigen::Matrix4cd::Zero();
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;

  std::vector<VmcRound> rounds;
  Matrix4 fail_so_far = Matrix4::Identity();  // unconditional CP map
  double reach = 1.0;  // unconditional probability of entering the round
  double cumulative = 0.0;
  long total_uses = 0;

  for (int k = 1; k <= k_max; ++k) {
    const long uses = 1L << (k - 1);
    total_uses += uses;

    Matrix2 memory;
    memory << 0.5, 0.5, 0.5, 0.5;  // |+><+|
    for (long u = 0; u < uses; ++u) memory = apply_superop(gate, memory);

    // Measurement branch maps of one CNOT round, as superoperators on the
    // data qubit.
    auto round_branch = [&](int outcome) {
      return superop_of([&](const Matrix2& xi) {
        const Matrix4 joint =
            cnot * Eigen::kroneckerProduct(xi, memory).eval() * cnot.adjoint();
        Matrix2 out;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            out(a, b) = joint(2 * a + outcome, 2 * b + outcome);
        return out;
      });
    };

    const Matrix4 success_uncond = round_branch(0) * fail_so_far;
    const Matrix4 failure_uncond = round_branch(1) * fail_so_far;

    VmcRound round;
    round.round_index = k;
    round.uses_this_round = uses;
    round.cumulative_uses = total_uses;

    const Matrix4 success_choi_raw = choi_of_superop(success_uncond);
    const Matrix4 failure_choi_raw = choi_of_superop(failure_uncond);
    round.success_probability = branch_probability(success_choi_raw);
    round.conditional_success_probability = round.success_probability / reach;
    cumulative += round.success_probability;
    round.cumulative_success = cumulative;

    const Matrix4 success_choi = success_choi_raw / round.success_probability;
    const double p_fail = branch_probability(failure_choi_raw);
    const Matrix4 failure_choi = failure_choi_raw / p_fail;
    round.success_choi = LabeledOperator{success_choi, kQubitChoiLayout};
    round.failure_choi = LabeledOperator{failure_choi, kQubitChoiLayout};
    round.success_channel = decompose_qubit_choi(success_choi);
    round.failure_channel = decompose_qubit_choi(failure_choi);
    rounds.push_back(std::move(round));

    fail_so_far = failure_uncond;
    reach = p_fail;
  }
  return rounds;
}

Vector vq_probe(int n) {
  if (n < 1 || n > kMaxUses)
    throw std::invalid_argument("vq_probe: n out of range");
  Vector v = Vector::Zero(1L << n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n + 1));
  for (int j = 0; j <= n; ++j) v(jbar_index(n, j)) = amp;
  return v;
}

Matrix conditional_shift(int n) {
  if (n < 1 || n > kMaxUses)
    throw std::invalid_argument("conditional_shift: n out of range");
  const long mem_dim = 1L << n;
  const long dim = 2 * mem_dim;
  Matrix u = Matrix::Zero(dim, dim);
  // Control |0>: identity.
  for (long t = 0; t < mem_dim; ++t) u(t, t) = 1.0;
  // Control |1>: cyclic shift-down on the virtual qudit, identity outside.
  std::vector<bool> on_span(static_cast<std::size_t>(mem_dim), false);
  for (int j = 0; j <= n; ++j) {
    const long from = jbar_index(n, j);
    const long to = jbar_index(n, (j - 1 + n + 1) % (n + 1));
    on_span[static_cast<std::size_t>(from)] = true;
    u(mem_dim + to, mem_dim + from) = 1.0;
  }
  for (long t = 0; t < mem_dim; ++t)
    if (!on_span[static_cast<std::size_t>(t)])
      u(mem_dim + t, mem_dim + t) = 1.0;
  return u;
}

std::vector<VqOutcome> vq_run(const NoiseModel& noise, PhaseAngle phi,
                              int n) {
  if (n < 1 || n > kMaxUses)
    throw std::invalid_argument("vq_run: n out of range");
  const long mem_dim = 1L << n;

  // Memory after storing: noisy gate on every qubit of |Omega><Omega|.
  std::vector<Factor> fs;
  for (int i = 1; i <= n; ++i) fs.push_back({"Q" + std::to_string(i), 2});
  const Vector omega = vq_probe(n);
  LabeledOperator mem{Matrix(omega * omega.adjoint()), SpaceLayout(fs)};
  const KrausChannel gate = noisy_phase_gate(noise, phi);
  for (int i = 1; i <= n; ++i)
    mem = apply_kraus(gate, mem, "Q" + std::to_string(i));

  const Matrix shift = conditional_shift(n);

  // Propagate the data-qubit operator basis through the joint evolution
  // (data qubit is the first factor).
  std::vector<Matrix> shifted;  // indexed 2i + j for basis |i><j|
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Matrix2 basis = Matrix2::Zero();
      basis(i, j) = 1.0;
      Matrix joint = Eigen::kroneckerProduct(basis, mem.matrix);
      shifted.push_back(shift * joint * shift.adjoint());
    }

  // Memory projectors: success block, fail state, complement basis states.
  std::vector<bool> on_span(static_cast<std::size_t>(mem_dim), false);
  for (int j = 0; j <= n; ++j)
    on_span[static_cast<std::size_t>(jbar_index(n, j))] = true;

  struct Projector {
    VqOutcome::Kind kind;
    long complement_index;
    std::vector<long> support;
  };
  std::vector<Projector> projectors;
  {
    Projector success{VqOutcome::Kind::SuccessBlock, -1, {}};
    for (int j = 0; j < n; ++j) success.support.push_back(jbar_index(n, j));
    projectors.push_back(std::move(success));
    projectors.push_back({VqOutcome::Kind::Fail, -1, {jbar_index(n, n)}});
    for (long t = 0; t < mem_dim; ++t)
      if (!on_span[static_cast<std::size_t>(t)])
        projectors.push_back({VqOutcome::Kind::Complement, t, {t}});
  }

  std::vector<VqOutcome> outcomes;
  for (const auto& proj : projectors) {
    Matrix4 choi = Matrix4::Zero();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const Matrix& joint = shifted[static_cast<std::size_t>(2 * i + j)];
        Matrix2 branch = Matrix2::Zero();
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (long t : proj.support)
              branch(a, b) += joint(a * mem_dim + t, b * mem_dim + t);
        // Choi[(m,n),(m',n')] = branch map applied to |n><n'|.
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) choi(2 * a + i, 2 * b + j) = branch(a, b);
      }
    VqOutcome outcome;
    outcome.kind = proj.kind;
    outcome.complement_index = proj.complement_index;
    outcome.probability = branch_probability(choi);
    outcome.choi = LabeledOperator{choi, kQubitChoiLayout};
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

std::pair<double, double> vq_dephasing_closed_form(int n, double q) {
  if (n < 1)
    throw std::invalid_argument("vq_dephasing_closed_form: n must be >= 1");
  // The success projector spans |0-bar>..|(n-1)-bar|; each of its blocks
  // draws on one coherence |j-bar><(j+1)-bar| of the memory, damped by a
  // single factor q, so the success channel is q U + (1-q) diag regardless
  // of n. The failure block |n-bar><n-bar| draws on the wrap-around
  // coherence |n-bar><0-bar|, damped n times.
  return {static_cast<double>(n) / (n + 1), std::pow(q, n)};
}

}  // namespace psar
