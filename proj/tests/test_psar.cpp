#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "psar/psar.hpp"

#include "test_util.hpp"

#include <cmath>
#include <numbers>

using namespace psar;

namespace {

constexpr double kPi = std::numbers::pi;

// Diagonal-projector Choi of the completely dephasing qubit channel.
Matrix dephasing_choi() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 1.0;
  return m;
}

Matrix diag_corners() { return dephasing_choi(); }

// Flat basis index of |j-bar>_B |j>_A' in the 2^n (n+1) memory space.
long memory_index(int n, int j) { return jbar_index(n, j) * (n + 1) + j; }

}  // namespace

TEST_CASE("probe state small cases") {
  const ProbeState one = probe_state(1);
  Vector expected1 = Vector::Zero(4);
  expected1(0) = expected1(3) = 1.0 / std::sqrt(2.0);
  CHECK((one.vector - expected1).cwiseAbs().maxCoeff() < 1e-15);

  const ProbeState two = probe_state(2);
  Vector expected2 = Vector::Zero(12);
  expected2(memory_index(2, 0)) = 1.0 / std::sqrt(3.0);
  expected2(memory_index(2, 1)) = 1.0 / std::sqrt(3.0);
  expected2(memory_index(2, 2)) = 1.0 / std::sqrt(3.0);
  CHECK((two.vector - expected2).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("probe state is normalized for n=1..8") {
  for (int n = 1; n <= 8; ++n)
    CHECK(std::abs(probe_state(n).vector.norm() - 1.0) < 1e-12);
}

TEST_CASE("probe state rejects out-of-range n") {
  CHECK_THROWS_AS(probe_state(0), std::invalid_argument);
  CHECK_THROWS_AS(probe_state(kMaxUses + 1), std::invalid_argument);
}

TEST_CASE("noiseless storage for two uses") {
  const double phi = 0.9;
  const MemoryState mem =
      store(2, NoiseModel(NoiseKind::Depolarizing, 1.0), {phi});
  Matrix expected = Matrix::Zero(12, 12);
  for (int j = 0; j <= 2; ++j)
    for (int k = 0; k <= 2; ++k)
      expected(memory_index(2, j), memory_index(2, k)) =
          std::exp(Complex(0, (j - k) * phi)) / 3.0;
  CHECK(max_abs_diff(mem.rho.matrix, expected) < 1e-12);
}

TEST_CASE("fully depolarized storage for two uses") {
  const MemoryState mem =
      store(2, NoiseModel(NoiseKind::Depolarizing, 0.0), {0.4});
  CHECK(max_abs_diff(mem.rho.matrix,
                     Matrix(Matrix::Identity(12, 12) / 12.0)) < 1e-12);
}

TEST_CASE("fully dephased storage for two uses") {
  const MemoryState mem =
      store(2, NoiseModel(NoiseKind::Dephasing, 0.0), {0.4});
  Matrix expected = Matrix::Zero(12, 12);
  for (int j = 0; j <= 2; ++j)
    expected(memory_index(2, j), memory_index(2, j)) = 1.0 / 3.0;
  CHECK(max_abs_diff(mem.rho.matrix, expected) < 1e-12);
}

TEST_CASE("stored memory is a density operator") {
  for (auto kind : {NoiseKind::Depolarizing, NoiseKind::Dephasing}) {
    const MemoryState mem = store(3, NoiseModel(kind, 0.35), {1.2});
    CHECK(std::abs(mem.rho.trace().real() - 1.0) < 1e-10);
    CHECK(min_eigenvalue(mem.rho) >= -kPsdTol);
  }
}

TEST_CASE("storage via explicit Choi route matches per-qubit application") {
  for (int n = 1; n <= kMaxUsesChoiRoute; ++n) {
    for (auto kind : {NoiseKind::Depolarizing, NoiseKind::Dephasing}) {
      const NoiseModel noise(kind, 0.45);
      const PhaseAngle phi{0.7};
      const MemoryState direct = store(n, noise, phi);
      const MemoryState via_choi = store_via_choi(n, noise, phi);
      CHECK(max_abs_diff(direct.rho.matrix, via_choi.rho.matrix) <= 1e-11);
    }
  }
}

TEST_CASE("storage expands multilinearly over per-use branches") {
  const double q = 0.35;
  const PhaseAngle phi{1.1};
  const KrausChannel gate = noisy_phase_gate(
      NoiseModel(NoiseKind::Depolarizing, 1.0), phi);
  const KrausChannel noise = noisy_phase_gate(
      NoiseModel(NoiseKind::Depolarizing, 0.0), phi);

  Matrix expanded = Matrix::Zero(12, 12);
  for (int b1 = 0; b1 < 2; ++b1) {
    for (int b2 = 0; b2 < 2; ++b2) {
      const double weight = (b1 ? (1 - q) : q) * (b2 ? (1 - q) : q);
      const MemoryState branch =
          store_with_channels(2, {b1 ? noise : gate, b2 ? noise : gate});
      expanded += weight * branch.rho.matrix;
    }
  }
  const MemoryState mixed = store(2, NoiseModel(NoiseKind::Depolarizing, q),
                                  phi);
  CHECK(max_abs_diff(mixed.rho.matrix, expanded) <= 1e-10);
}

TEST_CASE("retrieval operator for one use matches the explicit expansion") {
  const RetrievalOperator rs = retrieval_operator(1);
  // M = B (x) A' is 4-dimensional; C, D qubits. Support on |00>_M, |11>_M.
  Matrix expected = Matrix::Zero(16, 16);
  auto row = [](long m, long c, long d) { return (m * 2 + c) * 2 + d; };
  expected(row(0, 0, 0), row(0, 0, 0)) = 1;
  expected(row(0, 0, 0), row(3, 1, 1)) = 1;
  expected(row(3, 1, 1), row(0, 0, 0)) = 1;
  expected(row(3, 1, 1), row(3, 1, 1)) = 1;
  CHECK(max_abs_diff(rs.op.matrix, expected) == 0.0);
}

TEST_CASE("retrieval from the fully depolarized memory") {
  const MemoryState mem =
      store(2, NoiseModel(NoiseKind::Depolarizing, 0.0), {0.0});
  const LabeledOperator out = retrieve(retrieval_operator(2), mem);
  CHECK(max_abs_diff(out.matrix, Matrix(diag_corners() / 6.0)) < 1e-12);
}

TEST_CASE("two-use depolarizing retrieval matches the displayed operator") {
  const double phi = 0.8;
  for (double q = 0.0; q <= 1.0; q += 0.2) {
    const MemoryState mem =
        store(2, NoiseModel(NoiseKind::Depolarizing, q), {phi});
    const LabeledOperator out = retrieve(retrieval_operator(2), mem);
    const Matrix expected =
        (2.0 / 3.0) * (q * (1 + q) / 2.0 * phase_gate_choi_matrix({phi}) +
                       (1 - q * q) / 4.0 * diag_corners());
    CHECK(max_abs_diff(out.matrix, expected) < 1e-12);
  }
}

TEST_CASE("two-use dephasing retrieval matches the displayed operator") {
  const double phi = 2.1;
  for (double q = 0.0; q <= 1.0; q += 0.2) {
    const MemoryState mem =
        store(2, NoiseModel(NoiseKind::Dephasing, q), {phi});
    const LabeledOperator out = retrieve(retrieval_operator(2), mem);
    const Matrix expected =
        (2.0 / 3.0) * (q * phase_gate_choi_matrix({phi}) +
                       (1 - q) * dephasing_choi());
    CHECK(max_abs_diff(out.matrix, expected) < 1e-12);
  }
}

TEST_CASE("noiseless retrieval for any n") {
  const double phi = 1.3;
  for (int n = 1; n <= 5; ++n) {
    const MemoryState mem =
        store(n, NoiseModel(NoiseKind::Dephasing, 1.0), {phi});
    const LabeledOperator out = retrieve(retrieval_operator(n), mem);
    const Matrix expected =
        (double(n) / (n + 1)) * phase_gate_choi_matrix({phi});
    CHECK(max_abs_diff(out.matrix, expected) < 1e-11);
  }
}

TEST_CASE("decompose_retrieved on the half-noise depolarizing point") {
  const double phi = kPi / 3;
  const Matrix choi =
      (2.0 / 3.0) * 0.75 * 0.75 *
      ((2.0 / 3.0) * phase_gate_choi_matrix({phi}) +
       (1.0 / 3.0) * dephasing_choi());
  const RetrievedDecomposition d = decompose_retrieved(
      {choi, SpaceLayout{{"out", 2}, {"in", 2}}});
  CHECK(d.p_success == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(d.unitary_weight == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(d.dephasing_weight == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(d.phase == doctest::Approx(kPi / 3).epsilon(1e-12));
  CHECK(d.residual_norm < 1e-12);
}

TEST_CASE("decompose_retrieved trivial cases") {
  const Matrix pure = (2.0 / 3.0) * phase_gate_choi_matrix({0.5});
  const RetrievedDecomposition d = decompose_retrieved(
      {pure, SpaceLayout{{"out", 2}, {"in", 2}}});
  CHECK(d.p_success == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(d.unitary_weight == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.dephasing_weight == doctest::Approx(0.0).epsilon(1e-9));

  const RetrievedDecomposition zero = decompose_retrieved(
      {Matrix::Zero(4, 4), SpaceLayout{{"out", 2}, {"in", 2}}});
  CHECK(zero.p_success == 0.0);
}

TEST_CASE("decompose_retrieved rejects channels outside the model family") {
  // The maximally mixing Choi I/2 is not a phase-gate/dephasing mixture.
  const LabeledOperator off_family{Matrix(Matrix::Identity(4, 4) / 2.0),
                                   SpaceLayout{{"out", 2}, {"in", 2}}};
  CHECK_THROWS_AS(decompose_retrieved(off_family), OutOfModelFamilyError);
  try {
    decompose_retrieved(off_family);
  } catch (const OutOfModelFamilyError& e) {
    CHECK(e.residual() > 0.4);
  }
}

TEST_CASE("closed forms at reference points") {
  ClosedForm t1 = depolarizing_closed_form(2, 1.0);
  CHECK(t1.p_success == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(t1.q_prime == doctest::Approx(1.0).epsilon(1e-15));

  t1 = depolarizing_closed_form(2, 0.5);
  CHECK(t1.p_success == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(t1.q_prime == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  for (int n = 1; n <= 6; ++n) {
    const ClosedForm zero = depolarizing_closed_form(n, 0.0);
    CHECK(zero.p_success ==
          doctest::Approx(double(n) / ((n + 1) * std::pow(2.0, n)))
              .epsilon(1e-14));
    CHECK(zero.q_prime == 0.0);
  }

  const ClosedForm t2 = dephasing_closed_form(7, 0.3);
  CHECK(t2.p_success == doctest::Approx(7.0 / 8.0).epsilon(1e-15));
  CHECK(t2.q_prime == doctest::Approx(0.3).epsilon(1e-15));
  for (double q = 0.0; q <= 1.0; q += 0.25)
    CHECK(dephasing_closed_form(2, q).p_success ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("retrieval sweep agrees with both closed forms") {
  for (int n = 1; n <= 4; ++n) {
    for (double q = 0.0; q <= 1.0001; q += 0.25) {
      for (double phi = 0.0; phi < 2 * kPi; phi += 2 * kPi / 5) {
        const RetrievedDecomposition dep = decompose_retrieved(retrieve(
            retrieval_operator(n),
            store(n, NoiseModel(NoiseKind::Depolarizing, std::min(q, 1.0)),
                  {phi})));
        const ClosedForm t1 = depolarizing_closed_form(n, std::min(q, 1.0));
        CHECK(std::abs(dep.p_success - t1.p_success) < 1e-9);
        CHECK(std::abs(dep.unitary_weight - t1.q_prime) < 1e-9);
        if (q > 0)
          CHECK(std::abs(std::remainder(dep.phase - phi, 2 * kPi)) < 1e-9);

        const RetrievedDecomposition deph = decompose_retrieved(retrieve(
            retrieval_operator(n),
            store(n, NoiseModel(NoiseKind::Dephasing, std::min(q, 1.0)),
                  {phi})));
        const ClosedForm t2 = dephasing_closed_form(n, std::min(q, 1.0));
        CHECK(std::abs(deph.p_success - t2.p_success) < 1e-9);
        CHECK(std::abs(deph.unitary_weight - t2.q_prime) < 1e-9);
      }
    }
  }
}

TEST_CASE("binomial sums reproduce the two-use coefficient") {
  for (double q = 0.0; q <= 1.0; q += 0.1) {
    const BinomialCoefficients c = binomial_expansion_check(2, q);
    CHECK(c.unitary_coeff == doctest::Approx(q * (1 + q) / 3.0)
                                 .epsilon(1e-13));
  }
}

TEST_CASE("binomial sums at q=1 keep only the unitary term") {
  for (int n = 1; n <= 6; ++n) {
    const BinomialCoefficients c = binomial_expansion_check(n, 1.0);
    CHECK(c.unitary_coeff == doctest::Approx(double(n) / (n + 1))
                                 .epsilon(1e-14));
    CHECK(c.dephasing_coeff == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("binomial sums match coefficients extracted from retrieval") {
  const double phi = 0.9;
  for (int n = 1; n <= 4; ++n) {
    for (double q : {0.2, 0.6, 0.85}) {
      const LabeledOperator out = retrieve(
          retrieval_operator(n),
          store(n, NoiseModel(NoiseKind::Depolarizing, q), {phi}));
      const BinomialCoefficients c = binomial_expansion_check(n, q);
      // Coefficient of |U>><<U| is the magnitude of the (00),(11) corner;
      // coefficient of the diagonal projector is the remainder of (00),(00).
      const double unitary = std::abs(out.matrix(0, 3));
      const double dephasing = out.matrix(0, 0).real() - unitary;
      CHECK(std::abs(unitary - c.unitary_coeff) <= 1e-10);
      CHECK(std::abs(dephasing - c.dephasing_coeff) <= 1e-10);
    }
  }
}
