#include "psar/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace psar {

namespace {

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

struct TargetSlot {
  long outer;    // number of blocks left of the target digit
  long dim;      // target dimension
  long stride;   // stride of the target digit
};

TargetSlot locate(const SpaceLayout& layout, const std::string& target) {
  const std::size_t pos = layout.index_of(target);
  const auto strides = layout_strides(layout);
  const long d = layout.factors()[pos].dim;
  return {layout.total_dim() / (d * strides[pos]), d, strides[pos]};
}

}  // namespace

KrausChannel::KrausChannel(std::vector<Matrix> ops, int din, int dout)
    : kraus(std::move(ops)), dim_in(din), dim_out(dout) {
  if (dim_in <= 0 || dim_out <= 0)
    throw std::invalid_argument("KrausChannel: non-positive dimension");
  for (const auto& k : kraus)
    if (k.rows() != dim_out || k.cols() != dim_in)
      throw std::invalid_argument("KrausChannel: operator shape mismatch");
}

double KrausChannel::trace_preservation_defect() const {
  Matrix acc = Matrix::Zero(dim_in, dim_in);
  for (const auto& k : kraus) acc += k.adjoint() * k;
  return (acc - Matrix::Identity(dim_in, dim_in)).cwiseAbs().maxCoeff();
}

NoiseModel::NoiseModel(NoiseKind k, double weight) : kind(k), q(weight) {
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("NoiseModel: q must lie in [0,1]");
}

std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::Depolarizing ? "depolarizing" : "dephasing";
}

Eigen::Matrix2cd phase_gate_unitary(PhaseAngle phi) {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
  u(0, 0) = 1.0;
  u(1, 1) = std::exp(Complex(0, phi.radians));
  return u;
}

KrausChannel unitary_channel(const Matrix& u) {
  return KrausChannel({u}, static_cast<int>(u.cols()),
                      static_cast<int>(u.rows()));
}

KrausChannel noisy_phase_gate(const NoiseModel& noise, PhaseAngle phi) {
  const double q = noise.q;
  std::vector<Matrix> ops;
  if (q > 0.0) ops.push_back(std::sqrt(q) * phase_gate_unitary(phi));
  if (q < 1.0) {
    if (noise.kind == NoiseKind::Depolarizing) {
      const double w = std::sqrt((1.0 - q) / 4.0);
      ops.push_back(w * Eigen::Matrix2cd::Identity());
      ops.push_back(w * pauli_x());
      ops.push_back(w * pauli_y());
      ops.push_back(w * pauli_z());
    } else {
      const double w = std::sqrt((1.0 - q) / 2.0);
      ops.push_back(w * Eigen::Matrix2cd::Identity());
      ops.push_back(w * pauli_z());
    }
  }
  return KrausChannel(std::move(ops), 2, 2);
}

LabeledOperator kraus_to_choi(const KrausChannel& ch,
                              const std::string& out_label,
                              const std::string& in_label) {
  const long d = static_cast<long>(ch.dim_out) * ch.dim_in;
  Matrix choi = Matrix::Zero(d, d);
  for (const auto& k : ch.kraus) {
    Vector v(d);
    for (int m = 0; m < ch.dim_out; ++m)
      for (int n = 0; n < ch.dim_in; ++n) v(m * ch.dim_in + n) = k(m, n);
    choi += v * v.adjoint();
  }
  return {std::move(choi),
          SpaceLayout{{out_label, ch.dim_out}, {in_label, ch.dim_in}}};
}

LabeledOperator apply_kraus(const KrausChannel& ch,
                            const LabeledOperator& state,
                            const std::string& target) {
  if (!state.is_square())
    throw std::invalid_argument("apply_kraus: state must be square");
  if (ch.dim_in != ch.dim_out)
    throw std::invalid_argument(
        "apply_kraus: only dimension-preserving channels are supported");
  const auto slot = locate(state.row_layout, target);
  if (slot.dim != ch.dim_in)
    throw std::invalid_argument("apply_kraus: target dimension mismatch");

  const long dim = state.row_layout.total_dim();
  Matrix out = Matrix::Zero(dim, dim);
  Matrix tmp(dim, dim);
  for (const auto& k : ch.kraus) {
    // rows: tmp = (I (x) K (x) I) * state
    tmp.setZero();
    for (long o = 0; o < slot.outer; ++o)
      for (long t = 0; t < slot.dim; ++t)
        for (long s = 0; s < slot.dim; ++s) {
          const Complex coef = k(t, s);
          if (coef == Complex(0, 0)) continue;
          tmp.middleRows((o * slot.dim + t) * slot.stride, slot.stride) +=
              coef *
              state.matrix.middleRows((o * slot.dim + s) * slot.stride,
                                      slot.stride);
        }
    // cols: out += tmp * (I (x) K^dag (x) I)
    for (long o = 0; o < slot.outer; ++o)
      for (long t = 0; t < slot.dim; ++t)
        for (long s = 0; s < slot.dim; ++s) {
          const Complex coef = std::conj(k(t, s));
          if (coef == Complex(0, 0)) continue;
          out.middleCols((o * slot.dim + t) * slot.stride, slot.stride) +=
              coef * tmp.middleCols((o * slot.dim + s) * slot.stride,
                                    slot.stride);
        }
  }
  return {std::move(out), state.row_layout};
}

LabeledOperator apply_choi(const LabeledOperator& choi,
                           const LabeledOperator& state,
                           const std::string& target) {
  if (!state.is_square())
    throw std::invalid_argument("apply_choi: state must be square");
  if (choi.row_layout.size() != 2 || !choi.is_square())
    throw std::invalid_argument(
        "apply_choi: Choi operator must have exactly [out, in] factors");
  const long d_out = choi.row_layout.factors()[0].dim;
  const long d_in = choi.row_layout.factors()[1].dim;
  const auto slot = locate(state.row_layout, target);
  if (slot.dim != d_in || d_out != d_in)
    throw std::invalid_argument("apply_choi: target dimension mismatch");

  const long dim = state.row_layout.total_dim();
  const long d = slot.dim;
  auto digit = [&](long i) { return (i / slot.stride) % d; };
  auto with_digit = [&](long i, long t) {
    return i + (t - digit(i)) * slot.stride;
  };

  // E(rho)_{m m'} = sum_{n n'} Choi_{(m,n),(m',n')} rho_{n n'},
  // applied on the target digit only.
  Matrix out = Matrix::Zero(dim, dim);
  for (long r = 0; r < dim; ++r) {
    const long m = digit(r);
    for (long c = 0; c < dim; ++c) {
      const long mp = digit(c);
      Complex acc(0, 0);
      for (long n = 0; n < d; ++n)
        for (long np = 0; np < d; ++np)
          acc += choi.matrix(m * d + n, mp * d + np) *
                 state.matrix(with_digit(r, n), with_digit(c, np));
      out(r, c) = acc;
    }
  }
  return {std::move(out), state.row_layout};
}

Matrix phase_gate_choi_matrix(PhaseAngle phi) {
  Matrix choi = Matrix::Zero(4, 4);
  const Complex e = std::exp(Complex(0, phi.radians));
  choi(0, 0) = 1.0;
  choi(3, 3) = 1.0;
  choi(0, 3) = std::conj(e);
  choi(3, 0) = e;
  return choi;
}

Matrix dephasing_choi_matrix() {
  Matrix choi = Matrix::Zero(4, 4);
  choi(0, 0) = 1.0;
  choi(3, 3) = 1.0;
  return choi;
}

}  // namespace psar
