#pragma once

#include "psar/channel.hpp"
#include "psar/tensor_core.hpp"

#include <random>

namespace psar::testing {

inline Matrix random_matrix(std::mt19937& rng, long rows, long cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
  return m;
}

inline LabeledOperator random_density(std::mt19937& rng,
                                      const SpaceLayout& layout) {
  const long d = layout.total_dim();
  const Matrix g = random_matrix(rng, d, d);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return {std::move(rho), layout};
}

inline LabeledOperator random_hermitian(std::mt19937& rng,
                                        const SpaceLayout& layout) {
  const long d = layout.total_dim();
  const Matrix g = random_matrix(rng, d, d);
  return {Matrix((g + g.adjoint()) / 2.0), layout};
}

inline KrausChannel random_channel(std::mt19937& rng, int dim,
                                   int n_kraus = 3) {
  std::vector<Matrix> ops;
  Matrix s = Matrix::Zero(dim, dim);
  for (int i = 0; i < n_kraus; ++i) {
    ops.push_back(random_matrix(rng, dim, dim));
    s += ops.back().adjoint() * ops.back();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  const Matrix inv_sqrt =
      es.eigenvectors() *
      es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      es.eigenvectors().adjoint();
  for (auto& k : ops) k = k * inv_sqrt;
  return KrausChannel(std::move(ops), dim, dim);
}

inline KrausChannel compose_channels(const KrausChannel& first,
                                     const KrausChannel& second) {
  std::vector<Matrix> ops;
  for (const auto& b : second.kraus)
    for (const auto& a : first.kraus) ops.push_back(b * a);
  return KrausChannel(std::move(ops), first.dim_in, second.dim_out);
}

}  // namespace psar::testing
