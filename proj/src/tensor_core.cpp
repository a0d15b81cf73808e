#include "psar/tensor_core.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace psar {

namespace {

// Flat contribution of the digits selected by `mask` (strides taken from
// the full layout), for every flat index of the layout.
std::vector<long> masked_parts(const SpaceLayout& layout,
                               const std::vector<bool>& mask) {
  const auto strides = layout_strides(layout);
  const auto& factors = layout.factors();
  const long dim = layout.total_dim();
  std::vector<long> part(static_cast<std::size_t>(dim), 0);
  for (long i = 0; i < dim; ++i) {
    long rest = i;
    long acc = 0;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const long digit = rest / strides[f];
      rest -= digit * strides[f];
      if (mask[f]) acc += digit * strides[f];
    }
    part[static_cast<std::size_t>(i)] = acc;
  }
  return part;
}

std::vector<bool> label_mask(const SpaceLayout& layout,
                             const std::vector<std::string>& labels) {
  std::vector<bool> mask(layout.size(), false);
  for (const auto& l : labels) mask[layout.index_of(l)] = true;
  return mask;
}

}  // namespace

SpaceLayout::SpaceLayout(std::initializer_list<Factor> factors)
    : factors_(factors) {
  validate();
}

SpaceLayout::SpaceLayout(std::vector<Factor> factors)
    : factors_(std::move(factors)) {
  validate();
}

void SpaceLayout::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dim <= 0)
      throw std::invalid_argument("SpaceLayout: non-positive dimension for '" +
                                  f.label + "'");
    if (!seen.insert(f.label).second)
      throw std::invalid_argument("SpaceLayout: duplicate label '" + f.label +
                                  "'");
  }
}

long SpaceLayout::total_dim() const {
  long d = 1;
  for (const auto& f : factors_) d *= f.dim;
  return d;
}

bool SpaceLayout::has_label(const std::string& label) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const Factor& f) { return f.label == label; });
}

std::size_t SpaceLayout::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].label == label) return i;
  throw std::invalid_argument("SpaceLayout: unknown label '" + label + "'");
}

int SpaceLayout::dim_of(const std::string& label) const {
  return factors_[index_of(label)].dim;
}

std::vector<std::string> SpaceLayout::labels() const {
  std::vector<std::string> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) out.push_back(f.label);
  return out;
}

std::vector<long> layout_strides(const SpaceLayout& layout) {
  const auto& factors = layout.factors();
  std::vector<long> strides(factors.size(), 1);
  long acc = 1;
  for (std::size_t i = factors.size(); i-- > 0;) {
    strides[i] = acc;
    acc *= factors[i].dim;
  }
  return strides;
}

LabeledOperator::LabeledOperator(Matrix m, SpaceLayout layout)
    : LabeledOperator(std::move(m), layout, layout) {}

LabeledOperator::LabeledOperator(Matrix m, SpaceLayout rows, SpaceLayout cols)
    : matrix(std::move(m)),
      row_layout(std::move(rows)),
      col_layout(std::move(cols)) {
  if (matrix.rows() != row_layout.total_dim() ||
      matrix.cols() != col_layout.total_dim())
    throw std::invalid_argument(
        "LabeledOperator: matrix shape does not match layouts");
}

LabeledOperator identity_operator(const SpaceLayout& layout) {
  const long d = layout.total_dim();
  return {Matrix::Identity(d, d), layout};
}

LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b) {
  for (const auto& f : b.row_layout.factors())
    if (a.row_layout.has_label(f.label))
      throw std::invalid_argument("kron: duplicate label '" + f.label + "'");
  auto join = [](const SpaceLayout& x, const SpaceLayout& y) {
    std::vector<Factor> fs = x.factors();
    fs.insert(fs.end(), y.factors().begin(), y.factors().end());
    return SpaceLayout(std::move(fs));
  };
  Matrix m = Eigen::kroneckerProduct(a.matrix, b.matrix);
  return {std::move(m), join(a.row_layout, b.row_layout),
          join(a.col_layout, b.col_layout)};
}

LabeledOperator permute(const LabeledOperator& a,
                        const std::vector<std::string>& new_order) {
  if (!a.is_square())
    throw std::invalid_argument("permute: operator must be square");
  const auto& old_factors = a.row_layout.factors();
  if (new_order.size() != old_factors.size())
    throw std::invalid_argument("permute: new_order is not a permutation");
  std::vector<Factor> new_factors;
  std::vector<std::size_t> old_pos;  // old position of factor j in new order
  std::unordered_set<std::string> seen;
  for (const auto& label : new_order) {
    if (!seen.insert(label).second)
      throw std::invalid_argument("permute: repeated label '" + label + "'");
    const std::size_t p = a.row_layout.index_of(label);
    old_pos.push_back(p);
    new_factors.push_back(old_factors[p]);
  }
  SpaceLayout new_layout{std::move(new_factors)};

  const auto old_strides = layout_strides(a.row_layout);
  const auto new_strides = layout_strides(new_layout);
  const long dim = a.row_layout.total_dim();

  // map[i] = flat index in the new ordering of old basis element i
  std::vector<long> map(static_cast<std::size_t>(dim), 0);
  for (long i = 0; i < dim; ++i) {
    long rest = i;
    std::vector<long> digits(old_factors.size());
    for (std::size_t f = 0; f < old_factors.size(); ++f) {
      digits[f] = rest / old_strides[f];
      rest -= digits[f] * old_strides[f];
    }
    long j = 0;
    for (std::size_t f = 0; f < old_pos.size(); ++f)
      j += digits[old_pos[f]] * new_strides[f];
    map[static_cast<std::size_t>(i)] = j;
  }

  Matrix out(dim, dim);
  for (long r = 0; r < dim; ++r)
    for (long c = 0; c < dim; ++c) out(map[r], map[c]) = a.matrix(r, c);
  return {std::move(out), std::move(new_layout)};
}

LabeledOperator partial_trace(const LabeledOperator& a,
                              const std::vector<std::string>& labels) {
  if (!a.is_square())
    throw std::invalid_argument("partial_trace: operator must be square");
  const auto mask = label_mask(a.row_layout, labels);
  const auto traced_part = masked_parts(a.row_layout, mask);

  std::vector<Factor> kept;
  for (std::size_t f = 0; f < a.row_layout.size(); ++f)
    if (!mask[f]) kept.push_back(a.row_layout.factors()[f]);
  SpaceLayout kept_layout{std::move(kept)};

  // Compress the kept digits to flat indices of the reduced layout.
  const auto old_strides = layout_strides(a.row_layout);
  const auto new_strides = layout_strides(kept_layout);
  const long dim = a.row_layout.total_dim();
  std::vector<long> kept_flat(static_cast<std::size_t>(dim), 0);
  for (long i = 0; i < dim; ++i) {
    long rest = i;
    long j = 0;
    std::size_t k = 0;
    for (std::size_t f = 0; f < a.row_layout.size(); ++f) {
      const long digit = rest / old_strides[f];
      rest -= digit * old_strides[f];
      if (!mask[f]) j += digit * new_strides[k++];
    }
    kept_flat[static_cast<std::size_t>(i)] = j;
  }

  Matrix out = Matrix::Zero(kept_layout.total_dim(), kept_layout.total_dim());
  for (long r = 0; r < dim; ++r)
    for (long c = 0; c < dim; ++c)
      if (traced_part[r] == traced_part[c])
        out(kept_flat[r], kept_flat[c]) += a.matrix(r, c);
  return {std::move(out), std::move(kept_layout)};
}

LabeledOperator partial_transpose(const LabeledOperator& a,
                                  const std::vector<std::string>& labels) {
  if (!a.is_square())
    throw std::invalid_argument("partial_transpose: operator must be square");
  const auto mask = label_mask(a.row_layout, labels);
  const auto swapped = masked_parts(a.row_layout, mask);
  const long dim = a.row_layout.total_dim();

  Matrix out(dim, dim);
  for (long r = 0; r < dim; ++r) {
    const long kr = r - swapped[r];
    for (long c = 0; c < dim; ++c) {
      const long kc = c - swapped[c];
      out(kr + swapped[c], kc + swapped[r]) = a.matrix(r, c);
    }
  }
  return {std::move(out), a.row_layout};
}

double min_eigenvalue(const LabeledOperator& a) {
  if (a.matrix.rows() != a.matrix.cols())
    throw std::invalid_argument("min_eigenvalue: operator must be square");
  if (!is_hermitian(a.matrix))
    throw std::invalid_argument(
        "min_eigenvalue: operator is not Hermitian within tolerance");
  const Matrix h = (a.matrix + a.matrix.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h,
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

LabeledOperator relabel(const LabeledOperator& a, const std::string& from,
                        const std::string& to) {
  auto rename = [&](const SpaceLayout& layout) {
    std::vector<Factor> fs = layout.factors();
    for (auto& f : fs)
      if (f.label == from) f.label = to;
    return SpaceLayout(std::move(fs));
  };
  return {a.matrix, rename(a.row_layout), rename(a.col_layout)};
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace psar
