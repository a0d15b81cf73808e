#include "psar/comb.hpp"

#include <algorithm>
#include <stdexcept>

namespace psar {

namespace {

std::vector<std::string> shared_labels(const LabeledOperator& x,
                                       const LabeledOperator& y) {
  std::vector<std::string> shared;
  for (const auto& f : x.row_layout.factors())
    if (y.row_layout.has_label(f.label)) {
      if (y.row_layout.dim_of(f.label) != f.dim)
        throw std::invalid_argument("link_product: shared label '" + f.label +
                                    "' has mismatched dimensions");
      shared.push_back(f.label);
    }
  return shared;
}

// For each flat index of `layout`, the flat index over `target`'s layout
// formed by the digits of the given labels (which must exhaust target's
// factors), plus the flat index over the remaining factors of `layout`.
struct SplitIndex {
  std::vector<long> shared_flat;  // indexed by layout flat index
  std::vector<long> keep_flat;
  SpaceLayout keep_layout;
};

SplitIndex split_against(const SpaceLayout& layout,
                         const SpaceLayout& shared_order,
                         const std::vector<std::string>& shared) {
  std::vector<bool> mask(layout.size(), false);
  for (const auto& l : shared) mask[layout.index_of(l)] = true;

  std::vector<Factor> kept;
  for (std::size_t f = 0; f < layout.size(); ++f)
    if (!mask[f]) kept.push_back(layout.factors()[f]);
  SplitIndex out;
  out.keep_layout = SpaceLayout(std::move(kept));

  const auto strides = layout_strides(layout);
  const auto shared_strides = layout_strides(shared_order);
  const auto keep_strides = layout_strides(out.keep_layout);
  // position of each of layout's factors inside shared_order, if shared
  std::vector<std::size_t> shared_pos(layout.size(), 0);
  for (std::size_t f = 0; f < layout.size(); ++f)
    if (mask[f]) shared_pos[f] = shared_order.index_of(layout.factors()[f].label);

  const long dim = layout.total_dim();
  out.shared_flat.resize(static_cast<std::size_t>(dim));
  out.keep_flat.resize(static_cast<std::size_t>(dim));
  for (long i = 0; i < dim; ++i) {
    long rest = i;
    long s = 0;
    long k = 0;
    std::size_t kpos = 0;
    for (std::size_t f = 0; f < layout.size(); ++f) {
      const long digit = rest / strides[f];
      rest -= digit * strides[f];
      if (mask[f])
        s += digit * shared_strides[shared_pos[f]];
      else
        k += digit * keep_strides[kpos++];
    }
    out.shared_flat[static_cast<std::size_t>(i)] = s;
    out.keep_flat[static_cast<std::size_t>(i)] = k;
  }
  return out;
}

// Fast path: y acts only on the shared factors. The partial transpose of
// the link-product definition cancels under the full contraction, leaving
// result(g, g') = sum_{m m'} x[(g,m),(g',m')] y(m, m').
LabeledOperator contract_full(const LabeledOperator& x,
                              const LabeledOperator& y,
                              const std::vector<std::string>& shared) {
  const auto split = split_against(x.row_layout, y.row_layout, shared);
  const long dim = x.row_layout.total_dim();
  const long kd = split.keep_layout.total_dim();
  Matrix out = Matrix::Zero(kd, kd);
  for (long r = 0; r < dim; ++r)
    for (long c = 0; c < dim; ++c)
      out(split.keep_flat[r], split.keep_flat[c]) +=
          x.matrix(r, c) * y.matrix(split.shared_flat[r], split.shared_flat[c]);
  return {std::move(out), split.keep_layout};
}

}  // namespace

LabeledOperator link_product(const LabeledOperator& x,
                             const LabeledOperator& y) {
  if (!x.is_square() || !y.is_square())
    throw std::invalid_argument("link_product: operands must be square");
  const auto shared = shared_labels(x, y);
  if (shared.empty()) return kron(x, y);

  if (shared.size() == y.row_layout.size()) return contract_full(x, y, shared);
  if (shared.size() == x.row_layout.size()) {
    // Commutativity up to factor ordering; the contraction kernel is
    // symmetric in its arguments.
    return contract_full(y, x, shared);
  }

  // General path: embed both operators into the union space and follow the
  // definition literally.
  std::vector<Factor> x_only_f, y_only_f;
  for (const auto& f : x.row_layout.factors())
    if (std::find(shared.begin(), shared.end(), f.label) == shared.end())
      x_only_f.push_back(f);
  for (const auto& f : y.row_layout.factors())
    if (std::find(shared.begin(), shared.end(), f.label) == shared.end())
      y_only_f.push_back(f);

  const LabeledOperator xt = partial_transpose(x, shared);
  LabeledOperator x_emb = y_only_f.empty()
                              ? xt
                              : kron(xt, identity_operator(SpaceLayout(y_only_f)));
  LabeledOperator y_emb = x_only_f.empty()
                              ? y
                              : kron(identity_operator(SpaceLayout(x_only_f)), y);

  const auto order = x_emb.row_layout.labels();
  y_emb = permute(y_emb, order);
  LabeledOperator prod{Matrix(x_emb.matrix * y_emb.matrix),
                       x_emb.row_layout};
  LabeledOperator traced = partial_trace(prod, shared);

  // Result ordering: x-only factors, then y-only factors.
  std::vector<std::string> result_order;
  for (const auto& f : x_only_f) result_order.push_back(f.label);
  for (const auto& f : y_only_f) result_order.push_back(f.label);
  return permute(traced, result_order);
}

NetworkCheck is_deterministic_network(
    const LabeledOperator& r,
    const std::vector<std::pair<std::string, std::string>>& causal_order) {
  NetworkCheck check;
  const double mineig = min_eigenvalue(r);
  if (mineig < -kPsdTol) {
    check.failed_level = static_cast<int>(causal_order.size());
    check.reason = "operator is not positive semidefinite";
    check.deviation = -mineig;
    return check;
  }

  LabeledOperator current = r;
  for (std::size_t k = causal_order.size(); k-- > 0;) {
    const auto& [in_label, out_label] = causal_order[k];
    const LabeledOperator traced = partial_trace(current, {out_label});
    const int d_in = traced.row_layout.dim_of(in_label);
    if (k == 0) {
      // R^0 = 1: the remaining operator must be the identity on in_1.
      const double dev = max_abs_diff(
          traced.matrix, Matrix::Identity(traced.matrix.rows(),
                                          traced.matrix.cols()));
      if (dev > kHermitianTol) {
        check.failed_level = 1;
        check.reason = "normalization fails at the innermost level";
        check.deviation = dev;
        return check;
      }
      break;
    }
    LabeledOperator reduced = partial_trace(traced, {in_label});
    reduced.matrix /= static_cast<double>(d_in);
    LabeledOperator expected =
        kron(identity_operator(SpaceLayout{{in_label, d_in}}), reduced);
    expected = permute(expected, traced.row_layout.labels());
    const double dev = max_abs_diff(traced.matrix, expected.matrix);
    if (dev > kHermitianTol) {
      check.failed_level = static_cast<int>(k) + 1;
      check.reason = "recursive normalization violated";
      check.deviation = dev;
      return check;
    }
    current = std::move(reduced);
  }
  check.ok = true;
  return check;
}

bool is_probabilistic_network(const LabeledOperator& s,
                              const std::vector<std::string>& out_labels) {
  if (min_eigenvalue(s) < -kPsdTol) return false;
  LabeledOperator traced = partial_trace(s, out_labels);
  const long d = traced.matrix.rows();
  LabeledOperator diff{Matrix(Matrix::Identity(d, d) - traced.matrix),
                       traced.row_layout, traced.col_layout};
  return min_eigenvalue(diff) >= -kPsdTol;
}

}  // namespace psar
