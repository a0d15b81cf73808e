#pragma once

#include "psar/tensor_core.hpp"

#include <string>
#include <utility>
#include <vector>

namespace psar {

/// Link product of two square labeled operators. Shared factors are
/// discovered by label equality: partial transpose on the shared factors
/// of x, embed both into the union space, multiply, trace the shared
/// factors out. The result lives on x's non-shared factors followed by
/// y's non-shared factors.
LabeledOperator link_product(const LabeledOperator& x,
                             const LabeledOperator& y);

/// Diagnostic result of a comb normalization check.
struct NetworkCheck {
  bool ok = false;
  /// First violated recursion level (1-based); 0 when ok.
  int failed_level = 0;
  std::string reason;
  double deviation = 0.0;

  explicit operator bool() const { return ok; }
};

/// Checks the deterministic-network (quantum comb) conditions: positive
/// semidefiniteness and the recursive normalization
/// Tr_{out_k}[R^k] = I_{in_k} (x) R^{k-1} with R^0 = 1, for the given
/// causal order of (input, output) label pairs.
NetworkCheck is_deterministic_network(
    const LabeledOperator& r,
    const std::vector<std::pair<std::string, std::string>>& causal_order);

/// Necessary conditions for a probabilistic network: PSD and
/// Tr_out(s) <= I on the remaining factors (operator inequality, checked
/// via the minimum eigenvalue of the difference). Sufficiency (existence
/// of a completing deterministic network) is not decided.
bool is_probabilistic_network(const LabeledOperator& s,
                              const std::vector<std::string>& out_labels);

}  // namespace psar
