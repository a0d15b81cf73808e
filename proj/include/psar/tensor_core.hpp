#pragma once

#include <Eigen/Dense>

#include <complex>
#include <initializer_list>
#include <string>
#include <vector>

namespace psar {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Absolute tolerance for Hermiticity checks (max-entry norm).
inline constexpr double kHermitianTol = 1e-9;
/// Positivity tolerance: an operator counts as PSD when its smallest
/// eigenvalue is >= -kPsdTol.
inline constexpr double kPsdTol = 1e-9;

/// One labeled tensor factor of a composite Hilbert space.
struct Factor {
  std::string label;
  int dim = 0;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Ordered list of labeled subsystem dimensions. Labels are unique;
/// equality requires identical order, labels and dims.
class SpaceLayout {
 public:
  SpaceLayout() = default;
  SpaceLayout(std::initializer_list<Factor> factors);
  explicit SpaceLayout(std::vector<Factor> factors);

  long total_dim() const;
  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }

  bool has_label(const std::string& label) const;
  /// Position of a factor; throws if the label is unknown.
  std::size_t index_of(const std::string& label) const;
  int dim_of(const std::string& label) const;
  std::vector<std::string> labels() const;

  friend bool operator==(const SpaceLayout&, const SpaceLayout&) = default;

 private:
  void validate() const;
  std::vector<Factor> factors_;
};

/// Row-major strides of a layout: the flat index of a basis element with
/// digits (i_0, ..., i_{k-1}) is sum_j i_j * stride_j.
std::vector<long> layout_strides(const SpaceLayout& layout);

/// Dense complex matrix together with the labeled factorizations of its
/// row and column spaces. The universal carrier of states, Choi operators
/// and combs in this library.
struct LabeledOperator {
  Matrix matrix;
  SpaceLayout row_layout;
  SpaceLayout col_layout;

  LabeledOperator() = default;
  /// Square operator: identical row and column layouts.
  LabeledOperator(Matrix m, SpaceLayout layout);
  LabeledOperator(Matrix m, SpaceLayout rows, SpaceLayout cols);

  bool is_square() const { return row_layout == col_layout; }
  Complex trace() const { return matrix.trace(); }
};

/// Identity on the given layout.
LabeledOperator identity_operator(const SpaceLayout& layout);

/// Tensor product; label sets must be disjoint. The result layout is a's
/// factors followed by b's.
LabeledOperator kron(const LabeledOperator& a, const LabeledOperator& b);

/// Reorder the tensor factors of a square operator. new_order must be a
/// permutation of a's labels; the reindexing is applied to rows and
/// columns alike and is an exact involution.
LabeledOperator permute(const LabeledOperator& a,
                        const std::vector<std::string>& new_order);

/// Trace out the given factors of a square operator.
LabeledOperator partial_trace(const LabeledOperator& a,
                              const std::vector<std::string>& labels);

/// Transpose only the given factors of a square operator.
LabeledOperator partial_transpose(const LabeledOperator& a,
                                  const std::vector<std::string>& labels);

/// Smallest eigenvalue of the Hermitized matrix (a + a^dag)/2. Rejects
/// inputs that are non-Hermitian beyond kHermitianTol.
double min_eigenvalue(const LabeledOperator& a);

/// Rename one factor (applied to both row and column layouts).
LabeledOperator relabel(const LabeledOperator& a, const std::string& from,
                        const std::string& to);

bool is_hermitian(const Matrix& m, double tol = kHermitianTol);

/// Max-entry distance between two matrices of equal shape.
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace psar
