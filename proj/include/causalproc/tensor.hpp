#pragma once

// Dense operator algebra over ordered lists of labeled, dimensioned
// subsystems. Row and column indices follow the lexicographic order of the
// system list: the first system is the most significant digit.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace causalproc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Labels = std::vector<std::string>;

/// Raised on every contract violation in the library. The message names the
/// offending label, dimension or measured deviation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemId {
  std::string label;
  int dim = 1;

  friend bool operator==(const SystemId&, const SystemId&) = default;
};

/// Absolute Frobenius tolerance on ||A - A^dagger|| before spectral calls.
inline constexpr double kHermiticityTolerance = 1e-9;

std::size_t product_of_dims(const std::vector<SystemId>& systems);

class LabeledOperator {
 public:
  /// Empty system list, 1x1 matrix holding 1.
  LabeledOperator();
  LabeledOperator(std::vector<SystemId> systems, Matrix matrix);

  static LabeledOperator identity(std::vector<SystemId> systems);
  static LabeledOperator maximally_mixed(std::vector<SystemId> systems);
  /// |psi><psi| with psi indexed in the order of `systems`.
  static LabeledOperator projector(std::vector<SystemId> systems, const Vector& psi);

  const std::vector<SystemId>& systems() const { return systems_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

  Labels labels() const;
  bool has(const std::string& label) const;
  std::size_t index_of(const std::string& label) const;
  const SystemId& system(const std::string& label) const;
  std::vector<SystemId> systems_for(const Labels& labels) const;

  Complex trace() const { return matrix_.trace(); }
  LabeledOperator scaled(Complex factor) const;
  LabeledOperator adjoint() const;
  /// Renames systems; labels absent from `renames` are kept.
  LabeledOperator relabeled(const std::vector<std::pair<std::string, std::string>>& renames) const;

 private:
  std::vector<SystemId> systems_;
  Matrix matrix_;
};

/// Sum and difference require the same label set; the right operand is
/// permuted into the left operand's order.
LabeledOperator operator+(const LabeledOperator& a, const LabeledOperator& b);
LabeledOperator operator-(const LabeledOperator& a, const LabeledOperator& b);

/// Frobenius norm of a - b after aligning b to a's system order.
double frobenius_distance(const LabeledOperator& a, const LabeledOperator& b);

LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b);
LabeledOperator partial_trace(const LabeledOperator& a, const Labels& subset);
/// Keeps only `keep` (in the operator's own order) and traces the rest.
LabeledOperator reduce_to(const LabeledOperator& a, const Labels& keep);
LabeledOperator permute_systems(const LabeledOperator& a, const Labels& new_order);
LabeledOperator transpose(const LabeledOperator& a, const Labels& subset);
LabeledOperator replace_with_maximally_mixed(const LabeledOperator& a, const Labels& subset);

double hermiticity_deviation(const Matrix& m);
/// Ascending real spectrum of a Hermitian operator (symmetrized first).
std::vector<double> eigvals_hermitian(const LabeledOperator& a);
std::vector<double> eigvals_hermitian(const Matrix& m);

}  // namespace causalproc
