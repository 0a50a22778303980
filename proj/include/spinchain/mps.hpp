#ifndef SPINCHAIN_MPS_HPP
#define SPINCHAIN_MPS_HPP

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace spinchain {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Rank-3 MPS site tensor, physical dimension 2, stored flat in
/// (left, phys, right) row-major order.
struct SiteTensor {
  int left = 1;
  int right = 1;
  Eigen::VectorXd data;  // size left * 2 * right

  SiteTensor() = default;
  SiteTensor(int l, int r) : left(l), right(r), data(Eigen::VectorXd::Zero(2L * l * r)) {}

  double& at(int l, int s, int r) { return data[(static_cast<long>(l) * 2 + s) * right + r]; }
  double at(int l, int s, int r) const { return data[(static_cast<long>(l) * 2 + s) * right + r]; }

  /// (left*2) x right view
  Eigen::Map<RowMat> fused_left() { return {data.data(), 2L * left, right}; }
  Eigen::Map<const RowMat> fused_left() const { return {data.data(), 2L * left, right}; }
  /// left x (2*right) view
  Eigen::Map<RowMat> fused_right() { return {data.data(), left, 2L * right}; }
  Eigen::Map<const RowMat> fused_right() const { return {data.data(), left, 2L * right}; }
  /// (left x right) slice at fixed physical index
  Eigen::Map<const RowMat, 0, Eigen::OuterStride<>> phys_slice(int s) const {
    return {data.data() + static_cast<long>(s) * right, left, right,
            Eigen::OuterStride<>(2L * right)};
  }
};

struct MatrixProductState {
  std::vector<SiteTensor> sites;
  std::optional<int> canonical_center;  // 1-based site index

  int n_sites() const { return static_cast<int>(sites.size()); }
  SiteTensor& site(int i) { return sites[i - 1]; }          // 1-based
  const SiteTensor& site(int i) const { return sites[i - 1]; }
  std::vector<int> bond_dims() const;
};

struct SchmidtSpectrum {
  int cut_bond = 0;  // cut between sites cut_bond and cut_bond+1
  std::vector<double> values;  // descending, nonnegative
};

struct TruncationRecord {
  int bond = 0;
  int kept = 0;
  double discarded_weight = 0.0;
};

enum class Spin { Up, Down };

MatrixProductState product_mps(int n_sites, const std::vector<Spin>& configuration);

/// Random normalized MPS with bond dimensions capped at max_bond; test helper.
MatrixProductState random_mps(int n_sites, int max_bond, unsigned long seed);

/// Same physical state, canonical_center moved to `center` (1-based).
MatrixProductState canonicalize(const MatrixProductState& state, int center);
/// In-place variant.
void canonicalize_inplace(MatrixProductState& state, int center);

/// |<a|b>| by transfer-matrix contraction.
double overlap(const MatrixProductState& a, const MatrixProductState& b);

SchmidtSpectrum schmidt_spectrum(const MatrixProductState& state, int cut_bond);

/// Entropy in bits of a Schmidt spectrum, 0*log 0 := 0.
double entropy_bits(const SchmidtSpectrum& spectrum);

/// Truncate the bond between sites `bond` and `bond+1` to at most max_kept
/// Schmidt values, expanding (up to 2*max_kept) so a degenerate multiplet is
/// never split. Requires canonical center at `bond` or `bond+1`; the center
/// ends up on the site that absorbed the remaining weight.
TruncationRecord truncate_bond_inplace(MatrixProductState& state, int bond,
                                       int max_kept, double degeneracy_tol = 1e-12);
std::pair<MatrixProductState, TruncationRecord> truncate_bond(
    const MatrixProductState& state, int bond, int max_kept,
    double degeneracy_tol = 1e-12);

/// Full 2^N amplitude vector, site 1 most significant; n_sites <= 16.
Eigen::VectorXd mps_to_dense(const MatrixProductState& state);

/// <state| sum_i Sz_i |state>
double total_sz(const MatrixProductState& state);

}  // namespace spinchain

#endif
