#pragma once

// Finite-rank coherent-state quantization of the sphere: the holomorphic
// section basis, coherent projections q_x, Toeplitz operators Q_f, covariant
// symbols, the Berezin transform, the SU(2) orbit check and reconstruction of
// the propagator from the projections alone.

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "csq/models.hpp"

namespace csq::quantize {

using models::ChartPoint;
using models::ModelSpace;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

double binomial(int n, int k);

/// sqrt((n+1)/(2 pi n) C(n,k)); Psi_k(z) = basis_coefficient(n,k) z^k.
double basis_coefficient(int n, int k);
cplx basis_section(int n, int k, cplx z);

/// v_k = sqrt(C(n,k)) conj(z)^k / (1+|z|^2)^(n/2), expressed through
/// homogeneous coordinates so both charts work; <v_x, v_y> = K(y, x).
Vector coherent_vector(int n, const ChartPoint& x);

enum class OperatorTag { toeplitz, coherent_projection, external };

struct QuantOperator {
  Matrix entries;
  std::string label;
  OperatorTag tag = OperatorTag::external;

  int dim() const { return static_cast<int>(entries.rows()); }
  bool is_hermitian(double tol = 1e-10) const;
  static QuantOperator external(Matrix m, std::string label);
};

struct QuantSettings {
  double abs_tol = 1e-11;
  unsigned threads = 0;
  int max_depth = 14;
};

struct MatrixIntegral {
  Matrix value;
  double error = 0.0;
  std::size_t cells = 0;
};

/// Max-entry norm used for all matrix residuals.
double max_abs(const Matrix& m);

/// Integrates a matrix-valued function of the point against calibrated dmu.
MatrixIntegral integrate_matrix(const ModelSpace& m,
                                const std::function<Matrix(const ChartPoint&)>& f, int rows,
                                const QuantSettings& s = {});

/// G_jk = int conj(Psi_j) Psi_k h n omega_FS, with n omega_FS = 2 pi n/(n+1) dmu.
MatrixIntegral gram_matrix(const ModelSpace& m, const QuantSettings& s = {});

QuantOperator coherent_projection(const ModelSpace& m, const ChartPoint& x);

struct Resolution {
  Matrix integral;        // int q_x dmu(x)
  double residual = 0.0;  // max entry of integral - 1
  cplx trace;
  double volume = 0.0;    // int dmu, separately
  double quadrature_error = 0.0;
};

Resolution resolution_of_identity(const ModelSpace& m, const QuantSettings& s = {});
models::ModelIntegral<cplx> volume(const ModelSpace& m, const QuantSettings& s = {});

using ChartFunction = std::function<cplx(const ChartPoint&)>;

/// Coordinate function x_i (i = 1, 2, 3) of the unit-sphere embedding.
ChartFunction coordinate(int i);

/// Q_f = int f(x) q_x dmu(x). Throws DomainError if f is not finite at a node.
QuantOperator build_Q(const ModelSpace& m, const ChartFunction& f, const std::string& label,
                      const QuantSettings& s = {});

class CovariantSymbol {
 public:
  explicit CovariantSymbol(QuantOperator a) : op_(std::move(a)) {}
  /// rho_x(A) = <v_x, A v_x>.
  cplx operator()(const ChartPoint& x) const;
  const QuantOperator& source() const { return op_; }

 private:
  QuantOperator op_;
};

CovariantSymbol covariant_symbol(const QuantOperator& a);

/// tr(A^dagger B).
cplx hs_inner(const Matrix& a, const Matrix& b);
/// int conj(rho_x(A)) f(x) dmu(x); equals hs_inner(A, Q_f).
cplx symbol_pairing(const ModelSpace& m, const QuantOperator& a, const ChartFunction& f,
                    const QuantSettings& s = {});

struct BerezinRow {
  int n = 0;
  double error = 0.0;  // sup over samples of |rho_x(Q_f) - f(x)|
};

/// Sample points are unit vectors so that every level sees the same set.
std::vector<BerezinRow> berezin_transform_limit(const ChartFunction& f,
                                                const std::vector<int>& levels,
                                                const std::vector<numerics::Vec3>& samples,
                                                const QuantSettings& s = {});

/// Least-squares slope of log2 e(n) against log2 n, returned as 2^slope:
/// the average factor by which the error shrinks when n doubles.
double halving_ratio(const std::vector<BerezinRow>& rows);

struct RoundTrip {
  std::vector<double> modulus;  // | |Omega~(x,y)| - weighted |Omega(x,y)| |
  std::vector<double> delta;    // |Delta~(x,y,z) - Delta(x,y,z)|
  double sup_modulus = 0.0;
  double sup_delta = 0.0;
};

/// Unit vector spanning the range of a rank-one projection, read from q alone.
Vector range_vector(const QuantOperator& q);
/// <e_y, e_x> for range vectors of q_x and q_y; phase depends on that choice.
cplx reconstructed_kernel(const QuantOperator& qx, const QuantOperator& qy);

RoundTrip reconstruct_propagator(
    const ModelSpace& m, const std::function<QuantOperator(const ChartPoint&)>& q_family,
    const std::vector<std::pair<ChartPoint, ChartPoint>>& pairs,
    const std::vector<std::array<ChartPoint, 3>>& triples);

struct SchurResult {
  int j2 = 0;
  double commutator = 0.0;  // max_a || [I, J_a] || before rescaling
  double residual = 0.0;    // || I (j2+1)/tr I - 1 ||
  double trace = 0.0;       // trace after rescaling
  double conjugation_deviation = 0.0;  // max || U q_orbit U^dagger - q_x || over samples
  double quadrature_error = 0.0;
};

struct SpinMatrices {
  Matrix jx, jy, jz;
};
/// Spin-j2/2 irrep in the basis |j, m>, index k = j + m, standard real ladder entries.
SpinMatrices spin_matrices(int j2);

SchurResult su2_schur_check(int j2, const QuantSettings& s = {});

/// max over grid of |<v_x, psi>| for normalized psi, and the maximizer.
std::pair<double, ChartPoint> max_overlap(int n, const Vector& psi,
                                          const std::vector<ChartPoint>& grid);

double min_eigenvalue(const QuantOperator& a);

}  // namespace csq::quantize
