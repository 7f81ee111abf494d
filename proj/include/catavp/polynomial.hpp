#pragma once

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace catavp {

/// Dense univariate real polynomial, coefficients in ascending degree.
/// The effective degree trims near-zero high-order coefficients relative to
/// the largest coefficient magnitude (threshold kTrimRel).
class Polynomial {
 public:
  static constexpr double kTrimRel = 1e-11;

  Polynomial() : coeffs_(Eigen::VectorXd::Zero(1)) {}
  explicit Polynomial(Eigen::VectorXd c) : coeffs_(std::move(c)) {
    if (coeffs_.size() == 0) coeffs_ = Eigen::VectorXd::Zero(1);
    if (!coeffs_.allFinite()) throw std::invalid_argument("non-finite polynomial coefficients");
  }
  explicit Polynomial(std::initializer_list<double> c)
      : Polynomial(Eigen::Map<const Eigen::VectorXd>(c.begin(), static_cast<long>(c.size()))) {}

  static Polynomial constant(double v) { return Polynomial{{v}}; }
  static Polynomial from_roots(const std::vector<double>& roots);

  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  double max_abs_coeff() const { return coeffs_.cwiseAbs().maxCoeff(); }

  /// effective degree after relative trailing-zero trim; -1 for the zero polynomial
  int degree(double rel_tol = kTrimRel) const;
  bool is_zero(double rel_tol = kTrimRel) const { return degree(rel_tol) < 0; }

  /// drop trimmed high-order coefficients
  Polynomial trimmed(double rel_tol = kTrimRel) const;

  /// number of leading near-zero low-order coefficients, i.e. multiplicity of
  /// the monomial factor z^k (relative threshold)
  int low_order_zeros(double rel_tol = kTrimRel) const;
  /// divide out z^k
  Polynomial shifted_down(int k) const;

  double eval(double x) const;
  Polynomial derivative() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const { return Polynomial(Eigen::VectorXd(coeffs_ * s)); }

 private:
  Eigen::VectorXd coeffs_;
};

/// All real roots (multiplicity collapsed, ascending) via companion-matrix
/// eigenvalues plus Newton polishing. Eigenvalues with imaginary part below
/// tol * (1 + |root|) are accepted as real. Throws on the zero polynomial.
std::vector<double> real_roots(const Polynomial& p, double tol = 1e-8);

/// Exponent pairs (i, j) for the bivariate monomials y^i z^j.
struct MonomialBasis2 {
  std::vector<std::pair<int, int>> terms;

  MonomialBasis2() = default;
  explicit MonomialBasis2(std::vector<std::pair<int, int>> t);

  int size() const { return static_cast<int>(terms.size()); }
  double eval_term(int k, double y, double z) const;
  double eval(const Eigen::VectorXd& coeffs, double y, double z) const;

  /// all monomials of total degree <= d
  static MonomialBasis2 total_degree(int d);
};

struct InterpolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evaluation nodes for interpolate_coeffs: a full Chebyshev tensor grid sized
/// by the basis degrees (unisolvent for the basis) followed by basis-size
/// held-out certification nodes on a smaller grid.
std::vector<Eigen::Vector2d> interpolation_nodes(const MonomialBasis2& basis, double scale);

/// Recover the coefficients of a function that is exactly a polynomial spanned
/// by `basis`: solve the Vandermonde system on the first basis-size(+) nodes and
/// certify the residual on held-out nodes. Throws InterpolationError when the
/// node matrix is rank deficient / badly conditioned, or when the held-out
/// residual exceeds 1e-9 relative (wrong basis hypothesis).
Eigen::VectorXd interpolate_coeffs(const std::function<double(double, double)>& evaluator,
                                   const MonomialBasis2& basis,
                                   const std::vector<Eigen::Vector2d>& nodes);

/// Bivariate polynomial on a dense (y-degree x z-degree) coefficient table.
class Bivariate {
 public:
  Bivariate() : c_(Eigen::MatrixXd::Zero(1, 1)) {}
  Bivariate(const MonomialBasis2& basis, const Eigen::VectorXd& coeffs);

  double eval(double y, double z) const;
  int y_degree() const { return static_cast<int>(c_.rows()) - 1; }
  /// coefficient of y^k as a polynomial in z
  Polynomial y_slice(int k) const;
  double max_abs_coeff() const { return c_.cwiseAbs().maxCoeff(); }

 private:
  Eigen::MatrixXd c_;  // c_(i, j) multiplies y^i z^j
};

struct DegenerateQuadraticError : std::runtime_error {
  DegenerateQuadraticError() : std::runtime_error("leading y^2 coefficient is ~0") {}
};

/// Eliminate y between q3 (quadratic in y, the kappa9 role) and q4 (the kappa10
/// role) by substituting the quadratic-formula roots of q3 and squaring out the
/// radical. Result has degree <= 10 in z. Throws DegenerateQuadraticError when
/// the y^2 coefficient of q3 is (numerically) zero; callers then use
/// eliminate_y_linear.
Polynomial poly_compose_resultant(const Bivariate& q4, const Bivariate& q3);

/// Linear-in-y branch: q3 = beta(z) y + gamma(z); substitute y = -gamma/beta
/// into q4 and clear the denominator.
Polynomial eliminate_y_linear(const Bivariate& q4, const Bivariate& q3);

}  // namespace catavp
