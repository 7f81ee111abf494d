#include "catavp/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace catavp {

Polynomial Polynomial::from_roots(const std::vector<double>& roots) {
  Polynomial p{{1.0}};
  for (double r : roots) p = p * Polynomial{{-r, 1.0}};
  return p;
}

int Polynomial::degree(double rel_tol) const {
  const double thresh = rel_tol * max_abs_coeff();
  for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 0; --i)
    if (std::abs(coeffs_[i]) > thresh) return i;
  return -1;
}

Polynomial Polynomial::trimmed(double rel_tol) const {
  const int d = degree(rel_tol);
  if (d < 0) return Polynomial();
  return Polynomial(Eigen::VectorXd(coeffs_.head(d + 1)));
}

int Polynomial::low_order_zeros(double rel_tol) const {
  const int d = degree(rel_tol);
  if (d < 0) return 0;
  const double thresh = rel_tol * max_abs_coeff();
  int k = 0;
  while (k < d && std::abs(coeffs_[k]) <= thresh) ++k;
  return k;
}

Polynomial Polynomial::shifted_down(int k) const {
  if (k <= 0) return *this;
  if (k >= coeffs_.size()) return Polynomial();
  return Polynomial(Eigen::VectorXd(coeffs_.tail(coeffs_.size() - k)));
}

double Polynomial::eval(double x) const {
  double acc = 0.0;
  for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 0; --i) acc = acc * x + coeffs_[i];
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial();
  Eigen::VectorXd d(coeffs_.size() - 1);
  for (int i = 1; i < coeffs_.size(); ++i) d[i - 1] = i * coeffs_[i];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(std::max(coeffs_.size(), o.coeffs_.size()));
  r.head(coeffs_.size()) = coeffs_;
  r.head(o.coeffs_.size()) += o.coeffs_;
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(std::max(coeffs_.size(), o.coeffs_.size()));
  r.head(coeffs_.size()) = coeffs_;
  r.head(o.coeffs_.size()) -= o.coeffs_;
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(coeffs_.size() + o.coeffs_.size() - 1);
  for (int i = 0; i < coeffs_.size(); ++i)
    for (int j = 0; j < o.coeffs_.size(); ++j) r[i + j] += coeffs_[i] * o.coeffs_[j];
  return Polynomial(std::move(r));
}

std::vector<double> real_roots(const Polynomial& p, double tol) {
  Polynomial q = p.trimmed();
  const int deg = q.degree();
  if (deg < 0) throw std::invalid_argument("real_roots: zero polynomial");
  if (deg == 0) return {};

  // normalize for conditioning
  Eigen::VectorXd c = q.coeffs().head(deg + 1) / q.max_abs_coeff();

  std::vector<double> roots;
  if (deg == 1) {
    roots.push_back(-c[0] / c[1]);
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    companion.block(1, 0, deg - 1, deg - 1).diagonal().setOnes();
    companion.col(deg - 1) = -c.head(deg) / c[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    const auto& ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) {
      if (std::abs(ev[i].imag()) <= tol * (1.0 + std::abs(ev[i].real())))
        roots.push_back(ev[i].real());
    }
  }

  // Newton polish (skipped near critical points where it would wander)
  const Polynomial dq = q.derivative();
  const double scale = q.max_abs_coeff();
  for (double& r : roots) {
    for (int it = 0; it < 8; ++it) {
      const double f = q.eval(r);
      const double df = dq.eval(r);
      if (std::abs(df) < 1e-12 * scale * std::max(1.0, std::abs(r))) break;
      const double step = f / df;
      if (!std::isfinite(step)) break;
      r -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
    }
  }

  std::sort(roots.begin(), roots.end());
  // collapse multiplicities
  std::vector<double> out;
  for (double r : roots) {
    if (out.empty() || std::abs(r - out.back()) > 1e-8 * (1.0 + std::abs(r)))
      out.push_back(r);
  }
  return out;
}

MonomialBasis2::MonomialBasis2(std::vector<std::pair<int, int>> t) : terms(std::move(t)) {
  for (size_t i = 0; i < terms.size(); ++i)
    for (size_t j = i + 1; j < terms.size(); ++j)
      if (terms[i] == terms[j]) throw std::invalid_argument("duplicate monomial in basis");
}

double MonomialBasis2::eval_term(int k, double y, double z) const {
  const auto [i, j] = terms[k];
  return std::pow(y, i) * std::pow(z, j);
}

double MonomialBasis2::eval(const Eigen::VectorXd& coeffs, double y, double z) const {
  double acc = 0.0;
  for (int k = 0; k < size(); ++k) acc += coeffs[k] * eval_term(k, y, z);
  return acc;
}

MonomialBasis2 MonomialBasis2::total_degree(int d) {
  std::vector<std::pair<int, int>> t;
  for (int i = 0; i <= d; ++i)
    for (int j = 0; i + j <= d; ++j) t.emplace_back(i, j);
  return MonomialBasis2(std::move(t));
}

namespace {

std::vector<double> chebyshev_axis(int n, double scale) {
  std::vector<double> axis(n);
  for (int i = 0; i < n; ++i) axis[i] = scale * std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * n));
  return axis;
}

}  // namespace

std::vector<Eigen::Vector2d> interpolation_nodes(const MonomialBasis2& basis, double scale) {
  int ymax = 0, zmax = 0;
  for (auto [i, j] : basis.terms) {
    ymax = std::max(ymax, i);
    zmax = std::max(zmax, j);
  }
  // a full (ymax+1) x (zmax+1) tensor grid is unisolvent for the basis
  const auto ya = chebyshev_axis(ymax + 1, scale);
  const auto za = chebyshev_axis(zmax + 1, scale);
  std::vector<Eigen::Vector2d> nodes;
  for (double y : ya)
    for (double z : za) nodes.emplace_back(y, z);
  const int n_fit = static_cast<int>(nodes.size());

  // held-out certification nodes on a shrunken grid (distinct from every fit node)
  const auto yh = chebyshev_axis(ymax + 1, 0.7 * scale);
  const auto zh = chebyshev_axis(zmax + 1, 0.7 * scale);
  for (double y : yh) {
    for (double z : zh) {
      if (static_cast<int>(nodes.size()) - n_fit >= basis.size()) break;
      nodes.emplace_back(y, z);
    }
  }
  return nodes;
}

Eigen::VectorXd interpolate_coeffs(const std::function<double(double, double)>& evaluator,
                                   const MonomialBasis2& basis,
                                   const std::vector<Eigen::Vector2d>& nodes) {
  const int nb = basis.size();
  const int n_fit = std::max<int>(nb, static_cast<int>(nodes.size()) - nb);
  if (static_cast<int>(nodes.size()) < nb)
    throw InterpolationError("fewer nodes than basis monomials");

  Eigen::MatrixXd V(n_fit, nb);
  Eigen::VectorXd f(n_fit);
  for (int r = 0; r < n_fit; ++r) {
    for (int k = 0; k < nb; ++k) V(r, k) = basis.eval_term(k, nodes[r][0], nodes[r][1]);
    f[r] = evaluator(nodes[r][0], nodes[r][1]);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0) || smax / smin > 1e8)
    throw InterpolationError("rank-deficient or badly conditioned node set");
  Eigen::VectorXd a = svd.solve(f);

  // certify on held-out nodes
  const int n_hold = static_cast<int>(nodes.size()) - n_fit;
  double fscale = f.cwiseAbs().maxCoeff();
  double resid = 0.0;
  for (int r = 0; r < n_hold; ++r) {
    const auto& nd = nodes[n_fit + r];
    const double fv = evaluator(nd[0], nd[1]);
    fscale = std::max(fscale, std::abs(fv));
    resid = std::max(resid, std::abs(basis.eval(a, nd[0], nd[1]) - fv));
  }
  if (fscale == 0.0) return Eigen::VectorXd::Zero(nb);  // identically zero evaluator
  if (resid > 1e-9 * fscale)
    throw InterpolationError("held-out residual too large: basis does not span the evaluator");
  return a;
}

Bivariate::Bivariate(const MonomialBasis2& basis, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != basis.size()) throw std::invalid_argument("coefficient/basis size mismatch");
  int ymax = 0, zmax = 0;
  for (auto [i, j] : basis.terms) {
    ymax = std::max(ymax, i);
    zmax = std::max(zmax, j);
  }
  c_ = Eigen::MatrixXd::Zero(ymax + 1, zmax + 1);
  for (int k = 0; k < basis.size(); ++k) c_(basis.terms[k].first, basis.terms[k].second) += coeffs[k];
}

double Bivariate::eval(double y, double z) const {
  double acc = 0.0;
  for (int i = static_cast<int>(c_.rows()) - 1; i >= 0; --i) {
    double row = 0.0;
    for (int j = static_cast<int>(c_.cols()) - 1; j >= 0; --j) row = row * z + c_(i, j);
    acc = acc * y + row;
  }
  return acc;
}

Polynomial Bivariate::y_slice(int k) const {
  if (k < 0 || k >= c_.rows()) return Polynomial();
  return Polynomial(Eigen::VectorXd(c_.row(k).transpose()));
}

Polynomial poly_compose_resultant(const Bivariate& q4, const Bivariate& q3) {
  const double s3 = q3.max_abs_coeff();
  const Polynomial a1 = q3.y_slice(2);
  if (a1.degree() > 0 || s3 == 0.0) throw std::invalid_argument("q3 must be quadratic in y");
  const double a1v = a1.eval(0.0);
  if (std::abs(a1v) <= 1e-9 * s3) throw DegenerateQuadraticError();

  const Polynomial beta = q3.y_slice(1);
  const Polynomial gamma = q3.y_slice(0);
  const Polynomial P = q4.y_slice(2);
  const Polynomial Q = q4.y_slice(1);
  const Polynomial R = q4.y_slice(0);

  // y = (k11 +- sqrt(k12)) / (2 a1), k11 = -beta, k12 = beta^2 - 4 a1 gamma;
  // 4 a1^2 q4(y) = E +- F sqrt(k12); squaring the radical out gives E^2 - F^2 k12
  const Polynomial k11 = beta * (-1.0);
  const Polynomial k12 = beta * beta - gamma * (4.0 * a1v);
  const Polynomial E = P * (k11 * k11 + k12) + Q * k11 * (2.0 * a1v) + R * (4.0 * a1v * a1v);
  const Polynomial F = P * k11 * 2.0 + Q * (2.0 * a1v);
  return (E * E - F * F * k12).trimmed();
}

Polynomial eliminate_y_linear(const Bivariate& q4, const Bivariate& q3) {
  const double s3 = q3.max_abs_coeff();
  if (q3.y_degree() >= 2 && q3.y_slice(2).max_abs_coeff() > 1e-9 * s3)
    throw std::invalid_argument("q3 is not linear in y");
  const Polynomial beta = q3.y_slice(1);
  const Polynomial gamma = q3.y_slice(0);
  if (beta.max_abs_coeff() <= 1e-12 * s3)
    throw std::invalid_argument("q3 does not involve y");
  const Polynomial P = q4.y_slice(2);
  const Polynomial Q = q4.y_slice(1);
  const Polynomial R = q4.y_slice(0);
  // substitute y = -gamma/beta into q4 and multiply by beta^2
  return (P * gamma * gamma - Q * gamma * beta + R * beta * beta).trimmed();
}

}  // namespace catavp
