#include "combasym/newton.hpp"

#include <boost/math/special_functions/fpclassify.hpp>

namespace combasym {

std::string to_string(ValueResult::Kind k) {
  switch (k) {
    case ValueResult::Kind::Converged: return "converged";
    case ValueResult::Kind::AboveRadius: return "above-radius";
    case ValueResult::Kind::Inconclusive: return "inconclusive";
  }
  return "";
}

std::string to_string(ValueResult::Reason r) {
  switch (r) {
    case ValueResult::Reason::None: return "none";
    case ValueResult::Reason::Decreasing: return "decreasing-coordinate";
    case ValueResult::Reason::OutsideDomain: return "outside-domain";
    case ValueResult::Reason::Lambda: return "lambda>=1";
  }
  return "";
}

Matrix<Real> submatrix(const Matrix<Real>& M, const std::vector<int>& idx) {
  int k = static_cast<int>(idx.size());
  Matrix<Real> S(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) S(a, b) = M(idx[a], idx[b]);
  return S;
}

static bool finite(const Real& x) { return boost::multiprecision::isfinite(x); }

static Real noise_level(const PrecisionContext& ctx) { return ldexp2(-static_cast<int>(ctx.bits / 2)); }

std::vector<Real> newton_step(const AnalyticSystem& A, const Real& a, const std::vector<Real>& y) {
  auto h = A.H(a, y);
  LU<Real> lu(identity_minus(A.jacobian(a, y)));
  if (lu.singular) return {};
  std::vector<Real> rhs(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) rhs[i] = h[i] - y[i];
  return lu.solve(rhs);
}

KantorovichCertificate kantorovich_certify(const AnalyticSystem& A, const Real& a, const std::vector<Real>& y,
                                           const PrecisionContext& ctx) {
  KantorovichCertificate c;
  int n = A.dim();
  DomainStatus st;
  A.H(a, y, &st);
  if (!st.inside()) { c.reason = "iterate outside the domain"; return c; }
  LU<Real> lu(identity_minus(A.jacobian(a, y)));
  if (lu.singular) { c.reason = "singular Jacobian"; return c; }
  auto h = A.H(a, y);
  std::vector<Real> rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = h[i] - y[i];
  auto d = lu.solve(rhs);
  c.r = 2 * norm_inf(d);
  c.bound = c.kappa * c.r;
  std::vector<Real> u(n);
  for (int i = 0; i < n; ++i) {
    u[i] = y[i] + c.r;
    if (y[i] - c.r < 0) { c.reason = "y - r has a negative coordinate"; return c; }
  }
  DomainStatus su;
  A.H(a, u, &su);
  if (!su.inside()) { c.reason = "y + r outside the domain"; return c; }
  auto w = lu.solve(A.hessian_rowsums(a, u));
  c.test = c.r * norm_inf(w);
  if (!finite(c.test)) { c.reason = "test value not finite"; return c; }
  if (c.test > 1) { c.reason = "test value above 1"; return c; }
  (void)ctx;
  c.valid = true;
  return c;
}

ValueResult newton_value(const AnalyticSystem& A, const Real& a, const PrecisionContext& ctx, int cap) {
  if (cap <= 0) cap = 200 + static_cast<int>(ctx.bits / 2);
  ValueResult res;
  int n = A.dim();
  std::vector<Real> y(n, Real(0));
  res.history.push_back(y);
  Real noise = noise_level(ctx);
  Real tol = ctx.tolerance();
  Real prev = -1;
  auto above = [&](ValueResult::Reason r) {
    res.kind = ValueResult::Kind::AboveRadius;
    res.reason = r;
    res.y = y;
    return res;
  };
  for (int it = 0; it < cap; ++it) {
    DomainStatus st;
    auto h = A.H(a, y, &st);
    if (!st.inside()) return above(ValueResult::Reason::OutsideDomain);
    auto J = A.jacobian(a, y);
    // a decreasing next iterate is reported in preference to lambda >= 1
    bool lambda_above = compare_perron_to_one(J, ctx) > 0;
    LU<Real> lu(identity_minus(J));
    if (lu.singular) {
      if (lambda_above) return above(ValueResult::Reason::Lambda);
      res.y = y;
      return res;
    }
    std::vector<Real> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = h[i] - y[i];
    auto d = lu.solve(rhs);
    for (int i = 0; i < n; ++i) {
      if (!finite(d[i])) break;
      if (d[i] < -noise * (1 + abs(y[i]))) return above(ValueResult::Reason::Decreasing);
    }
    if (lambda_above) return above(ValueResult::Reason::Lambda);
    for (int i = 0; i < n; ++i)
      if (!finite(d[i])) { res.y = y; return res; }
    Real norm = norm_inf(d);
    res.step_norm = norm;
    bool small = norm <= tol * (1 + norm_inf(y));
    bool stalled = norm <= noise && prev >= 0 && norm * 4 > prev;
    if (small || stalled) {
      // certify the current iterate with this step, report the updated one
      res.certificate = kantorovich_certify(A, a, y, ctx);
      res.certified = res.certificate.valid;
      res.kind = res.certified ? ValueResult::Kind::Converged : ValueResult::Kind::Inconclusive;
      for (int i = 0; i < n; ++i) y[i] += d[i];
      res.y = y;
      return res;
    }
    for (int i = 0; i < n; ++i) y[i] += d[i];
    res.steps = it + 1;
    res.history.push_back(y);
    prev = norm;
  }
  res.y = y;
  return res;
}

Real char_determinant(const AnalyticSystem& A, const std::vector<int>& component, const Real& z,
                      const std::vector<Real>& y) {
  return determinant(identity_minus(submatrix(A.jacobian(z, y), component)));
}

namespace {

struct Solver {
  const AnalyticSystem& A;
  const PrecisionContext& ctx;
  int cap;

  // Residual and Jacobian for unknowns x = (z, y[free]); y holds all coordinates.
  template <class Fill>
  CharResult run(std::vector<int> free, Real z, std::vector<Real> y, Fill fill) {
    CharResult res;
    int k = static_cast<int>(free.size()) + 1;
    Real noise = noise_level(ctx);
    Real tol = ctx.tolerance();
    Real prev = -1;
    for (int it = 0; it < cap; ++it) {
      std::vector<Real> F(k);
      Matrix<Real> DF(k, k);
      fill(z, y, F, DF);
      LU<Real> lu(DF);
      // residual test first: a singular solution would otherwise drift along the kernel
      bool tiny = it > 0 && norm_inf(F) <= tol * (1 + abs(z) + norm_inf(y));
      if (lu.singular) {
        res.regular = false;
        if (tiny) { res.status = CharResult::Status::Converged; break; }
        res.status = CharResult::Status::Diverged;
        res.reason = "singular Newton matrix";
        break;
      }
      std::vector<Real> neg(k);
      for (int i = 0; i < k; ++i) neg[i] = -F[i];
      auto d = lu.solve(neg);
      Real norm = norm_inf(d);
      bool all_finite = true;
      for (const auto& x : d) all_finite = all_finite && finite(x);
      if (!all_finite) { res.status = CharResult::Status::Diverged; res.reason = "non-finite iterate"; break; }
      res.step_norm = norm;
      if (tiny) {
        res.status = CharResult::Status::Converged;
        res.regular = norm <= noise * (1 + abs(z) + norm_inf(y));
        break;
      }
      z += d[0];
      for (std::size_t i = 0; i < free.size(); ++i) y[free[i]] += d[i + 1];
      res.iterations = it + 1;
      res.z_history.push_back(z);
      Real scale = 1 + abs(z) + norm_inf(y);
      if (norm <= tol * scale || (norm <= noise * scale && prev >= 0 && norm * 4 > prev)) {
        res.status = CharResult::Status::Converged;
        break;
      }
      prev = norm;
      if (it + 1 == cap) { res.status = CharResult::Status::Diverged; res.reason = "iteration cap"; }
    }
    res.z = z;
    res.y = y;
    return res;
  }
};

bool nonnegative_inside(const AnalyticSystem& A, const Real& z, const std::vector<Real>& y,
                        const std::vector<int>& free, Real noise, std::string& why) {
  if (z <= 0) { why = "nonpositive z"; return false; }
  for (int i : free)
    if (y[i] < -noise) { why = "negative coordinate"; return false; }
  DomainStatus st;
  A.H(z, y, &st);
  if (!st.inside()) { why = "outside the domain"; return false; }
  return true;
}

}  // namespace

CharResult newton_char(const AnalyticSystem& A, const std::vector<int>& component, bool linear, const Real& z0,
                       const std::vector<Real>& y0, const PrecisionContext& ctx, int cap) {
  int n = A.dim();
  std::vector<bool> in_c(n, false);
  for (int c : component) in_c[c] = true;
  std::vector<int> free;
  for (int i = 0; i < n; ++i)
    if (!linear || !in_c[i]) free.push_back(i);
  std::vector<Real> y = y0;
  if (linear)
    for (int c : component) y[c] = 0;

  auto fill = [&](const Real& z, const std::vector<Real>& yy, std::vector<Real>& F, Matrix<Real>& DF) {
    int k = static_cast<int>(free.size());
    auto h = A.H(z, yy);
    auto J = A.jacobian(z, yy);
    auto hz = A.dz(z, yy);
    for (int r = 0; r < k; ++r) {
      int i = free[r];
      F[r] = yy[i] - h[i];
      DF(r, 0) = -hz[i];
      for (int c = 0; c < k; ++c) DF(r, c + 1) = (r == c ? Real(1) : Real(0)) - J(i, free[c]);
    }
    // determinant row, differentiated along z and along each free coordinate
    std::vector<Real> dy(n, Real(0));
    auto det_along = [&](const Real& dz) {
      auto JD = A.jacobian_directional(z, yy, dz, dy);
      int m = static_cast<int>(component.size());
      Matrix<Dual<Real>> S(m, m);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) S(a, b) = Dual<Real>(a == b ? Real(1) : Real(0)) - JD(component[a], component[b]);
      return determinant(S);
    };
    auto dzdet = det_along(Real(1));
    F[k] = dzdet.v;
    DF(k, 0) = dzdet.d;
    for (int c = 0; c < k; ++c) {
      dy[free[c]] = 1;
      DF(k, c + 1) = det_along(Real(0)).d;
      dy[free[c]] = 0;
    }
  };

  Solver s{A, ctx, cap};
  CharResult res = s.run(free, z0, y, fill);
  if (!res.ok()) return res;
  std::string why;
  Real noise = noise_level(ctx);
  if (!nonnegative_inside(A, res.z, res.y, free, noise, why)) {
    res.status = CharResult::Status::Rejected;
    res.reason = why;
    return res;
  }
  auto P = dominant_eigenvalue(submatrix(A.jacobian(res.z, res.y), component), ctx);
  res.lambda = P.lambda;
  if (abs(P.lambda - 1) > noise * 16) {
    res.status = CharResult::Status::Rejected;
    res.reason = "Perron root " + to_string(P.lambda, 20) + " != 1";
  }
  return res;
}

CharResult newton_u_eq_1(const AnalyticSystem& A, int coord, const Real& z0, const std::vector<Real>& y0,
                         const PrecisionContext& ctx, int cap) {
  int n = A.dim();
  std::vector<int> free(n);
  for (int i = 0; i < n; ++i) free[i] = i;
  auto fill = [&](const Real& z, const std::vector<Real>& yy, std::vector<Real>& F, Matrix<Real>& DF) {
    auto h = A.H(z, yy);
    auto J = A.jacobian(z, yy);
    auto hz = A.dz(z, yy);
    for (int i = 0; i < n; ++i) {
      F[i] = yy[i] - h[i];
      DF(i, 0) = -hz[i];
      for (int j = 0; j < n; ++j) DF(i, j + 1) = (i == j ? Real(1) : Real(0)) - J(i, j);
    }
    std::vector<Dual<Real>> yd(n);
    for (int j = 0; j < n; ++j) yd[j] = Dual<Real>(yy[j]);
    auto uz = A.coordinate(coord, Dual<Real>(z, Real(1)), yd);
    F[n] = uz.v - 1;
    DF(n, 0) = uz.d;
    for (int j = 0; j < n; ++j) {
      yd[j].d = 1;
      DF(n, j + 1) = A.coordinate(coord, Dual<Real>(z), yd).d;
      yd[j].d = 0;
    }
  };
  Solver s{A, ctx, cap};
  CharResult res = s.run(free, z0, y0, fill);
  if (!res.ok()) return res;
  std::string why;
  if (!nonnegative_inside(A, res.z, res.y, free, noise_level(ctx), why)) {
    res.status = CharResult::Status::Rejected;
    res.reason = why;
    return res;
  }
  auto J = A.jacobian(res.z, res.y);
  auto P = dominant_eigenvalue(J, ctx);
  res.lambda = P.lambda;
  if (compare_perron_to_one(J, ctx) >= 0) {
    res.status = CharResult::Status::Rejected;
    res.reason = "Perron root not below 1";
  }
  return res;
}

}  // namespace combasym
