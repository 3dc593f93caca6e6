#pragma once

#include <string>
#include <vector>

#include "combasym/analytic.hpp"

namespace combasym {

struct KantorovichCertificate {
  bool valid = false;
  std::string reason;  // why it is not valid
  Real r = 0;          // 2 * |step|_inf
  Real test = 0;       // r * |(I - J(a,y))^-1 hessrows(a, y + r)|_inf
  Real kappa = Real("0.8165");
  Real bound = 0;      // kappa * r
};

struct ValueResult {
  enum class Kind { Converged, AboveRadius, Inconclusive };
  enum class Reason { None, Decreasing, OutsideDomain, Lambda };
  Kind kind = Kind::Inconclusive;
  Reason reason = Reason::None;
  std::vector<Real> y;
  bool certified = false;
  KantorovichCertificate certificate;
  int steps = 0;
  Real step_norm = 0;
  std::vector<std::vector<Real>> history;  // iterates, starting from 0

  bool converged() const { return kind == Kind::Converged; }
  bool above() const { return kind == Kind::AboveRadius; }
};

std::string to_string(ValueResult::Kind k);
std::string to_string(ValueResult::Reason r);

// Newton iteration from 0 for Y = H(a, Y). cap <= 0 scales with precision: near the radius the
// iterates only halve their distance for about bits/4 steps before turning quadratic.
ValueResult newton_value(const AnalyticSystem& A, const Real& a, const PrecisionContext& ctx, int cap = 0);

// Newton step at y (the correction, not the new iterate); empty if I - J is singular.
std::vector<Real> newton_step(const AnalyticSystem& A, const Real& a, const std::vector<Real>& y);

KantorovichCertificate kantorovich_certify(const AnalyticSystem& A, const Real& a, const std::vector<Real>& y,
                                           const PrecisionContext& ctx);

struct CharResult {
  enum class Status { Converged, Diverged, Rejected };
  Status status = Status::Diverged;
  std::string reason;
  Real z = 0;
  std::vector<Real> y;  // all unknowns of the analytic system (component entries unset when linear)
  Real lambda = 0;
  int iterations = 0;
  std::vector<Real> z_history;
  Real step_norm = 0;    // norm of the last Newton correction
  bool regular = true;   // Newton matrix nonsingular at the returned point

  bool ok() const { return status == Status::Converged; }
};

// Newton on {Y = H(z, Y), det(I - dH_C/dY_C) = 0}; `component` lists unknown
// positions of the irreducible block. For a linear block only the other
// unknowns are solved together with z.
CharResult newton_char(const AnalyticSystem& A, const std::vector<int>& component, bool linear, const Real& z0,
                       const std::vector<Real>& y0, const PrecisionContext& ctx, int cap = 100);

// Newton on {Y = H(z, Y), value of `coord` = 1}.
CharResult newton_u_eq_1(const AnalyticSystem& A, int coord, const Real& z0, const std::vector<Real>& y0,
                         const PrecisionContext& ctx, int cap = 100);

// det(I - J_CC) at (z, y).
Real char_determinant(const AnalyticSystem& A, const std::vector<int>& component, const Real& z,
                      const std::vector<Real>& y);

Matrix<Real> submatrix(const Matrix<Real>& M, const std::vector<int>& idx);

}  // namespace combasym
