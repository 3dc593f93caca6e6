#pragma once

#include <memory>
#include <vector>

#include "combasym/linalg.hpp"
#include "combasym/normal.hpp"
#include "combasym/numeric.hpp"

namespace combasym {

enum class Domain { Inside, Boundary, Outside };

struct DomainStatus {
  Domain status = Domain::Inside;
  int witness = -1;  // coordinate whose Seq/Cyc argument left the unit disk
  bool inside() const { return status == Domain::Inside; }
};

// The system Y = H(z, Y) over a chosen set of unknown coordinates; every other
// coordinate reachable from them is evaluated by substitution.
class AnalyticSystem {
 public:
  // `targets` are further coordinates that `coordinate` must be able to evaluate.
  AnalyticSystem(const NormalSystem& sys, std::vector<int> unknowns, const std::vector<int>& targets = {});

  // Unknowns are the original identifiers (no auxiliaries).
  static AnalyticSystem reduced(const NormalSystem& sys);
  // Unknowns are the original identifiers among coords and everything they depend on.
  static AnalyticSystem closure(const NormalSystem& sys, const std::vector<int>& coords);

  int dim() const { return static_cast<int>(unknowns_.size()); }
  const std::vector<int>& unknowns() const { return unknowns_; }
  int position(int coord) const { return position_[coord]; }  // -1 when not an unknown
  const NormalSystem& normal() const { return *sys_; }
  // Rows `rows` of H are affine in the unknowns at positions `vars` (other unknowns held fixed).
  bool linear_in(const std::vector<int>& rows, const std::vector<int>& vars) const;

  // All normal coordinates needed: unknowns take y, the rest are substituted.
  template <class T>
  std::vector<T> values(const T& z, const std::vector<T>& y, DomainStatus* st = nullptr) const;
  template <class T>
  std::vector<T> H(const T& z, const std::vector<T>& y, DomainStatus* st = nullptr) const;
  template <class T>
  T coordinate(int coord, const T& z, const std::vector<T>& y) const;

  template <class T>
  Matrix<T> jacobian(const T& z, const std::vector<T>& y) const;
  template <class T>
  std::vector<T> dz(const T& z, const std::vector<T>& y) const;

  // 1^T Hess(H_i) 1 for every i.
  std::vector<Real> hessian_rowsums(const Real& z, const std::vector<Real>& y) const;
  // Jacobian together with its derivative along (dz, dy).
  Matrix<Dual<Real>> jacobian_directional(const Real& z, const std::vector<Real>& y, const Real& dz,
                                          const std::vector<Real>& dy) const;

 private:
  std::shared_ptr<const NormalSystem> sys_;
  std::vector<int> unknowns_;
  std::vector<int> position_;
  std::vector<int> order_;  // substituted coordinates, dependencies first

  template <class T>
  T apply(int coord, const T& z, const std::vector<T>& v, DomainStatus* st) const;
};

struct PerronResult {
  Real lambda = 0, lower = 0, upper = 0;
  std::vector<Real> vector;  // right eigenvector, max-normalized
  int iterations = 0;
  bool converged = true;
};

// Perron root of a nonnegative matrix: max over irreducible diagonal blocks,
// each by power iteration on M + I with Collatz-Wielandt bounds.
PerronResult dominant_eigenvalue(const Matrix<Real>& M, const PrecisionContext& ctx);

// -1, 0 or +1 as the Perron root is below, indistinguishable from, or above 1.
int compare_perron_to_one(const Matrix<Real>& M, const PrecisionContext& ctx);

unsigned current_bits();

}  // namespace combasym
