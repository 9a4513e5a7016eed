#pragma once

#include <vector>

#include "liees/dither.hpp"
#include "liees/lie.hpp"
#include "liees/system.hpp"

namespace liees {

/// Element of the tensor algebra over n letters truncated at depth.
/// Words are stored time-ordered: the first letter is the earliest.
struct TruncatedTensor {
  int letters = 1;
  int depth = 0;
  std::vector<std::vector<double>> level;  // level[l] has letters^l entries

  TruncatedTensor() = default;
  TruncatedTensor(int letters, int depth);

  static TruncatedTensor unit(int letters, int depth);
  /// Word given 1-based, time-ordered.
  double& at(const std::vector<int>& word);
  double at(const std::vector<int>& word) const;
  double max_abs_difference(const TruncatedTensor& other) const;
};

TruncatedTensor operator+(const TruncatedTensor& a, const TruncatedTensor& b);
TruncatedTensor operator-(const TruncatedTensor& a, const TruncatedTensor& b);
TruncatedTensor operator*(double s, const TruncatedTensor& a);
TruncatedTensor operator*(const TruncatedTensor& a, const TruncatedTensor& b);
/// log(1 + X) for an element with unit constant term.
TruncatedTensor tensor_log(const TruncatedTensor& a);
TruncatedTensor tensor_exp(const TruncatedTensor& a);

/// Tensor expansion of a right-iterated bracket: [a,b] = ab - ba.
TruncatedTensor bracket_tensor(const BracketIndex& idx, int letters, int depth);

/// Basis of right-iterated brackets, level by level, chosen greedily among
/// indices with i1 < i2 first, then i1 > i2, in lexicographic order.
const std::vector<BracketIndex>& lie_basis(int letters, int depth);

/// Iterated integrals of the dithers over one period.
struct Signature {
  int depth = 0;
  int channels = 0;
  double epsilon = 1.0;
  std::vector<double> exponents;  // amplitude exponent p per channel
  int quadrature_steps = 0;
  TruncatedTensor tensor;

  /// int_0^eps int_0^{s1} .. u_{i1}(s1) .. u_{il}(sl): i1 is the latest time.
  double entry(const std::vector<int>& word) const;
  /// Same integral indexed with the earliest letter first.
  double time_ordered(const std::vector<int>& word) const;
};

/// quadrature_steps = 0 picks 8192 samples per fastest harmonic, or the
/// value of LIEES_QUAD_STEPS when set.
Signature compute_signature(const std::vector<DitherSpec>& dithers, int depth,
                            int quadrature_steps = 0);
int default_quadrature_steps(const std::vector<DitherSpec>& dithers);

struct BracketCoefficient {
  BracketIndex index;
  double value = 0.0;       // coefficient in the log-signature
  double per_period = 0.0;  // value / eps
  double epsilon_order = 1.0;  // value scales like eps^epsilon_order
  double scale_free = 0.0;     // value / eps^epsilon_order
};

struct BracketCoefficients {
  double epsilon = 1.0;
  int depth = 0;
  std::vector<BracketCoefficient> items;
  /// Largest deviation of the log from the span of the basis.
  double projection_residual = 0.0;

  const BracketCoefficient* find(const BracketIndex& idx) const;
};

BracketCoefficients log_signature(const Signature& sig);

struct ExcitationReport {
  std::vector<BracketIndex> targets;
  std::vector<double> target_coeffs;  // scale-free
  double target_coeff = 0.0;          // first target
  double max_offtarget = 0.0;         // among brackets of order up to the target's
  BracketIndex worst_offtarget;
  double max_remainder = 0.0;  // brackets of higher eps order, reported only
  BracketIndex worst_remainder;
  double tol = 0.0;
  bool ok = false;
};

ExcitationReport verify_excitation(const std::vector<DitherSpec>& dithers,
                                   const BracketIndex& target, double tol,
                                   int quadrature_steps = 0);
ExcitationReport verify_excitation(const std::vector<DitherSpec>& dithers,
                                   const std::vector<BracketIndex>& targets, double tol,
                                   int quadrature_steps = 0);

/// x0 plus every bracket up to the given length weighted by its log-signature
/// coefficient: the truncated one-period map.
double endpoint_prediction(const ESSystem& system, double x0, int order);
double endpoint_prediction(const ESSystem& system, const BracketCoefficients& coeffs, double x0,
                           int order);

}  // namespace liees
