#pragma once

#include <functional>
#include <string>
#include <vector>

#include "liees/error.hpp"

namespace liees {

enum class DitherKind {
  first12,        // excites [1,2]
  second122,      // excites [[1,2],2]
  second122_abs,  // literal |cos| variant of second122, kept for comparison
  third1222,      // excites [[[1,2],2],2]
  classic,        // 2 sqrt(pi/eps) (cos, sin)(2 pi t / eps)
  triple123,      // three channels exciting [[1,2],3]
  custom_harmonic,
};

const char* to_string(DitherKind kind) noexcept;
DitherKind dither_kind_from_string(const std::string& name);

struct Harmonic {
  int multiplier = 1;  // frequency in units of 1/eps
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

/// One eps-periodic input channel u(t) = eps^(-p) v(t/eps).
struct DitherSpec {
  DitherKind kind = DitherKind::first12;
  int channel = 1;
  int kappa = 1;
  double epsilon = 1.0;
  std::vector<Harmonic> harmonics;  // custom_harmonic only
  int custom_length = 2;            // bracket length N used for p = 1 - 1/N

  static DitherSpec make(DitherKind kind, int channel, int kappa, double epsilon);
  static DitherSpec custom(std::vector<Harmonic> harmonics, int bracket_length,
                           double epsilon);
};

/// Throws invalid-parameter on an inconsistent spec.
void validate(const DitherSpec& spec);

int bracket_length(const DitherSpec& spec);
/// p in u = eps^(-p) v(t/eps); equals 1 - 1/N.
double amplitude_exponent(const DitherSpec& spec);
/// Highest frequency multiplier present in the waveform.
int fastest_harmonic(const DitherSpec& spec);
/// Number of channels of the kind's family.
int channel_count(DitherKind kind);

/// v(tau) on the unit period, before eps scaling.
double unit_waveform(const DitherSpec& spec, double tau);
double eval_dither(const DitherSpec& spec, double t);

/// Composite Simpson mean over [0, eps].
double period_mean(const DitherSpec& spec, int quadrature_steps);
double period_mean(const std::function<double(double)>& f, double period, int quadrature_steps);

/// All channels of one kind sharing kappa and eps.
std::vector<DitherSpec> dither_family(DitherKind kind, int kappa, double epsilon);

struct ResonanceViolation {
  int a = 0;
  int b = 0;
  int n1 = 0;
  int n2 = 0;
  int order() const { return (n1 < 0 ? -n1 : n1) + (n2 < 0 ? -n2 : n2); }
};

struct ResonanceReport {
  std::vector<std::pair<int, int>> pairs;
  std::vector<ResonanceViolation> violations;
  bool ok = true;
  std::string describe() const;
};

/// Integer relations n1 a + n2 b = 0 with 1 <= |n1|+|n2| <= max_order.
ResonanceReport check_resonances(const std::vector<int>& freqs_a,
                                 const std::vector<int>& freqs_b, int max_order = 4);

}  // namespace liees
