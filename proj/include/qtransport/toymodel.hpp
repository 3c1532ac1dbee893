#pragma once

#include "qtransport/liouvillian.hpp"

#include <stdexcept>

/// Two emitters on separate reservoirs (hot n_h on site 0, cold n_B on
/// site 1) sharing a collective channel at n_B, with no hopping and no drive.
namespace qtransport::toy {

struct ToyParams {
  double n_h = 0.0;
  double n_b = 0.0;
  double gamma_nl = 0.0;  // units of gamma0, in [0, 1)

  void validate() const;
};

class SingularParameters : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Denominator polynomial of the closed-form coherence (gamma0 = 1).
double denominator(const ToyParams& p);

/// c = gamma_nl (1 + n_h + n_B)(n_B - n_h) / (2 F); real.
double coherence_closed_form(const ToyParams& p);

/// Same coherence from the assembled generator and the sparse steady-state solve.
double coherence_numeric(const ToyParams& p);

/// Two-site coupling table and assembly options of the toy model.
CouplingTable coupling_table(const ToyParams& p);
AssemblyOptions assembly_options(const ToyParams& p);

struct Optimum {
  double n_h = 0.0;
  double coherence = 0.0;
};

/// Maximizer of |c| over n_h >= 0, located to `tol` in n_h. Throws
/// std::runtime_error when |c| has no interior maximum.
Optimum optimal_hot_occupation(double n_b, double gamma_nl, double tol = 1e-8);

}  // namespace qtransport::toy
