#pragma once

#include <optional>
#include <vector>

#include "chandiv/channel.hpp"
#include "chandiv/lindblad.hpp"

namespace chandiv {

/// Which side the Markovian factor sits on.
///  Left:  E = e^L o E_boundary, family F_t = e^{-tL} E
///  Right: E = E_boundary o e^L, family F_t = E e^{-tL}
enum class Side { Left, Right };

struct LbOptions {
  std::optional<double> t_max;  ///< scan horizon; derived from the bracket hint when absent
  Side side = Side::Left;
  int scan_steps = 1024;
};

struct LBDecomposition {
  LindbladGenerator generator;  ///< already scaled: e^{generator} is the Markovian factor
  ChannelRep boundary;
  double t_min;
  double min_choi_eig_at_tmin;
  double bracket_hint;  ///< t' used to size the scan (0 when none applied)
  Side side = Side::Left;

  ChannelRep markov_factor() const { return exp_generator(generator, 1.0); }
  /// markov o boundary (Left) or boundary o markov (Right)
  ChannelRep recompose() const;
};

/// Finds the first t > 0 at which the Choi matrix of F_t loses positivity and
/// splits the channel there. An input already on the boundary returns t_min = 0.
///
/// Throws NotCompletelyPositive for non-CP input, DegenerateFamily when F_t does
/// not depend on t, NoCrossing when F_t stays CP over the whole horizon.
LBDecomposition lb_decompose(const ChannelRep& e, const LindbladGenerator& g, const Tolerances& tol = {},
                             const LbOptions& opts = {});

struct GeneratorChoice {
  LindbladGenerator generator;
  double bracket_hint;  ///< t' from the determinant or the psi-population argument
  bool singular;
};

/// Purely dissipative generator used by lb_decompose_auto: the isotropic
/// depolarizing generator for invertible channels, L_psi otherwise.
/// Throws UnitaryInput for Kraus rank one.
GeneratorChoice select_generator(const ChannelRep& e, const Tolerances& tol = {});

LBDecomposition lb_decompose_auto(const ChannelRep& e, const Tolerances& tol = {});

struct ScanSample {
  double t;
  double min_choi_eig;
  double det;
  bool is_cp;
};

/// steps samples of F_t on the uniform grid 0 .. t_max (endpoints included).
std::vector<ScanSample> crossing_scan(const ChannelRep& e, const LindbladGenerator& g, double t_max, int steps,
                                      Side side = Side::Left, const Tolerances& tol = {});

/// ||recompose - e||_F on the superoperators.
double recomposition_error(const ChannelRep& e, const LBDecomposition& dec);

}  // namespace chandiv
