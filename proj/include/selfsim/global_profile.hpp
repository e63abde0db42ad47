#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "selfsim/far_field.hpp"
#include "selfsim/sampled_profile.hpp"
#include "selfsim/singular_expansion.hpp"

namespace selfsim {

enum class DecayClass { generic_a_minus_one_third, tuned_a_minus_four_thirds };

std::string_view to_string(DecayClass d) noexcept;

struct GlueParams {
  double q0 = 0, q1 = 0, q2 = 0;
  double qt1 = 0, qt2 = 0;
  double m1 = 0, m2 = 0;
  std::optional<double> ell;
  double newton_residual_half = 0;
  double newton_residual_two = 0;
  double coeff_one_third = 0;    // lim a^{1/3} Q
  double coeff_four_thirds = 0;  // next coefficient of a^{1/3} Q in powers of 1/a
};

using ProfilePiece = std::variant<SampledProfile, SingularExpansion, FarField>;

struct GlobalPiece {
  double lo, hi;
  std::string label;
  ProfilePiece piece;
};

/// Piecewise profile on [0, ∞), pieces ordered by a.  At a shared endpoint the left
/// piece is used for a < 1 and the right piece for a > 1; Q(1) is the common cone value.
class GlobalProfile {
 public:
  GlobalProfile() = default;
  GlobalProfile(std::vector<GlobalPiece> pieces, GlueParams params, Sign sign, DecayClass decay);

  double value(double a) const;
  Jet<double> jet(double a) const;
  /// Limits of Q at a = 1 from the left and from the right.
  double cone_value_left() const;
  double cone_value_right() const;

  /// For a in a near-cone piece, that expansion; nullptr otherwise.
  const SingularExpansion* expansion_at(double a) const;
  /// |ΔQ| and |ΔQ'| across each internal interface other than a = 1, and |ΔQ| at a = 1.
  std::vector<std::pair<double, std::array<double, 2>>> interface_jumps() const;

  const std::vector<GlobalPiece>& pieces() const { return pieces_; }
  const GlueParams& params() const { return params_; }
  Sign sign() const { return sign_; }
  DecayClass decay_class() const { return decay_; }
  double outer_anchor() const;
  bool has_far_field() const;

 private:
  const GlobalPiece& piece_at(double a) const;
  std::vector<GlobalPiece> pieces_;
  GlueParams params_;
  Sign sign_ = Sign::defocusing;
  DecayClass decay_ = DecayClass::generic_a_minus_one_third;
};

}  // namespace selfsim
