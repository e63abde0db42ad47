#include "selfsim/global_profile.hpp"

#include <cmath>
#include <sstream>

#include "selfsim/errors.hpp"

namespace selfsim {

std::string_view to_string(DecayClass d) noexcept {
  return d == DecayClass::generic_a_minus_one_third ? "generic_a_minus_one_third" : "tuned_a_minus_four_thirds";
}

GlobalProfile::GlobalProfile(std::vector<GlobalPiece> pieces, GlueParams params, Sign sign, DecayClass decay)
    : pieces_(std::move(pieces)), params_(params), sign_(sign), decay_(decay) {
  if (pieces_.empty()) throw Error("GlobalProfile: no pieces");
  for (std::size_t i = 1; i < pieces_.size(); ++i)
    if (pieces_[i].lo != pieces_[i - 1].hi) throw Error("GlobalProfile: pieces are not contiguous");
}

const GlobalPiece& GlobalProfile::piece_at(double a) const {
  if (!(a >= pieces_.front().lo) || !(a <= pieces_.back().hi)) {
    std::ostringstream os;
    os.precision(17);
    os << "GlobalProfile: a = " << a << " outside [" << pieces_.front().lo << ", " << pieces_.back().hi << "]";
    throw DomainError(os.str());
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const GlobalPiece& p = pieces_[i];
    const bool last = i + 1 == pieces_.size();
    if (a >= p.lo && (a < p.hi || (a == p.hi && (last || p.hi == 1.0)))) return p;
  }
  return pieces_.back();
}

double GlobalProfile::value(double a) const {
  const GlobalPiece& p = piece_at(a);
  return std::visit([a](const auto& x) { return x.value(a); }, p.piece);
}

Jet<double> GlobalProfile::jet(double a) const {
  const GlobalPiece& p = piece_at(a);
  return std::visit([a](const auto& x) { return x.jet(a); }, p.piece);
}

double GlobalProfile::cone_value_left() const {
  for (const auto& p : pieces_)
    if (p.hi == 1.0) return std::visit([](const auto& x) { return x.value(1.0); }, p.piece);
  throw Error("GlobalProfile: no piece ends at the cone");
}

double GlobalProfile::cone_value_right() const {
  for (const auto& p : pieces_)
    if (p.lo == 1.0) return std::visit([](const auto& x) { return x.value(1.0); }, p.piece);
  throw Error("GlobalProfile: no piece starts at the cone");
}

const SingularExpansion* GlobalProfile::expansion_at(double a) const {
  for (const auto& p : pieces_) {
    if (a < p.lo || a > p.hi) continue;
    if (const auto* e = std::get_if<SingularExpansion>(&p.piece)) {
      if ((a <= 1.0 && e->side() == ConeSide::left_of_cone) || (a >= 1.0 && e->side() == ConeSide::right_of_cone))
        return e;
    }
  }
  return nullptr;
}

std::vector<std::pair<double, std::array<double, 2>>> GlobalProfile::interface_jumps() const {
  std::vector<std::pair<double, std::array<double, 2>>> out;
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    const double x = pieces_[i].lo;
    const auto l = std::visit([x](const auto& p) { return p.jet(x); }, pieces_[i - 1].piece);
    const auto r = std::visit([x](const auto& p) { return p.jet(x); }, pieces_[i].piece);
    if (x == 1.0)
      out.push_back({x, {std::abs(l.value - r.value), 0.0}});
    else
      out.push_back({x, {std::abs(l.value - r.value), std::abs(l.d1 - r.d1)}});
  }
  return out;
}

double GlobalProfile::outer_anchor() const {
  for (const auto& p : pieces_)
    if (std::holds_alternative<FarField>(p.piece)) return p.lo;
  return pieces_.back().hi;
}

bool GlobalProfile::has_far_field() const {
  for (const auto& p : pieces_)
    if (std::holds_alternative<FarField>(p.piece)) return true;
  return false;
}

}  // namespace selfsim
