#pragma once

// Directions, arrow sets, site laws and environment laws on Z^2, the model
// catalog, and the structural checks (unstuck criterion, renewal direction).

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rwdre/error.hpp"

namespace rwdre {

inline constexpr double kProbabilityTolerance = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double operator[](std::size_t i) const { return i == 0 ? x : y; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// e1 = East = +x, e2 = North = +y.
enum class Direction : std::uint8_t { kEast = 0, kWest = 1, kNorth = 2, kSouth = 3 };

inline constexpr std::array<Direction, 4> kAllDirections = {
    Direction::kEast, Direction::kWest, Direction::kNorth, Direction::kSouth};

struct Offset {
  int dx;
  int dy;
  friend bool operator==(const Offset&, const Offset&) = default;
};

constexpr Offset offset(Direction d) {
  switch (d) {
    case Direction::kEast:
      return {1, 0};
    case Direction::kWest:
      return {-1, 0};
    case Direction::kNorth:
      return {0, 1};
    case Direction::kSouth:
      return {0, -1};
  }
  return {0, 0};
}

constexpr Direction opposite(Direction d) {
  switch (d) {
    case Direction::kEast:
      return Direction::kWest;
    case Direction::kWest:
      return Direction::kEast;
    case Direction::kNorth:
      return Direction::kSouth;
    case Direction::kSouth:
      return Direction::kNorth;
  }
  return d;
}

constexpr char direction_letter(Direction d) {
  constexpr std::array<char, 4> letters = {'E', 'W', 'N', 'S'};
  return letters[static_cast<std::size_t>(d)];
}

constexpr std::size_t index_of(Direction d) { return static_cast<std::size_t>(d); }

// Subset of the four unit steps, stored as a 4-bit mask.
class ArrowSet {
 public:
  constexpr ArrowSet() = default;
  constexpr ArrowSet(std::initializer_list<Direction> dirs) {
    for (Direction d : dirs) insert(d);
  }
  static constexpr ArrowSet from_mask(std::uint8_t mask) {
    ArrowSet s;
    s.mask_ = mask & 0x0F;
    return s;
  }

  constexpr void insert(Direction d) { mask_ |= bit(d); }
  constexpr bool contains(Direction d) const { return (mask_ & bit(d)) != 0; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr std::uint8_t mask() const { return mask_; }
  constexpr int size() const {
    int n = 0;
    for (Direction d : kAllDirections) n += contains(d) ? 1 : 0;
    return n;
  }
  constexpr bool intersects(ArrowSet other) const { return (mask_ & other.mask_) != 0; }

  friend constexpr bool operator==(ArrowSet, ArrowSet) = default;

 private:
  static constexpr std::uint8_t bit(Direction d) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(d));
  }
  std::uint8_t mask_ = 0;
};

// Letters in N, S, E, W order, e.g. "NE", "SWE", "NSEW".
inline std::string to_string(ArrowSet s) {
  std::string out;
  for (Direction d : {Direction::kNorth, Direction::kSouth, Direction::kEast, Direction::kWest}) {
    if (s.contains(d)) out.push_back(direction_letter(d));
  }
  return out.empty() ? "-" : out;
}

// One probability vector over the four unit steps.
class SiteLaw {
 public:
  SiteLaw() = default;

  // Weights indexed by Direction. Throws InvalidInput unless they are
  // nonnegative and sum to one.
  explicit SiteLaw(std::array<double, 4> weights) : weights_(weights) {
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("site law weight must be finite and >= 0");
      total += w;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      throw InvalidInput("site law weights must sum to 1");
    }
  }

  static SiteLaw from_pairs(std::initializer_list<std::pair<Direction, double>> pairs) {
    std::array<double, 4> w{};
    for (const auto& [d, p] : pairs) w[index_of(d)] += p;
    return SiteLaw(w);
  }

  double weight(Direction d) const { return weights_[index_of(d)]; }
  const std::array<double, 4>& weights() const { return weights_; }

  ArrowSet support() const {
    ArrowSet s;
    for (Direction d : kAllDirections) {
      if (weight(d) > 0.0) s.insert(d);
    }
    return s;
  }

  // Mean one-step displacement.
  Vec2 drift() const {
    Vec2 v;
    for (Direction d : kAllDirections) {
      v.x += weight(d) * offset(d).dx;
      v.y += weight(d) * offset(d).dy;
    }
    return v;
  }

  friend bool operator==(const SiteLaw&, const SiteLaw&) = default;

 private:
  std::array<double, 4> weights_{};
};

inline SiteLaw uniform_site_law(ArrowSet arrows) {
  if (arrows.empty()) throw InvalidInput("uniform_site_law: empty arrow set");
  const double w = 1.0 / arrows.size();
  std::array<double, 4> weights{};
  for (Direction d : kAllDirections) {
    if (arrows.contains(d)) weights[index_of(d)] = w;
  }
  return SiteLaw(weights);
}

struct Atom {
  SiteLaw law;
  double probability = 0.0;
  std::string label;
};

// The distribution mu of a single site law: finitely many atoms.
class EnvironmentLaw {
 public:
  explicit EnvironmentLaw(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw InvalidInput("environment law needs at least one atom");
    double total = 0.0;
    for (const Atom& a : atoms_) {
      if (!(a.probability > 0.0 && a.probability <= 1.0)) {
        throw InvalidInput("atom probabilities must lie in (0,1]");
      }
      total += a.probability;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      throw InvalidInput("atom probabilities must sum to 1");
    }
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }

  bool is_two_valued() const { return atoms_.size() == 2; }

  // Probability that direction d is an available arrow at a site.
  double arrow_probability(Direction d) const {
    double p = 0.0;
    for (const Atom& a : atoms_) {
      if (a.law.support().contains(d)) p += a.probability;
    }
    return p;
  }

 private:
  std::vector<Atom> atoms_;
};

// True iff some orthogonal set V (a singleton, or one horizontal plus one
// vertical unit vector) meets the arrow set of every atom.
inline bool check_unstuck(const EnvironmentLaw& law) {
  std::vector<ArrowSet> candidates;
  for (Direction d : kAllDirections) candidates.push_back(ArrowSet{d});
  for (Direction h : {Direction::kEast, Direction::kWest}) {
    for (Direction v : {Direction::kNorth, Direction::kSouth}) candidates.push_back(ArrowSet{h, v});
  }
  for (ArrowSet v : candidates) {
    bool hits_all = true;
    for (const Atom& a : law.atoms()) {
      if (!a.law.support().intersects(v)) {
        hits_all = false;
        break;
      }
    }
    if (hits_all) return true;
  }
  return false;
}

// A direction e with P(e available) > 0 and P(-e available) = 0, checked in
// the order N, S, E, W.
inline std::optional<Direction> renewal_direction(const EnvironmentLaw& law) {
  for (Direction d : {Direction::kNorth, Direction::kSouth, Direction::kEast, Direction::kWest}) {
    if (law.arrow_probability(d) > 0.0 && law.arrow_probability(opposite(d)) == 0.0) return d;
  }
  return std::nullopt;
}

// How the simulator cuts a trajectory into IID cycles.
//
// kDirection: a cycle ends with the first step in `direction`; the region
// ahead is unexplored, so cycles are IID.
//
// kAnchor: every atom is supported on one axis and atom `anchor_atom` is the
// deterministic law {direction}. Anchor sites are one-way barriers, so a
// cycle starts on an anchor site and ends on arrival at the next one.
struct RenewalScheme {
  enum class Kind { kDirection, kAnchor };
  Kind kind = Kind::kDirection;
  Direction direction = Direction::kNorth;
  std::size_t anchor_atom = 0;
};

inline std::optional<RenewalScheme> renewal_scheme(const EnvironmentLaw& law) {
  if (auto d = renewal_direction(law)) return RenewalScheme{RenewalScheme::Kind::kDirection, *d, 0};
  for (std::size_t i = 0; i < law.size(); ++i) {
    for (Direction d : kAllDirections) {
      if (law[i].law.weight(d) != 1.0) continue;
      const ArrowSet axis{d, opposite(d)};
      bool on_axis = true;
      for (const Atom& a : law.atoms()) {
        if ((a.law.support().mask() & ~axis.mask()) != 0) on_axis = false;
      }
      if (on_axis) return RenewalScheme{RenewalScheme::Kind::kAnchor, d, i};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Model catalog

enum class ModelKind {
  kUpRight,
  kUpDown,
  kLrUp,
  kLrRight,
  kLrUpdown,
  kNeUp,
  kNeNw,
  kNeLr,
  kNeLeft,
  kNeSw,
  kSweDown,
  kSweRight,
  kSweUp,
  kSweLr,
  kSweUpdown,
  kSweNe,
  kSweSw,
  kSweNse,
  kSweNwe,
  kNsewUp,
  kNsewNe,
  kNsewLr,
  kNsewSwe,
  kNeAlphaLeft,
  kNeAlphaBetaLeft,
};

enum class ClosedForm {
  kExact,     // explicit E[T] and velocity
  kSymmetry,  // v = (0,0) by symmetry, no E[T]
  kNone,      // simulation only
};

struct ModelSpec {
  ModelKind kind;
  std::string_view name;
  bool uses_alpha;
  bool uses_beta_q;
  ClosedForm closed_form;
};

inline constexpr std::array<ModelSpec, 25> kModelSpecs = {{
    {ModelKind::kUpRight, "UP_RIGHT", false, false, ClosedForm::kExact},
    {ModelKind::kUpDown, "UP_DOWN", false, false, ClosedForm::kNone},
    {ModelKind::kLrUp, "LR_UP", false, false, ClosedForm::kExact},
    {ModelKind::kLrRight, "LR_RIGHT", false, false, ClosedForm::kExact},
    {ModelKind::kLrUpdown, "LR_UPDOWN", false, false, ClosedForm::kSymmetry},
    {ModelKind::kNeUp, "NE_UP", false, false, ClosedForm::kExact},
    {ModelKind::kNeNw, "NE_NW", false, false, ClosedForm::kExact},
    {ModelKind::kNeLr, "NE_LR", false, false, ClosedForm::kExact},
    {ModelKind::kNeLeft, "NE_LEFT", false, false, ClosedForm::kExact},
    {ModelKind::kNeSw, "NE_SW", false, false, ClosedForm::kNone},
    {ModelKind::kSweDown, "SWE_DOWN", false, false, ClosedForm::kExact},
    {ModelKind::kSweRight, "SWE_RIGHT", false, false, ClosedForm::kExact},
    {ModelKind::kSweUp, "SWE_UP", false, false, ClosedForm::kNone},
    {ModelKind::kSweLr, "SWE_LR", false, false, ClosedForm::kNone},
    {ModelKind::kSweUpdown, "SWE_UPDOWN", false, false, ClosedForm::kNone},
    {ModelKind::kSweNe, "SWE_NE", false, false, ClosedForm::kNone},
    {ModelKind::kSweSw, "SWE_SW", false, false, ClosedForm::kExact},
    {ModelKind::kSweNse, "SWE_NSE", false, false, ClosedForm::kNone},
    {ModelKind::kSweNwe, "SWE_NWE", false, false, ClosedForm::kNone},
    {ModelKind::kNsewUp, "NSEW_UP", false, false, ClosedForm::kNone},
    {ModelKind::kNsewNe, "NSEW_NE", false, false, ClosedForm::kNone},
    {ModelKind::kNsewLr, "NSEW_LR", false, false, ClosedForm::kSymmetry},
    {ModelKind::kNsewSwe, "NSEW_SWE", false, false, ClosedForm::kNone},
    {ModelKind::kNeAlphaLeft, "NE_ALPHA_LEFT", true, false, ClosedForm::kExact},
    {ModelKind::kNeAlphaBetaLeft, "NE_ALPHA_BETA_LEFT", true, true, ClosedForm::kExact},
}};

inline const ModelSpec& model_spec(ModelKind kind) {
  for (const ModelSpec& s : kModelSpecs) {
    if (s.kind == kind) return s;
  }
  throw InvalidInput("unknown model kind");
}

inline std::string_view model_name(ModelKind kind) { return model_spec(kind).name; }

inline ModelKind parse_model_name(std::string_view name) {
  for (const ModelSpec& s : kModelSpecs) {
    if (s.name == name) return s.kind;
  }
  throw InvalidInput("unknown model name: " + std::string(name));
}

struct ModelParams {
  double p = 0.5;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> q;
};

// A catalog model with validated parameters: every parameter the model uses
// must be present and lie in the open interval (0,1).
class ModelId {
 public:
  ModelId(ModelKind kind, ModelParams params) : kind_(kind), params_(params) {
    const ModelSpec& spec = model_spec(kind);
    check_open_unit("p", params_.p);
    if (spec.uses_alpha) {
      if (!params_.alpha) throw InvalidInput(std::string(spec.name) + " requires alpha");
      check_open_unit("alpha", *params_.alpha);
    } else {
      params_.alpha.reset();
    }
    if (spec.uses_beta_q) {
      if (!params_.beta || !params_.q) throw InvalidInput(std::string(spec.name) + " requires beta and q");
      check_open_unit("beta", *params_.beta);
      check_open_unit("q", *params_.q);
    } else {
      params_.beta.reset();
      params_.q.reset();
    }
  }

  ModelId(std::string_view name, ModelParams params) : ModelId(parse_model_name(name), params) {}

  ModelKind kind() const { return kind_; }
  std::string_view name() const { return model_name(kind_); }
  const ModelParams& params() const { return params_; }
  double p() const { return params_.p; }
  double alpha() const { return params_.alpha.value(); }
  double beta() const { return params_.beta.value(); }
  double q() const { return params_.q.value(); }

 private:
  static void check_open_unit(const char* what, double v) {
    if (!(v > 0.0 && v < 1.0)) {
      throw InvalidInput(std::string("parameter ") + what + " must lie in (0,1)");
    }
  }

  ModelKind kind_;
  ModelParams params_;
};

namespace detail {

inline Atom uniform_atom(ArrowSet arrows, double probability) {
  return Atom{uniform_site_law(arrows), probability, to_string(arrows)};
}

inline Atom ne_alpha_atom(double alpha, double probability, const char* tag) {
  return Atom{SiteLaw::from_pairs({{Direction::kEast, alpha}, {Direction::kNorth, 1.0 - alpha}}), probability,
              std::string("NE_") + tag};
}

}  // namespace detail

// The environment law of a catalog model. In two-valued models the first
// atom has probability p.
inline EnvironmentLaw catalog(const ModelId& model) {
  using D = Direction;
  const double p = model.p();
  const ArrowSet up{D::kNorth}, down{D::kSouth}, right{D::kEast}, left{D::kWest};
  const ArrowSet lr{D::kEast, D::kWest}, ud{D::kNorth, D::kSouth};
  const ArrowSet ne{D::kNorth, D::kEast}, nw{D::kNorth, D::kWest}, sw{D::kSouth, D::kWest};
  const ArrowSet swe{D::kSouth, D::kWest, D::kEast};
  const ArrowSet nse{D::kNorth, D::kSouth, D::kEast}, nwe{D::kNorth, D::kWest, D::kEast};
  const ArrowSet nsew{D::kNorth, D::kSouth, D::kEast, D::kWest};

  auto pair = [p](ArrowSet first, ArrowSet second) {
    return EnvironmentLaw({detail::uniform_atom(first, p), detail::uniform_atom(second, 1.0 - p)});
  };

  switch (model.kind()) {
    case ModelKind::kUpRight:
      return pair(up, right);
    case ModelKind::kUpDown:
      return pair(up, down);
    case ModelKind::kLrUp:
      return pair(lr, up);
    case ModelKind::kLrRight:
      return pair(lr, right);
    case ModelKind::kLrUpdown:
      return pair(lr, ud);
    case ModelKind::kNeUp:
      return pair(ne, up);
    case ModelKind::kNeNw:
      return pair(ne, nw);
    case ModelKind::kNeLr:
      return pair(ne, lr);
    case ModelKind::kNeLeft:
      return pair(ne, left);
    case ModelKind::kNeSw:
      return pair(ne, sw);
    case ModelKind::kSweDown:
      return pair(swe, down);
    case ModelKind::kSweRight:
      return pair(swe, right);
    case ModelKind::kSweUp:
      return pair(swe, up);
    case ModelKind::kSweLr:
      return pair(swe, lr);
    case ModelKind::kSweUpdown:
      return pair(swe, ud);
    case ModelKind::kSweNe:
      return pair(swe, ne);
    case ModelKind::kSweSw:
      return pair(swe, sw);
    case ModelKind::kSweNse:
      return pair(swe, nse);
    case ModelKind::kSweNwe:
      return pair(swe, nwe);
    case ModelKind::kNsewUp:
      return pair(nsew, up);
    case ModelKind::kNsewNe:
      return pair(nsew, ne);
    case ModelKind::kNsewLr:
      return pair(nsew, lr);
    case ModelKind::kNsewSwe:
      return pair(nsew, swe);
    case ModelKind::kNeAlphaLeft:
      return EnvironmentLaw({detail::ne_alpha_atom(model.alpha(), p, "alpha"), detail::uniform_atom(left, 1.0 - p)});
    case ModelKind::kNeAlphaBetaLeft: {
      const double q = model.q();
      return EnvironmentLaw({detail::uniform_atom(left, p),
                             detail::ne_alpha_atom(model.alpha(), (1.0 - p) * q, "alpha"),
                             detail::ne_alpha_atom(model.beta(), (1.0 - p) * (1.0 - q), "beta")});
    }
  }
  throw InvalidInput("unknown model kind");
}

}  // namespace rwdre
