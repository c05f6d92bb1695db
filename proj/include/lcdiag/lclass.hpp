#pragma once

#include <stdexcept>

#include "lcdiag/interval.hpp"
#include "lcdiag/prepared.hpp"

namespace lcdiag {

// Raised when a computation exceeds a configured cap (CLI exit code 3).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Verdict1D {
  bool integrable = false;
  bool bounded = false;
};

/// t^alpha (log t)^beta on (0,1): integrable iff alpha > -1; bounded iff
/// alpha > 0, or alpha = beta = 0.
Verdict1D classify_monomial_1d(const Rat& alpha, unsigned beta);

/// y^alpha (log y)^beta on an l-rectilinear fiber: only coordinates after l
/// matter, componentwise.
Verdict1D classify_rect(const std::vector<Rat>& alpha,
                        const std::vector<unsigned>& beta, std::size_t l);

/// The open interval of finite p, plus the isolated infinity flag, for a
/// piece with critical profiles pf (of f) and pmu (of the measure weight),
/// Jacobian monomial exponents gamma, and measure exponent q.
PInterval lc_interval(const CriticalProfile& pf, const CriticalProfile& pmu,
                      const std::vector<Rat>& gamma, const Rat& q,
                      bool f_empty, bool mu_empty);

// One piece of the common-base decomposition: prepared sums for f and the
// measure weight, plus the piece's Jacobian monomial exponents.
struct DiagramPiece {
  PreparedSum f;
  PreparedSum mu;
  std::vector<Rat> gamma;  // length n
};

// Which critical groups are declared identically-zero-at-x, per piece.
struct VanishConfig {
  struct PerPiece {
    std::vector<std::string> f_vanish;
    std::vector<std::string> mu_vanish;
  };
  std::vector<PerPiece> pieces;
  bool operator==(const VanishConfig& o) const;
};

// An atom "group <label> of <f|mu> on piece <piece> vanishes identically".
struct Atom {
  std::size_t piece = 0;
  bool mu = false;
  std::string label;
  bool operator==(const Atom& o) const {
    return piece == o.piece && mu == o.mu && label == o.label;
  }
};

// Conjunction of atoms and negated atoms (one literal per critical group).
struct Conj {
  std::vector<std::pair<Atom, bool>> lits;  // bool = vanishes
};

// Disjunction of conjunctions.
struct Formula {
  std::vector<Conj> disjuncts;
};

struct DiagramEntry {
  PInterval interval;
  std::vector<VanishConfig> configs;
  std::vector<bool> feasible;  // parallel to configs, sampled
  Formula locus;               // one conjunction per config
};

struct Diagram {
  Rat q;
  std::size_t config_cap = 1u << 16;
  std::vector<DiagramEntry> entries;
};

/// Enumerates all vanish-configurations over the generic critical labels of
/// every piece, computes each configuration's interval, and groups
/// configurations by interval. Feasibility of each configuration is probed
/// by sampling base points (seeded). Throws ResourceError beyond the cap.
Diagram assemble_diagram(const std::vector<DiagramPiece>& pieces, const Rat& q,
                         std::size_t config_cap = 1u << 16,
                         unsigned seed = 0);

/// Disjunction of the loci of all intervals containing p (infinite = true
/// queries the isolated-infinity flag).
Formula int_p_locus(const Diagram& d, const Rat& p, bool infinite = false);

/// The unique interval of a configuration. Throws std::invalid_argument for
/// configurations the diagram does not know.
PInterval lebesgue_set_at(const Diagram& d, const VanishConfig& config);

struct ComplexReduction {
  PreparedSum f_squared;
  PreparedSum mu_squared;
  // Membership rule: p in LC of the complex problem at exponent q iff p/2
  // lies in the diagram of (f_squared, mu_squared) at exponent q/2.
  Rat p_scale{1, 2};
  Rat q_scale{1, 2};
};

/// Squares |f| = sqrt(f_re^2 + f_im^2) and |mu| termwise (identity beta
/// only), reducing the complex-valued problem to a real one at halved
/// exponents.
ComplexReduction complex_reduce(const PreparedSum& f_re,
                                const PreparedSum& f_im,
                                const PreparedSum& mu_re,
                                const PreparedSum& mu_im);

/// Termwise product of two prepared sums on the same cell (identity beta).
PreparedSum prepared_product(const PreparedSum& a, const PreparedSum& b);

}  // namespace lcdiag
