#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "lcdiag/lclass.hpp"
#include "lcdiag/rectilinear.hpp"
#include "lcdiag/series.hpp"

namespace lcdiag {

// Schema violation, reported with the JSON path of the offending field.
struct InstanceError : std::runtime_error {
  std::string path;
  InstanceError(std::string p, const std::string& msg)
      : std::runtime_error(p + ": " + msg), path(std::move(p)) {}
};

struct ClassifyQuery {
  // 1-d monomial queries and rectilinear multi-exponent queries.
  struct Mono {
    Rat alpha;
    unsigned beta = 0;
  };
  struct Rect {
    std::vector<Rat> alpha;
    std::vector<unsigned> beta;
    std::size_t l = 0;
  };
  std::vector<Mono> monomials;
  std::vector<Rect> rects;
};

struct CountexQuery {
  std::vector<Rat> x;  // fiber base points in (0,1)
  struct Candidate {
    std::string label;
    std::map<unsigned, TruncPoly> g;  // log-power -> poly in (x, x^t, x^(1-t))
    std::vector<Rat> t;               // curve parameters to probe
  };
  std::vector<Candidate> candidates;
};

struct Instance {
  Rat q{1};
  unsigned seed = 0;
  std::size_t config_cap = std::size_t(1) << 16;
  CrMode mode = CrMode::Generic;
  std::vector<std::vector<Rat>> points;  // sampled-mode / verify base points
  std::size_t samples = 100;             // verify sample budget

  std::vector<DiagramPiece> pieces;   // classify-sums / diagram / verify
  std::optional<MonCell> cell;        // rectilinearize
  std::optional<MonomialMap> map;     // rectilinearize (empty = none)
  std::optional<CoeffFamily> family;  // split / dickson
  std::optional<ClassifyQuery> classify;
  std::optional<CountexQuery> countex;
};

/// Parses and validates an instance document. Throws InstanceError with the
/// JSON path of the first violation.
Instance parse_instance(const std::string& bytes);

/// Canonical re-serialization (sorted keys); parse . serialize is the
/// identity up to field order and rational normalization.
nlohmann::json instance_to_json(const Instance& inst);

nlohmann::json diagram_to_json(const Diagram& d);
nlohmann::json pieces_to_json(const std::vector<RectPiece>& pieces);

/// Dispatches one CLI command. Throws InstanceError for unknown commands or
/// missing instance sections, and lets module errors (ResourceError,
/// StepRejected, std::invalid_argument, ...) propagate.
nlohmann::json run(const std::string& command, const Instance& inst);

}  // namespace lcdiag
