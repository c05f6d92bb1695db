#include "lcdiag/instance.hpp"

#include <algorithm>
#include <random>

#include "lcdiag/oracle.hpp"

namespace lcdiag {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw InstanceError(path, msg);
}

const json& need(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

Rat to_rat(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) {
    auto r = parse_rat(j.get<std::string>());
    if (r) return *r;
    fail(path, "malformed rational \"" + j.get<std::string>() + "\"");
  }
  fail(path, "expected a rational (integer or \"n/d\" string)");
}

unsigned long to_uint(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    fail(path, "expected a nonnegative integer");
  return j.get<unsigned long>();
}

std::vector<Rat> rat_vec(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rationals");
  std::vector<Rat> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(to_rat(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<unsigned> uint_vec(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of integers");
  std::vector<unsigned> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(unsigned(to_uint(j[i], path + "[" + std::to_string(i) + "]")));
  return out;
}

std::string rs(const Rat& r) { return rat_to_string(r); }

json rat_vec_json(const std::vector<Rat>& v) {
  json a = json::array();
  for (const auto& r : v) a.push_back(rs(r));
  return a;
}

// ---- prepared sums ---------------------------------------------------------

CoeffFn parse_coeff(const json& j, const std::string& path, std::size_t m,
                    std::size_t n) {
  if (!j.is_array()) fail(path, "expected an array of coefficient terms");
  CoeffFn c(m, n);
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string tp = path + "[" + std::to_string(t) + "]";
    const json& term = j[t];
    Expo e(2 * m + 2 * n, 0);
    auto xs = uint_vec(need(term, tp, "x"), tp + ".x");
    if (xs.size() != m) fail(tp + ".x", "expected " + std::to_string(m) + " exponents");
    for (std::size_t i = 0; i < m; ++i) e[c.x_var(i)] = xs[i];
    if (term.contains("y")) {
      auto ys = uint_vec(term["y"], tp + ".y");
      if (ys.size() != n) fail(tp + ".y", "expected " + std::to_string(n) + " exponents");
      for (std::size_t i = 0; i < n; ++i) e[c.y_var(i)] = ys[i];
    }
    c.add_term(e, to_rat(need(term, tp, "c"), tp + ".c"));
  }
  return c;
}

json coeff_json(const CoeffFn& c) {
  json terms = json::array();
  for (const auto& [e, k] : c.poly().terms()) {
    json xs = json::array(), ys = json::array();
    bool has_y = false;
    for (std::size_t i = 0; i < c.m(); ++i) xs.push_back(e[c.x_var(i)]);
    for (std::size_t i = 0; i < c.n(); ++i) {
      ys.push_back(e[c.y_var(i)]);
      has_y = has_y || e[c.y_var(i)] != 0;
    }
    json t{{"x", xs}, {"c", rs(k)}};
    if (has_y) t["y"] = ys;
    terms.push_back(std::move(t));
  }
  return terms;
}

Group parse_group(const json& j, const std::string& path, std::size_t m,
                  std::size_t n) {
  Group g;
  g.label = need(j, path, "label").get<std::string>();
  g.r = rat_vec(need(j, path, "r"), path + ".r");
  g.s = uint_vec(need(j, path, "s"), path + ".s");
  g.critical = j.value("critical", true);
  g.coeff = parse_coeff(need(j, path, "coeff"), path + ".coeff", m, n);
  if (j.contains("beta")) {
    const json& b = j["beta"];
    if (!b.is_array()) fail(path + ".beta", "expected an array of rows");
    for (std::size_t i = 0; i < b.size(); ++i)
      g.beta.push_back(rat_vec(b[i], path + ".beta[" + std::to_string(i) + "]"));
  }
  if (j.contains("unit_lo")) g.unit_lo = to_rat(j["unit_lo"], path + ".unit_lo");
  if (j.contains("unit_hi")) g.unit_hi = to_rat(j["unit_hi"], path + ".unit_hi");
  return g;
}

PreparedSum parse_sum(const json& j, const std::string& path) {
  PreparedSum s;
  s.m = to_uint(need(j, path, "m"), path + ".m");
  s.n = to_uint(need(j, path, "n"), path + ".n");
  s.l = j.contains("l") ? to_uint(j["l"], path + ".l") : 0;
  const json& gs = need(j, path, "groups");
  if (!gs.is_array()) fail(path + ".groups", "expected an array");
  for (std::size_t i = 0; i < gs.size(); ++i)
    s.groups.push_back(
        parse_group(gs[i], path + ".groups[" + std::to_string(i) + "]", s.m, s.n));
  return s;
}

json sum_json(const PreparedSum& s) {
  json gs = json::array();
  for (const auto& g : s.groups) {
    json gj{{"label", g.label},
            {"r", rat_vec_json(g.r)},
            {"s", g.s},
            {"critical", g.critical},
            {"coeff", coeff_json(g.coeff)}};
    if (!g.beta.empty()) {
      json b = json::array();
      for (const auto& row : g.beta) b.push_back(rat_vec_json(row));
      gj["beta"] = b;
    }
    if (g.unit_lo != 1) gj["unit_lo"] = rs(g.unit_lo);
    if (g.unit_hi != 1) gj["unit_hi"] = rs(g.unit_hi);
    gs.push_back(std::move(gj));
  }
  return json{{"m", s.m}, {"n", s.n}, {"l", s.l}, {"groups", gs}};
}

// ---- monomial cells --------------------------------------------------------

Monomial parse_monomial(const json& j, const std::string& path, std::size_t n) {
  Monomial mo = Monomial::zero(n);
  Rat base = to_rat(need(j, path, "c"), path + ".c");
  unsigned long root = j.contains("root") ? to_uint(j["root"], path + ".root") : 1;
  if (root == 0) fail(path + ".root", "root must be >= 1");
  mo.coeff = RootRat(base, root);
  if (j.contains("e")) {
    mo.expo = rat_vec(j["e"], path + ".e");
    if (mo.expo.size() != n)
      fail(path + ".e", "expected " + std::to_string(n) + " exponents");
  }
  return mo;
}

json monomial_json(const Monomial& m) {
  json j{{"c", rs(m.coeff.base)}, {"e", rat_vec_json(m.expo)}};
  if (m.coeff.root != 1) j["root"] = m.coeff.root;
  return j;
}

MonCell parse_cell(const json& j, const std::string& path) {
  MonCell c;
  c.n = to_uint(need(j, path, "n"), path + ".n");
  c.l = j.contains("l") ? to_uint(j["l"], path + ".l") : 0;
  for (const char* side : {"lower", "upper"}) {
    const json& b = need(j, path, side);
    const std::string bp = path + "." + side;
    if (!b.is_array() || b.size() != c.n)
      fail(bp, "expected " + std::to_string(c.n) + " bound monomials");
    auto& dst = std::string(side) == "lower" ? c.lower : c.upper;
    for (std::size_t i = 0; i < c.n; ++i)
      dst.push_back(parse_monomial(b[i], bp + "[" + std::to_string(i) + "]", c.n));
  }
  return c;
}

json cell_json(const MonCell& c) {
  json lo = json::array(), up = json::array();
  for (const auto& m : c.lower) lo.push_back(monomial_json(m));
  for (const auto& m : c.upper) up.push_back(monomial_json(m));
  return json{{"n", c.n}, {"l", c.l}, {"lower", lo}, {"upper", up}};
}

// ---- coefficient families --------------------------------------------------

TruncPoly parse_poly(const json& j, const std::string& path, std::size_t arity) {
  if (!j.is_array()) fail(path, "expected an array of terms");
  TruncPoly p(arity);
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string tp = path + "[" + std::to_string(t) + "]";
    auto e = uint_vec(need(j[t], tp, "e"), tp + ".e");
    if (e.size() != arity)
      fail(tp + ".e", "expected " + std::to_string(arity) + " exponents");
    p.add_term(e, to_rat(need(j[t], tp, "c"), tp + ".c"));
  }
  return p;
}

json poly_json(const TruncPoly& p) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms())
    terms.push_back(json{{"e", e}, {"c", rs(c)}});
  return terms;
}

CoeffFamily parse_family(const json& j, const std::string& path) {
  CoeffFamily fam;
  fam.xy_arity = to_uint(need(j, path, "xy_arity"), path + ".xy_arity");
  fam.k = to_uint(need(j, path, "k"), path + ".k");
  const json& cs = need(j, path, "coeffs");
  if (!cs.is_array()) fail(path + ".coeffs", "expected an array");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string cp = path + ".coeffs[" + std::to_string(i) + "]";
    auto alpha = uint_vec(need(cs[i], cp, "alpha"), cp + ".alpha");
    if (alpha.size() != fam.k)
      fail(cp + ".alpha", "expected " + std::to_string(fam.k) + " entries");
    fam.coeffs[alpha] =
        parse_poly(need(cs[i], cp, "poly"), cp + ".poly", fam.xy_arity);
  }
  return fam;
}

json family_json(const CoeffFamily& fam) {
  json cs = json::array();
  for (const auto& [alpha, poly] : fam.coeffs)
    cs.push_back(json{{"alpha", alpha}, {"poly", poly_json(poly)}});
  return json{{"xy_arity", fam.xy_arity}, {"k", fam.k}, {"coeffs", cs}};
}

// ---- intervals, diagrams ---------------------------------------------------

json ext_json(const ExtValue& v, const Rat& q) {
  if (v.infinite) return json{{"infinite", true}};
  return json{{"a", rs(v.finite.a)},
              {"b", rs(v.finite.b)},
              {"value", rat_to_double(qlin_eval(v.finite, q))}};
}

json interval_json(const PInterval& v, const Rat& q) {
  return json{{"lo", ext_json(v.lo, q)},
              {"hi", ext_json(v.hi, q)},
              {"includes_infinity", v.includes_infinity},
              {"text", interval_to_string(v)}};
}

json config_json(const VanishConfig& c) {
  json pieces = json::array();
  for (const auto& p : c.pieces)
    pieces.push_back(json{{"f_vanish", p.f_vanish}, {"mu_vanish", p.mu_vanish}});
  return json{{"pieces", pieces}};
}

json formula_json(const Formula& f) {
  json d = json::array();
  for (const auto& conj : f.disjuncts) {
    json lits = json::array();
    for (const auto& [atom, vanishes] : conj.lits)
      lits.push_back(json{{"piece", atom.piece},
                          {"mu", atom.mu},
                          {"label", atom.label},
                          {"vanishes", vanishes}});
    d.push_back(std::move(lits));
  }
  return d;
}

// ---- countex helpers -------------------------------------------------------

// The wedge {0 < y1 < 1, x*y1 < y2 < y1} at a fixed base point x.
MonCell wedge_cell(const Rat& x) {
  MonCell c;
  c.n = 2;
  c.l = 0;
  c.lower = {Monomial::zero(2), Monomial::zero(2)};
  c.upper = {Monomial::constant(2, RootRat::one()),
             Monomial::constant(2, RootRat::one())};
  c.lower[1].coeff = RootRat(x);
  c.lower[1].expo = {Rat(1), Rat(0)};
  c.upper[1].expo = {Rat(1), Rat(0)};
  return c;
}

// Reparametrizes the wedge over the unit square: (u, v) covers y1 = u,
// y2 = y1 * (x + v * (1 - x)).
SupEstimate wedge_sup(const Rat& x, const std::function<double(double, double)>& f) {
  const double xd = rat_to_double(x);
  return sup_estimate_fn(
      [&](const std::vector<double>& uv) {
        const double y1 = uv[0];
        const double y2 = y1 * (xd + uv[1] * (1 - xd));
        return f(y1, y2);
      },
      2, 1e-5);
}

json sup_json(const SupEstimate& s) {
  return json{{"sup", s.sup}, {"bounded", s.bounded}};
}

// ---- verify ----------------------------------------------------------------

std::vector<std::string> vanishing_labels(const PreparedSum& sum,
                                          const std::vector<Rat>& x) {
  auto generic = critical_delta(sum);
  auto alive = critical_delta(sum, x);
  std::vector<std::string> out;
  for (const auto& lab : generic)
    if (std::find(alive.begin(), alive.end(), lab) == alive.end())
      out.push_back(lab);
  return out;
}

json run_verify(const Instance& inst) {
  if (inst.pieces.empty()) fail("$.pieces", "verify needs at least one piece");
  Diagram d = assemble_diagram(inst.pieces, inst.q, inst.config_cap, inst.seed);
  const std::size_t m = inst.pieces.front().f.m;
  std::mt19937 rng(inst.seed + 1);
  std::uniform_int_distribution<int> dnum(1, 999);
  const Rat p_grid[] = {Rat(1, 4), Rat(1, 2), Rat(1),
                        Rat(3, 2), Rat(2),    Rat(3)};

  std::size_t tried = 0, agreed = 0, inconclusive = 0;
  while (tried + inconclusive < inst.samples) {
    std::vector<Rat> x;
    std::vector<double> xd;
    for (std::size_t i = 0; i < m; ++i) {
      x.emplace_back(dnum(rng), 1000);
      xd.push_back(rat_to_double(x.back()));
    }
    VanishConfig config;
    for (const auto& piece : inst.pieces) {
      VanishConfig::PerPiece pp;
      pp.f_vanish = vanishing_labels(piece.f, x);
      pp.mu_vanish = vanishing_labels(piece.mu, x);
      config.pieces.push_back(std::move(pp));
    }
    const PInterval interval = lebesgue_set_at(d, config);
    for (const Rat& p : p_grid) {
      if (tried + inconclusive >= inst.samples) break;
      // Keep clear of the verdict boundary: the quadrature dead band makes
      // near-endpoint p values uninformative.
      bool near = false;
      for (const ExtValue* e : {&interval.lo, &interval.hi})
        if (!e->infinite) {
          Rat gap = qlin_eval(e->finite, inst.q) - p;
          if (gap < 0) gap = -gap;
          if (gap < Rat(1, 10)) near = true;
        }
      if (near) continue;
      const bool member = interval_contains(interval, p, inst.q);
      bool all_converge = true, any_diverge = false, any_unknown = false;
      for (const auto& piece : inst.pieces) {
        auto v = fiber_integral(piece.f, piece.mu, piece.gamma,
                                rat_to_double(p), rat_to_double(inst.q), xd);
        if (v.verdict == Verdict::Diverges) any_diverge = true;
        if (v.verdict != Verdict::Converges) all_converge = false;
        if (v.verdict == Verdict::Inconclusive) any_unknown = true;
      }
      if (any_unknown && !any_diverge) {
        ++inconclusive;
        continue;
      }
      ++tried;
      if (member == (all_converge && !any_diverge)) ++agreed;
    }
  }
  const double fraction = tried ? double(agreed) / double(tried) : 1.0;
  return json{{"diagram", diagram_to_json(d)},
              {"samples", tried},
              {"agreements", agreed},
              {"inconclusive", inconclusive},
              {"agreement", fraction},
              {"ok", fraction >= 0.99}};
}

}  // namespace

// ---- public API ------------------------------------------------------------

Instance parse_instance(const std::string& bytes) {
  json doc = json::parse(bytes, nullptr, false);
  if (doc.is_discarded()) fail("$", "not valid JSON");
  if (!doc.is_object()) fail("$", "expected a JSON object");
  Instance inst;
  inst.q = to_rat(need(doc, "$", "q"), "$.q");
  if (inst.q <= 0) fail("$.q", "q must be positive");
  if (doc.contains("seed")) inst.seed = unsigned(to_uint(doc["seed"], "$.seed"));
  if (doc.contains("config_cap"))
    inst.config_cap = to_uint(doc["config_cap"], "$.config_cap");
  if (doc.contains("samples")) inst.samples = to_uint(doc["samples"], "$.samples");
  if (doc.contains("mode")) {
    const std::string m = doc["mode"].is_string() ? doc["mode"].get<std::string>() : "";
    if (m == "generic")
      inst.mode = CrMode::Generic;
    else if (m == "sampled")
      inst.mode = CrMode::Sampled;
    else
      fail("$.mode", "expected \"generic\" or \"sampled\"");
  }
  if (doc.contains("points")) {
    const json& pts = doc["points"];
    if (!pts.is_array()) fail("$.points", "expected an array of points");
    for (std::size_t i = 0; i < pts.size(); ++i)
      inst.points.push_back(rat_vec(pts[i], "$.points[" + std::to_string(i) + "]"));
  }
  if (doc.contains("pieces")) {
    const json& ps = doc["pieces"];
    if (!ps.is_array()) fail("$.pieces", "expected an array");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string pp = "$.pieces[" + std::to_string(i) + "]";
      DiagramPiece piece;
      piece.f = parse_sum(need(ps[i], pp, "f"), pp + ".f");
      piece.mu = parse_sum(need(ps[i], pp, "mu"), pp + ".mu");
      piece.gamma = ps[i].contains("gamma")
                        ? rat_vec(ps[i]["gamma"], pp + ".gamma")
                        : std::vector<Rat>(piece.f.n, Rat(0));
      if (piece.gamma.size() != piece.f.n)
        fail(pp + ".gamma", "expected " + std::to_string(piece.f.n) + " exponents");
      inst.pieces.push_back(std::move(piece));
    }
  }
  if (doc.contains("cell")) inst.cell = parse_cell(doc["cell"], "$.cell");
  if (doc.contains("map")) {
    if (!inst.cell) fail("$.map", "a map requires a cell");
    const json& mj = doc["map"];
    MonomialMap phi;
    phi.n = inst.cell->n;
    const json& comps = need(mj, "$.map", "comps");
    if (!comps.is_array()) fail("$.map.comps", "expected an array");
    for (std::size_t i = 0; i < comps.size(); ++i)
      phi.comps.push_back(parse_monomial(
          comps[i], "$.map.comps[" + std::to_string(i) + "]", phi.n));
    inst.map = std::move(phi);
  }
  if (doc.contains("family"))
    inst.family = parse_family(doc["family"], "$.family");
  if (doc.contains("classify")) {
    const json& cj = doc["classify"];
    ClassifyQuery cq;
    if (cj.contains("monomials")) {
      const json& ms = cj["monomials"];
      if (!ms.is_array()) fail("$.classify.monomials", "expected an array");
      for (std::size_t i = 0; i < ms.size(); ++i) {
        const std::string mp = "$.classify.monomials[" + std::to_string(i) + "]";
        cq.monomials.push_back(
            {to_rat(need(ms[i], mp, "alpha"), mp + ".alpha"),
             unsigned(to_uint(need(ms[i], mp, "beta"), mp + ".beta"))});
      }
    }
    if (cj.contains("rects")) {
      const json& rsj = cj["rects"];
      if (!rsj.is_array()) fail("$.classify.rects", "expected an array");
      for (std::size_t i = 0; i < rsj.size(); ++i) {
        const std::string rp = "$.classify.rects[" + std::to_string(i) + "]";
        ClassifyQuery::Rect r;
        r.alpha = rat_vec(need(rsj[i], rp, "alpha"), rp + ".alpha");
        r.beta = uint_vec(need(rsj[i], rp, "beta"), rp + ".beta");
        r.l = rsj[i].contains("l") ? to_uint(rsj[i]["l"], rp + ".l") : 0;
        cq.rects.push_back(std::move(r));
      }
    }
    inst.classify = std::move(cq);
  }
  if (doc.contains("countex")) {
    const json& oj = doc["countex"];
    CountexQuery q;
    q.x = rat_vec(need(oj, "$.countex", "x"), "$.countex.x");
    for (const auto& xv : q.x)
      if (xv <= 0 || xv >= 1) fail("$.countex.x", "base points must lie in (0,1)");
    if (oj.contains("candidates")) {
      const json& cands = oj["candidates"];
      if (!cands.is_array()) fail("$.countex.candidates", "expected an array");
      for (std::size_t i = 0; i < cands.size(); ++i) {
        const std::string cp = "$.countex.candidates[" + std::to_string(i) + "]";
        CountexQuery::Candidate cand;
        cand.label = need(cands[i], cp, "label").get<std::string>();
        const json& g = need(cands[i], cp, "g");
        if (!g.is_object()) fail(cp + ".g", "expected log-power keyed polynomials");
        for (const auto& [key, val] : g.items()) {
          char* end = nullptr;
          const unsigned long power = std::strtoul(key.c_str(), &end, 10);
          if (end == key.c_str() || *end) fail(cp + ".g", "non-numeric log power key");
          cand.g[unsigned(power)] = parse_poly(val, cp + ".g." + key, 3);
        }
        cand.t = cands[i].contains("t") ? rat_vec(cands[i]["t"], cp + ".t")
                                        : std::vector<Rat>{};
        q.candidates.push_back(std::move(cand));
      }
    }
    inst.countex = std::move(q);
  }
  return inst;
}

json instance_to_json(const Instance& inst) {
  json doc{{"q", rs(inst.q)},
           {"seed", inst.seed},
           {"config_cap", inst.config_cap},
           {"samples", inst.samples},
           {"mode", inst.mode == CrMode::Generic ? "generic" : "sampled"}};
  if (!inst.points.empty()) {
    json pts = json::array();
    for (const auto& p : inst.points) pts.push_back(rat_vec_json(p));
    doc["points"] = pts;
  }
  if (!inst.pieces.empty()) {
    json ps = json::array();
    for (const auto& piece : inst.pieces)
      ps.push_back(json{{"f", sum_json(piece.f)},
                        {"mu", sum_json(piece.mu)},
                        {"gamma", rat_vec_json(piece.gamma)}});
    doc["pieces"] = ps;
  }
  if (inst.cell) doc["cell"] = cell_json(*inst.cell);
  if (inst.map) {
    json comps = json::array();
    for (const auto& c : inst.map->comps) comps.push_back(monomial_json(c));
    doc["map"] = json{{"comps", comps}};
  }
  if (inst.family) doc["family"] = family_json(*inst.family);
  if (inst.classify) {
    json ms = json::array(), rsj = json::array();
    for (const auto& mq : inst.classify->monomials)
      ms.push_back(json{{"alpha", rs(mq.alpha)}, {"beta", mq.beta}});
    for (const auto& r : inst.classify->rects)
      rsj.push_back(
          json{{"alpha", rat_vec_json(r.alpha)}, {"beta", r.beta}, {"l", r.l}});
    doc["classify"] = json{{"monomials", ms}, {"rects", rsj}};
  }
  if (inst.countex) {
    json cands = json::array();
    for (const auto& c : inst.countex->candidates) {
      json g = json::object();
      for (const auto& [power, poly] : c.g)
        g[std::to_string(power)] = poly_json(poly);
      cands.push_back(
          json{{"label", c.label}, {"g", g}, {"t", rat_vec_json(c.t)}});
    }
    doc["countex"] = json{{"x", rat_vec_json(inst.countex->x)},
                          {"candidates", cands}};
  }
  return doc;
}

json diagram_to_json(const Diagram& d) {
  json entries = json::array();
  for (const auto& e : d.entries) {
    json configs = json::array();
    for (const auto& c : e.configs) configs.push_back(config_json(c));
    entries.push_back(json{{"interval", interval_json(e.interval, d.q)},
                           {"configs", configs},
                           {"feasible", e.feasible},
                           {"locus", formula_json(e.locus)}});
  }
  return json{{"q", rs(d.q)}, {"config_cap", d.config_cap}, {"entries", entries}};
}

json pieces_to_json(const std::vector<RectPiece>& pieces) {
  json out = json::array();
  for (const auto& p : pieces) {
    json steps = json::array();
    for (const auto& s : p.steps) {
      json sj;
      switch (s.kind) {
        case PullbackStep::Kind::Adjustment:
          sj = json{{"kind", "adjustment"}};
          break;
        case PullbackStep::Kind::Restriction:
          sj = json{{"kind", "restriction"}, {"cell", cell_json(s.restricted)}};
          break;
        case PullbackStep::Kind::PowerSub:
          sj = json{{"kind", "power_sub"}, {"j", s.j}, {"p", s.p}};
          break;
        case PullbackStep::Kind::Blowup:
          sj = json{{"kind", "blowup"}, {"j", s.j}, {"b", monomial_json(s.blow)}};
          break;
        case PullbackStep::Kind::Flip:
          sj = json{{"kind", "flip"}, {"j", s.j}};
          break;
        case PullbackStep::Kind::Swap:
          sj = json{{"kind", "swap"}, {"i", s.i}, {"j", s.j}};
          break;
      }
      steps.push_back(std::move(sj));
    }
    json jac{{"negative", p.jac.negative},
             {"coeff", rs(p.jac.coeff.base)},
             {"coeff_root", p.jac.coeff.root},
             {"gamma", rat_vec_json(p.jac.gamma)}};
    out.push_back(json{{"cell", cell_json(p.cell)},
                       {"steps", steps},
                       {"l", p.l},
                       {"jacobian", jac}});
  }
  return out;
}

json run(const std::string& command, const Instance& inst) {
  if (command == "classify") {
    if (!inst.classify) fail("$.classify", "classify needs a classify section");
    json ms = json::array(), rsj = json::array();
    for (const auto& mq : inst.classify->monomials) {
      auto v = classify_monomial_1d(mq.alpha, mq.beta);
      ms.push_back(json{{"alpha", rs(mq.alpha)},
                        {"beta", mq.beta},
                        {"integrable", v.integrable},
                        {"bounded", v.bounded}});
    }
    for (const auto& r : inst.classify->rects) {
      auto v = classify_rect(r.alpha, r.beta, r.l);
      rsj.push_back(json{{"alpha", rat_vec_json(r.alpha)},
                         {"beta", r.beta},
                         {"l", r.l},
                         {"integrable", v.integrable},
                         {"bounded", v.bounded}});
    }
    return json{{"monomials", ms}, {"rects", rsj}};
  }
  if (command == "diagram") {
    if (inst.pieces.empty()) fail("$.pieces", "diagram needs at least one piece");
    return diagram_to_json(
        assemble_diagram(inst.pieces, inst.q, inst.config_cap, inst.seed));
  }
  if (command == "rectilinearize") {
    if (!inst.cell) fail("$.cell", "rectilinearize needs a cell");
    validate_cell(*inst.cell);
    MonomialMap phi = inst.map.value_or(MonomialMap{inst.cell->n, {}});
    auto pieces = rectilinearize(*inst.cell, phi);
    return json{{"count", pieces.size()}, {"pieces", pieces_to_json(pieces)}};
  }
  if (command == "split" || command == "dickson") {
    if (!inst.family) fail("$.family", command + " needs a family");
    const FamilyMode mode =
        inst.mode == CrMode::Generic ? FamilyMode::Generic : FamilyMode::Sampled;
    auto m_cr = dickson_union(*inst.family, mode, inst.points);
    json mj = json::array();
    for (const auto& a : m_cr) mj.push_back(a);
    if (command == "dickson") {
      auto parts = partition_complement(m_cr);
      json pj = json::array();
      for (const auto& part : parts)
        pj.push_back(json{{"base", part.base},
                          {"free_coords", part.free_coords},
                          {"thresholds", part.thresholds},
                          {"minimal_member", part.minimal_member()}});
      return json{{"antichain", mj}, {"partition", pj}};
    }
    auto split = critical_split(*inst.family, m_cr);
    json crit = json::array(), noncrit = json::array();
    for (const auto& [alpha, poly] : split.critical)
      crit.push_back(json{{"alpha", alpha}, {"poly", poly_json(poly)}});
    for (const auto& tail : split.noncritical)
      noncrit.push_back(json{{"beta", tail.beta},
                             {"minimal_member", tail.part.minimal_member()},
                             {"tail", poly_json(tail.tail)}});
    return json{{"m_cr", mj}, {"critical", crit}, {"noncritical", noncrit}};
  }
  if (command == "countex") {
    if (!inst.countex) fail("$.countex", "countex needs a countex section");
    json fibers = json::array();
    for (const Rat& x : inst.countex->x) {
      auto pieces = rectilinearize(wedge_cell(x), MonomialMap{2, {}});
      auto f_sup = wedge_sup(
          x, [](double y1, double y2) { return std::log(y1 / y2); });
      auto l1_sup = wedge_sup(
          x, [](double y1, double) { return std::log(y1); });
      auto l2_sup = wedge_sup(
          x, [](double, double y2) { return std::log(y2); });
      fibers.push_back(json{{"x", rs(x)},
                            {"rect_pieces", pieces.size()},
                            {"f", sup_json(f_sup)},
                            {"log_y1", sup_json(l1_sup)},
                            {"log_y2", sup_json(l2_sup)}});
    }
    json cands = json::array();
    for (const auto& cand : inst.countex->candidates) {
      json cj{{"label", cand.label}};
      auto table = collapse_series(cand.g);
      json tj = json::array();
      for (const auto& [key, c] : table) {
        const auto& [i, k, l] = key;
        tj.push_back(json{{"log", i}, {"k", k}, {"l", l}, {"c", rs(c)}});
      }
      cj["table"] = tj;
      try {
        auto la = leading_asymptotics(table);
        cj["leading"] = json{{"p", la.p},
                             {"q", la.q},
                             {"r", la.r},
                             {"a", rs(la.a)},
                             {"eps", rs(la.eps)}};
        json limits = json::array();
        for (const Rat& t : cand.t) {
          json lj{{"t", rs(t)}};
          if (t > 0 && t < la.eps) {
            lj["limit"] = limit_along_curve(table, la, rat_to_double(t));
            lj["in_window"] = true;
          } else {
            lj["in_window"] = false;
          }
          limits.push_back(std::move(lj));
        }
        cj["limits"] = limits;
      } catch (const std::domain_error&) {
        cj["leading"] = nullptr;
      }
      cands.push_back(std::move(cj));
    }
    return json{{"fibers", fibers}, {"candidates", cands}};
  }
  if (command == "verify") return run_verify(inst);
  fail("$.command", "unknown command \"" + command + "\"");
}

}  // namespace lcdiag
