#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lcdiag/instance.hpp"
#include "lcdiag/oracle.hpp"

namespace py = pybind11;
using namespace lcdiag;

namespace {

Rat rat_of(const std::string& s) {
  auto r = parse_rat(s);
  if (!r) throw py::value_error("malformed rational \"" + s + "\"");
  return *r;
}

}  // namespace

PYBIND11_MODULE(_lcdiag, m) {
  m.doc() = "Lebesgue-class diagrams of prepared constructible functions";

  m.def(
      "classify_monomial_1d",
      [](const std::string& alpha, unsigned beta) {
        auto v = classify_monomial_1d(rat_of(alpha), beta);
        return py::make_tuple(v.integrable, v.bounded);
      },
      py::arg("alpha"), py::arg("beta") = 0,
      "(integrable, bounded) of t^alpha (log t)^beta on (0,1)");

  m.def(
      "classify_rect",
      [](const std::vector<std::string>& alpha,
         const std::vector<unsigned>& beta, std::size_t l) {
        std::vector<Rat> a;
        for (const auto& s : alpha) a.push_back(rat_of(s));
        auto v = classify_rect(a, beta, l);
        return py::make_tuple(v.integrable, v.bounded);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("l") = 0);

  m.def(
      "run",
      [](const std::string& command, const std::string& instance_json) {
        try {
          Instance inst = parse_instance(instance_json);
          return run(command, inst).dump(2);
        } catch (const InstanceError& e) {
          throw py::value_error(std::string("input error at ") + e.what());
        } catch (const ResourceError& e) {
          throw std::runtime_error(std::string("resource cap: ") + e.what());
        }
      },
      py::arg("command"), py::arg("instance_json"),
      "Runs one CLI command on a JSON instance document; returns report JSON");

  m.def(
      "fiber_integral_power",
      [](const std::string& alpha, unsigned beta, double p) {
        PreparedSum f;
        f.m = 1;
        f.n = 1;
        f.l = 0;
        Group g;
        g.label = "g";
        g.r = {rat_of(alpha)};
        g.s = {beta};
        g.coeff = CoeffFn::constant(1, 1, Rat(1));
        f.groups = {g};
        PreparedSum one = f;
        one.groups[0].r = {Rat(0)};
        one.groups[0].s = {0};
        auto v = fiber_integral(f, one, {}, p, 1.0, {0.5});
        const char* verdict = v.verdict == Verdict::Converges ? "converges"
                              : v.verdict == Verdict::Diverges ? "diverges"
                                                               : "inconclusive";
        return py::make_tuple(verdict, v.estimate);
      },
      py::arg("alpha"), py::arg("beta") = 0, py::arg("p") = 1.0,
      "Quadrature verdict for the 1-d monomial |t^alpha (log t)^beta|^p");
}
