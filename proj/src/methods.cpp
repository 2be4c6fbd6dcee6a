#include "cpd/methods.hpp"

#include <stdexcept>
#include <string>

#include "cpd/reference_methods.hpp"
#include "cpd/sg_methods.hpp"

namespace cpd {

namespace {

constexpr std::array<std::string_view, 11> kMethodNames{
    "SC1O2", "SC2O2", "SC1O4", "SC2O4", "SG1O1", "SG1O2", "SG1O4", "BORIS", "RKO2", "RKO4",
    "EULER"};

}  // namespace

std::string_view to_string(Method m) { return kMethodNames[static_cast<size_t>(m)]; }

Method parse_method(std::string_view name) {
  for (size_t i = 0; i < kMethodNames.size(); ++i)
    if (kMethodNames[i] == name) return static_cast<Method>(i);
  throw std::invalid_argument("unknown method id: " + std::string(name));
}

bool requires_homogeneous_field(Method m) {
  switch (m) {
    case Method::SC1O2:
    case Method::SC2O2:
    case Method::SC1O4:
    case Method::SC2O4:
      return true;
    default:
      return false;
  }
}

Stepper make_stepper(Method m, const CPDProblem& p, double h, const FixedPointControls& fp,
                     IterationStats* stats) {
  if (requires_homogeneous_field(m) && !is_homogeneous(p))
    throw std::logic_error(std::string(to_string(m)) + " requires a homogeneous field");

  auto f = [&p](const Vec3& x) { return force(p, x); };
  switch (m) {
    case Method::SC1O2:
    case Method::SC2O2:
    case Method::SC1O4: {
      const AlphaFamily fam =
          (m == Method::SC1O4) ? AlphaFamily::kFourth : AlphaFamily::kMidpoint;
      const QuadratureRule quad = (m == Method::SC2O2) ? gauss1() : gauss4();
      const StagePlan plan = make_cs_plan(fam, quad, h, field_matrix(p, p.x0).axis);
      return [plan, f, fp, stats](const State& s) {
        if (stats) ++stats->steps;
        return run_plan(plan, f, s, fp, stats);
      };
    }
    case Method::SC2O4: {
      const StagePlan plan = make_sc2o4_plan(h, field_matrix(p, p.x0).axis);
      return [plan, f, fp, stats](const State& s) {
        if (stats) ++stats->steps;
        return run_plan(plan, f, s, fp, stats);
      };
    }
    case Method::SG1O1:
      return [&p, h, fp, stats](const State& s) { return step_sg1o1(p, s, h, fp, stats); };
    case Method::SG1O2:
      return [&p, h, fp, stats](const State& s) { return step_sg1o2(p, s, h, fp, stats); };
    case Method::SG1O4:
      return [&p, h, fp, stats](const State& s) { return step_sg1o4(p, s, h, fp, stats); };
    case Method::BORIS:
      return [&p, h, stats](const State& s) { return step_boris(p, s, h, stats); };
    case Method::RKO2:
      return
          [&p, h, fp, stats](const State& s) { return step_implicit_midpoint(p, s, h, fp, stats); };
    case Method::RKO4:
      return [&p, h, fp, stats](const State& s) { return step_gauss4(p, s, h, fp, stats); };
    case Method::EULER:
      return
          [&p, h, fp, stats](const State& s) { return step_implicit_euler(p, s, h, fp, stats); };
  }
  throw std::logic_error("unreachable method dispatch");
}

}  // namespace cpd
