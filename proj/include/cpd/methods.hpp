#pragma once

#include <array>
#include <string_view>

#include "cpd/integrators.hpp"

// Method registry: names, parsing, and stepper construction.  The SC family
// requires a homogeneous field; make_stepper builds its coefficient plan once
// per (h, field) and reuses it for every step.

namespace cpd {

enum class Method { SC1O2, SC2O2, SC1O4, SC2O4, SG1O1, SG1O2, SG1O4, BORIS, RKO2, RKO4, EULER };

inline constexpr std::array<Method, 11> kAllMethods{
    Method::SC1O2, Method::SC2O2, Method::SC1O4, Method::SC2O4, Method::SG1O1, Method::SG1O2,
    Method::SG1O4, Method::BORIS, Method::RKO2,  Method::RKO4,  Method::EULER};

[[nodiscard]] std::string_view to_string(Method m);

// Case-sensitive; throws std::invalid_argument naming the unknown id.
[[nodiscard]] Method parse_method(std::string_view name);

[[nodiscard]] bool requires_homogeneous_field(Method m);

// One-step map of size h for the given problem.  The problem must outlive the
// returned stepper; stats may be null.  Throws std::logic_error when an SC
// method is requested for a space-dependent field.
[[nodiscard]] Stepper make_stepper(Method m, const CPDProblem& p, double h,
                                   const FixedPointControls& fp, IterationStats* stats = nullptr);

}  // namespace cpd
