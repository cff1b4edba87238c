#include "splitadj/stepper.hpp"

#include "splitadj/error.hpp"
#include "splitadj/multistage.hpp"
#include "splitadj/rush_larsen.hpp"

namespace splitadj {

StepStats& StepStats::operator+=(const StepStats& o) {
    steps += o.steps;
    newton_iterations += o.newton_iterations;
    jacobian_refreshes += o.jacobian_refreshes;
    factorizations += o.factorizations;
    rhs_evaluations += o.rhs_evaluations;
    return *this;
}

PointStepper::PointStepper(std::shared_ptr<const Kernel> kernel) : kernel_(std::move(kernel)) {
    if (!kernel_) {
        throw InvalidArgument("stepper needs a kernel");
    }
}

std::shared_ptr<PointStepper> make_stepper(std::shared_ptr<const Kernel> kernel, const std::string& scheme,
                                           const NewtonParams& newton) {
    if (scheme == "rl1" || scheme == "grl1" || scheme == "rl2" || scheme == "grl2") {
        return std::make_shared<RushLarsenStepper>(std::move(kernel), parse_rl_variant(scheme));
    }
    return std::make_shared<MultistageStepper>(std::move(kernel), builtin_tableau(scheme), newton);
}

std::vector<std::string> scheme_names() {
    std::vector<std::string> names = builtin_tableau_names();
    for (const char* rl : {"rl1", "grl1", "rl2", "grl2"}) {
        names.emplace_back(rl);
    }
    return names;
}

} // namespace splitadj
