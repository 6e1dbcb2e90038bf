#include "divsp/core.hpp"

namespace divsp {

double discounted_return(const Trajectory& traj, double gamma) {
    if (traj.steps.empty()) throw PreconditionError("discounted_return: empty trajectory");
    double ret = 0.0;
    double scale = 1.0;
    for (const TrajectoryStep& step : traj.steps) {
        ret += scale * step.reward;
        scale *= gamma;
    }
    return ret;
}

}  // namespace divsp
