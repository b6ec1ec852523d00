#include "adaptdiff/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace adaptdiff {

int NoiseSchedule::check(int t) const {
    if (t < 1 || t > T)
        throw std::invalid_argument("NoiseSchedule: step " + std::to_string(t) +
                                    " outside [1," + std::to_string(T) + "]");
    return t - 1;
}

double NoiseSchedule::sigma_at(int t) const { return std::sqrt(posterior_var[check(t)]); }

NoiseSchedule build_linear_schedule(int T, double beta_start, double beta_end) {
    if (T < 2) throw std::invalid_argument("build_linear_schedule: T must be >= 2");
    if (!(beta_start > 0.0) || !(beta_end < 1.0))
        throw std::invalid_argument("build_linear_schedule: betas must lie in (0,1)");
    if (beta_start > beta_end)
        throw std::invalid_argument("build_linear_schedule: beta_start > beta_end");

    NoiseSchedule s;
    s.T = T;
    s.beta.resize(T);
    s.alpha.resize(T);
    s.alpha_bar.resize(T);
    s.posterior_var.resize(T);

    for (int i = 0; i < T; ++i)
        s.beta[i] = beta_start + (beta_end - beta_start) * static_cast<double>(i) / (T - 1);
    // pin the endpoints against interpolation round-off
    s.beta[0] = beta_start;
    s.beta[T - 1] = beta_end;

    double abar = 1.0;
    for (int i = 0; i < T; ++i) {
        s.alpha[i] = 1.0 - s.beta[i];
        double abar_prev = abar;
        abar *= s.alpha[i];
        s.alpha_bar[i] = abar;
        s.posterior_var[i] = i == 0 ? 0.0 : s.beta[i] * (1.0 - abar_prev) / (1.0 - abar);
    }
    return s;
}

}  // namespace adaptdiff
