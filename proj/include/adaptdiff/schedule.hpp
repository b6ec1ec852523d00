#pragma once

#include <vector>

namespace adaptdiff {

// Diffusion variance schedule and the coefficients derived from it. Steps are
// 1-based: t in [1,T]. All arithmetic is done in 64-bit floats; a schedule is
// an immutable value once built.
struct NoiseSchedule {
    int T = 0;
    std::vector<double> beta;           // beta[t-1] = β_t
    std::vector<double> alpha;          // α_t = 1 − β_t
    std::vector<double> alpha_bar;      // ᾱ_t = Π_{i≤t} α_i
    std::vector<double> posterior_var;  // β_t (1−ᾱ_{t−1}) / (1−ᾱ_t), ᾱ_0 ≡ 1

    double beta_at(int t) const { return beta[check(t)]; }
    double alpha_at(int t) const { return alpha[check(t)]; }
    double alpha_bar_at(int t) const { return alpha_bar[check(t)]; }
    // ᾱ_{t−1} with ᾱ_0 ≡ 1.
    double alpha_bar_prev(int t) const { return check(t) == 0 ? 1.0 : alpha_bar[t - 2]; }
    double posterior_var_at(int t) const { return posterior_var[check(t)]; }

    // Noise scale of the stochastic term in the reverse step: the square root
    // of the posterior variance. Zero at t = 1.
    double sigma_at(int t) const;

  private:
    int check(int t) const;
};

// Linearly interpolated betas with exact endpoints. Requires T >= 2 and
// 0 < beta_start <= beta_end < 1.
NoiseSchedule build_linear_schedule(int T, double beta_start, double beta_end);

}  // namespace adaptdiff
