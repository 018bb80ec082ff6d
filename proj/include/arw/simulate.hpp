#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "arw/lattice.hpp"

namespace arw {

// One draw of the random wave F(x) = (1/sqrt(N)) sum_mu a_mu e(mu.x) with
// a_{-mu} = conj(a_mu).  Stored over antipodal pair representatives (the
// lexicographically positive member of each +-mu pair):
//   F(x) = sum_p [ amp_cos[p] cos(2 pi mu_p.x) + amp_sin[p] sin(2 pi mu_p.x) ],
// where a_mu = sqrt(N)/2 (amp_cos - i amp_sin) for the representative mu.
struct WaveSample {
    const FrequencySet* set = nullptr;  // non-owning
    std::vector<std::size_t> rep;       // indices of pair representatives
    std::vector<double> amp_cos;
    std::vector<double> amp_sin;

    std::complex<double> coefficient(std::size_t pair) const {
        const double scale = std::sqrt(static_cast<double>(set->size())) / 2.0;
        return {scale * amp_cos[pair], -scale * amp_sin[pair]};
    }
};

// Gaussian draw: each pair representative gets a complex standard Gaussian
// a = (g1 + i g2)/sqrt(2) (Re, Im ~ N(0, 1/2)), giving E[F(x)^2] = 1.
WaveSample sample_wave(const FrequencySet& set, std::uint64_t seed);

// Deterministic coefficients for tests/overrides: one complex a per pair
// representative (the antipodal partner is implied by conjugation).
WaveSample wave_from_coefficients(const FrequencySet& set,
                                  const std::vector<std::complex<double>>& a);

// Production path: paired cosine/sine sum (all-real).
double eval_wave(const WaveSample& w, const Eigen::VectorXd& x);

// Check path: full complex-exponential sum over all N frequencies; imaginary
// part must vanish to 1e-10 (returned for inspection).
std::complex<double> eval_wave_complex(const WaveSample& w,
                                       const Eigen::VectorXd& x);

// Zero crossings of g(t) = F(x0 + t u) on [0, length]: sign changes located
// by sampling at step <= 1/(32 sqrt(m)) (>= 32 samples per period of the top
// frequency; close zero pairs are missed with probability O(step^2), and the
// 8-samples-per-period rate already biases crossing counts low by ~0.7%),
// each bracket refined by bisection to 1e-10.  Tangential double roots are
// measure-zero events and may be missed.
std::vector<double> transect_zero_crossings(const WaveSample& w,
                                            const Eigen::VectorXd& x0,
                                            const Eigen::VectorXd& u,
                                            double length);
int transect_zero_count(const WaveSample& w, const Eigen::VectorXd& x0,
                        const Eigen::VectorXd& u, double length);

// kappa_d = E|<u, e1>| over the uniform sphere = Gamma(d/2)/(sqrt(pi)
// Gamma((d+1)/2)); kappa_d * G_d = 2 exactly.
double crofton_kappa(int d);

struct NodalEstimate {
    double volume = 0.0;
    std::int64_t n_lines = 0;
    double per_line_variance = 0.0;  // sample variance of per-line zero counts
    double std_error = 0.0;          // sqrt(per_line_variance/n_lines)/kappa_d
    double mean_crossings = 0.0;     // mean zeros per unit-length line
};

// Crofton line-transect estimate: n_lines independent lines (uniform base
// point, uniform direction, length 1); volume = mean crossings / kappa_d.
// Line j uses the RNG stream (seed, line j), so any scheduling gives
// identical results.
NodalEstimate crofton_volume(const WaveSample& w, std::int64_t n_lines,
                             std::uint64_t seed);

struct BatchStats {
    int d = 0;
    std::int64_t m = 0;
    std::int64_t n = 0;
    std::int64_t n_samples = 0;
    std::int64_t n_lines = 0;
    std::uint64_t seed = 0;
    double kappa = 0.0;
    std::vector<double> volumes;        // per-sample V-hat
    std::vector<double> per_line_vars;  // per-sample transect count variance
    double mean = 0.0;
    double mean_se = 0.0;
    double raw_var = 0.0;
    double raw_var_se = 0.0;        // bootstrap
    double noise_correction = 0.0;  // mean(per_line_var)/(n_lines kappa^2)
    double corrected_var = 0.0;     // raw_var - noise_correction
    double corrected_var_se = 0.0;  // bootstrap
};

// Aggregation step separated out so tests can feed synthetic estimates: the
// noise-corrected variance is raw_var minus the law-of-total-variance term
// mean(per_line_variance)/(n_lines kappa^2); uncertainties on both variances
// by bootstrap over samples (resampling (volume, per_line_var) jointly).
BatchStats aggregate_batch(int d, std::int64_t m, std::int64_t n,
                           const std::vector<NodalEstimate>& estimates,
                           std::int64_t n_lines, std::uint64_t seed,
                           int n_boot = 400);

// Full pipeline: n_samples waves (streams (seed, 1, i)), n_lines transects
// each (streams (seed, 2, i, j) per line), then aggregate_batch.
// Requires n_samples >= 30.
BatchStats batch_stats(const FrequencySet& set, std::int64_t n_samples,
                       std::int64_t n_lines, std::uint64_t seed,
                       int n_boot = 400);

nlohmann::json batch_to_json(const BatchStats& b);
std::string batch_to_csv(const BatchStats& b);

}  // namespace arw
