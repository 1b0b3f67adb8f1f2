#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ibrt/ba.hpp"
#include "ibrt/ode.hpp"
#include "ibrt/probability.hpp"
#include "ibrt/reduction.hpp"

namespace ibrt {

struct TrackerConfig {
    double delta_beta = -0.32;
    double delta1 = kDefaultDelta1;
    double delta2 = kDefaultDelta2;
    double delta3 = kDefaultDelta3;
    double ba_stop = kDefaultBaStop;
    std::size_t ba_max_iter = kDefaultBaMaxIter;
    std::size_t corrector_steps = 1;  ///< BA iterations in decoder coordinates per grid point
    bool singularity_check = true;    ///< off: plain tracking without the singularity heuristic
    bool euler_predictor = true;      ///< off: corrector steps only (annealing baseline)
    bool reduce = true;               ///< run root reduction after each Euler step
    double beta_min = 0.0;            ///< do not step below this beta

    /// Throws InputError on an invalid combination.
    void validate() const;
};

enum class TrackEvent { none, reduced, singularity_handled, converged_trivial };

std::string to_string(TrackEvent e);

struct TrackRecord {
    double beta = 0.0;
    DecoderRoot root;
    InfoPoint info;
    TrackEvent event = TrackEvent::none;
    double ode_condition = 0.0;    ///< NaN when no ODE was solved at this point
    double singular_metric = 0.0;  ///< sigma_min(I - S); NaN when not evaluated
    Vector derivative;             ///< ODE solution at this point; empty when unavailable
    bool ba_unconverged = false;   ///< a convergence BA run hit its iteration cap

    std::size_t clusters() const noexcept { return root.clusters(); }
};

/// Information-plane point of a root via the encoder it generates at beta.
InfoPoint root_info(const DecoderRoot& root, const IBProblem& prob, double beta);

/// Advances log coordinates by delta_beta * v, exponentiates and renormalizes.
/// Throws StepTooLarge on overflow.
DecoderRoot euler_step(const DecoderRoot& root, const OdeSolution& v, double delta_beta);
DecoderRoot euler_step(const DecoderRoot& root, const Vector& v, double delta_beta);

/// Two-cluster merge for a near-singular ODE: the clusters with the largest
/// decoder-derivative norms (ties to the lower index) are replaced by their
/// unweighted mean at the lower index, masses summed, then BA runs to
/// convergence at beta_next. Throws CannotReduce on a single cluster.
DecoderRoot handle_singularity(const IBProblem& prob, const DecoderRoot& root, const OdeSolution& v,
                               double beta_next, const TrackerConfig& cfg);

/// First-order root tracking from a reduced optimal root at beta0 down the
/// grid beta0 + n * delta_beta.
std::vector<TrackRecord> ibrt1(const IBProblem& prob, double beta0, const DecoderRoot& root0,
                               const TrackerConfig& cfg);

/// One Euler extrapolation from a stored grid point, no reduction or BA.
/// Throws RangeError when |beta_target - record.beta| exceeds |delta_beta|.
DecoderRoot interpolate_offgrid(const TrackRecord& record, const OdeSolution& v, double beta_target,
                                double delta_beta);

}  // namespace ibrt
