#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ibrt/ba.hpp"
#include "ibrt/probability.hpp"
#include "ibrt/tracker.hpp"

namespace ibrt::tools {

/// A problem with the builtin id it came from, if any.
struct ProblemSpec {
    std::string id;
    IBProblem problem;
    std::optional<double> bsc_alpha;  ///< set for bsc:<alpha>, enabling the exact oracle
    bool decomposable = false;
};

/// Resolves "bsc:<alpha>", "decomposable" or a JSON file path.
ProblemSpec resolve_problem(const std::string& id);

/// Worker cap from IBRT_THREADS, else the hardware concurrency (at least 1).
std::size_t thread_cap();

/// Descending grid of `points` values from beta0 to beta_end inclusive.
std::vector<double> descending_grid(double beta0, double beta_end, std::size_t points);

/// L-infinity distance between two encoders, minimized over cluster
/// permutations. Encoders of different sizes are compared after padding the
/// smaller with zero rows.
double encoder_distance(const Encoder& a, const Encoder& b);

/// Reduced optimal root at beta: the exact root for bsc, else BA from the
/// tilted uniform encoder on `clusters` clusters followed by reduction.
DecoderRoot initial_root(const ProblemSpec& spec, double beta, std::size_t clusters, const TrackerConfig& cfg);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares line through (x, y). Requires at least two distinct x.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct OrderMethod {
    std::string name;
    std::size_t corrector_steps = 0;
    bool euler_predictor = true;
};

/// euler (no corrector), euler_ba1 (one BA step), anneal (one BA step, no Euler term).
std::vector<OrderMethod> default_order_methods();

struct OrderPoint {
    double step = 0.0;  ///< |delta beta|
    std::string method;
    double sup_error = 0.0;
    std::size_t grid_points = 0;
};

struct OrderFit {
    std::string method;
    LinearFit fit;  ///< log10(sup_error) against log10(step)
    std::size_t points_used = 0;
};

struct OrderStudy {
    std::vector<OrderPoint> points;  ///< sorted by (step descending, method order)
    std::vector<OrderFit> fits;
    std::string reference;  ///< "oracle" or "ba"
};

/// Tracks from the reduced optimal root at beta0 down to beta_end for each
/// (step, method) pair and records the supremum encoder error along the grid.
/// Slopes are fitted on the `fit_points` smallest steps of each method.
OrderStudy order_study(const ProblemSpec& spec, double beta0, double beta_end, const std::vector<double>& steps,
                       const std::vector<OrderMethod>& methods, std::size_t clusters, std::size_t fit_points,
                       std::size_t threads);

struct DerivCheckRow {
    double beta = 0.0;
    double error = 0.0;
    std::string reference;  ///< "oracle" or "finite_difference"
    std::size_t clusters = 0;
};

/// L-infinity error of the ODE derivative against the exact derivative (bsc)
/// or central differences of the converged BA path.
std::vector<DerivCheckRow> deriv_check(const ProblemSpec& spec, const std::vector<double>& betas,
                                       std::size_t clusters, double fd_step = 1e-5);

struct CurvePoint {
    double beta = 0.0;
    InfoPoint info;
    std::size_t clusters = 0;
};

enum class CurveMethod { track, ba_anneal, oracle };
CurveMethod parse_curve_method(const std::string& s);

/// One point per grid value (grid must be strictly descending). The track
/// method runs IBRT1 on the grid spacing; grid values past its trivial
/// termination carry the single-cluster point.
std::vector<CurvePoint> information_curve(const ProblemSpec& spec, const std::vector<double>& betas,
                                          CurveMethod method, std::size_t clusters, const TrackerConfig& cfg);

/// Oracle curve sampled on I_X values (bsc only).
std::vector<CurvePoint> oracle_curve_by_ix(const ProblemSpec& spec, const std::vector<double>& i_x);

enum class RootSource { oracle, trivial, ba };
RootSource parse_root_source(const std::string& s);

struct EigRow {
    double beta = 0.0;
    std::vector<double> eig_re;
    std::vector<double> eig_im;
    double min_abs_one_minus_eig = 0.0;
    double sigma_min_i_minus_s = 0.0;
};

/// Eigenvalues of the BA Jacobian (S-compatible form) on a T-cluster root at
/// each beta. Trivial roots use T copies of p(y) with uniform masses.
std::vector<EigRow> eig_scan(const ProblemSpec& spec, const std::vector<double>& betas, std::size_t clusters,
                             RootSource source);

}  // namespace ibrt::tools
