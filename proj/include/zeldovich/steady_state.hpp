#pragma once

// Frequency/rotation sweeps, stability classification and least-squares fits
// of the cylinder coupling.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "zeldovich/circuit.hpp"

namespace zeldovich {

/// Evenly spaced grid of n points on [lo, hi].
Eigen::VectorXd linear_grid(double lo, double hi, Eigen::Index n);

struct PeakRecord {
    double F;          ///< rotor frequency, Hz
    double f_peak;     ///< Hz
    double amplitude;  ///< |V_o| at the peak, V
};

/// 3-point parabolic refinement of the maximum of y over the grid x.
/// Falls back to the grid maximum at the edges.
PeakRecord locate_peak(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct SweepResult {
    Eigen::VectorXd f_grid;
    Eigen::VectorXd F_grid;
    bool with_cylinder{true};
    std::vector<std::string> labels;
    // Per phase, rows index F and columns index f.
    std::vector<Eigen::MatrixXcd> V_o;
    std::vector<Eigen::MatrixXd> R;
    std::vector<Eigen::MatrixXd> L;
    std::vector<std::vector<PeakRecord>> peaks;  ///< per phase, per F

    std::size_t phase_count() const { return labels.size(); }
    bool empty() const { return labels.empty() || f_grid.size() == 0 || F_grid.size() == 0; }
};

/// Sweep of every phase over f_grid for each rotor frequency in F_grid.
/// cyl == nullptr sweeps the bare circuits (F_grid is then ignored and a single row is produced).
SweepResult frequency_sweep(std::span<const PhaseCircuit> circuits, const CylinderParams* cyl,
                            const Eigen::VectorXd& F_grid, const Eigen::VectorXd& f_grid);

inline SweepResult frequency_sweep(std::span<const PhaseCircuit> circuits, const CylinderParams* cyl, double F,
                                   const Eigen::VectorXd& f_grid) {
    return frequency_sweep(circuits, cyl, Eigen::VectorXd::Constant(1, F), f_grid);
}

struct StabilityMap {
    Eigen::VectorXd f_grid;
    Eigen::VectorXd F_grid;
    std::vector<std::string> labels;
    std::vector<Eigen::MatrixXd> R;  ///< total series R per phase; rows F, columns f
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> unstable;

    Eigen::Index unstable_count() const { return unstable.count(); }
};

/// A cell is unstable when every phase has negative total resistance.
StabilityMap stability_map(std::span<const PhaseCircuit> circuits, const CylinderParams* cyl,
                           const Eigen::VectorXd& f_grid, const Eigen::VectorXd& F_grid);

// ---------------------------------------------------------------------------
// Bounded Levenberg-Marquardt

struct LevenbergMarquardtOptions {
    int max_iterations{200};
    double relative_step{1e-6};  ///< central-difference Jacobian step, relative to max(|x|, 1)
    double tolerance{1e-14};
};

struct LevenbergMarquardtResult {
    Eigen::VectorXd x;
    double cost{0};  ///< half sum of squared residuals
    int iterations{0};
    bool converged{false};
};

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Minimises |r(x)|^2 over the box [lower, upper] by projected LM steps.
LevenbergMarquardtResult levenberg_marquardt(const ResidualFunction& residuals, Eigen::VectorXd x0,
                                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                             const LevenbergMarquardtOptions& options = {});

// ---------------------------------------------------------------------------
// Fits

struct FitPoint {
    double F;      ///< rotor frequency, Hz
    double value;  ///< R in ohm or L in henry
};

struct FitResult {
    double coupling_A{0};
    double R_circ{0};  ///< ohm; coupling fit only
    double L0{0};      ///< henry; inductance fit only
    double residual_rms{0};
    int iterations{0};
    std::vector<std::string> warnings;
};

struct FitOptions {
    LevenbergMarquardtOptions lm{};
    std::vector<double> seeds{0.05, 0.5, 5.0};  ///< starting values of the scale parameter
};

/// R(F) = R_circ + A omega L_coil Im S(f, F); free parameters A in (0, 10], R_circ in [0, 1e4].
FitResult fit_cylinder_coupling(std::span<const FitPoint> data, double f, const CylinderParams& geometry,
                                double L_coil, const FitOptions& options = {});

/// L(F) = L0 (1 + A Re S(f, F)) with A taken from cyl; free parameter L0 in (0, 10].
FitResult fit_inductance_offset(std::span<const FitPoint> data, double f, const CylinderParams& cyl,
                                const FitOptions& options = {});

}  // namespace zeldovich
