#include "zeldovich/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zeldovich/errors.hpp"

namespace zeldovich {

Eigen::VectorXd linear_grid(double lo, double hi, Eigen::Index n) {
    if (n < 1) {
        throw DomainError("linear_grid: need at least one point");
    }
    if (n == 1) {
        return Eigen::VectorXd::Constant(1, lo);
    }
    return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

PeakRecord locate_peak(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() == 0 || x.size() != y.size()) {
        throw DomainError("locate_peak: empty or mismatched input");
    }
    Eigen::Index k = 0;
    y.maxCoeff(&k);
    if (k == 0 || k == x.size() - 1) {
        return {0.0, x(k), y(k)};
    }
    // Parabola through the three points around the maximum (non-uniform spacing allowed).
    const double x0 = x(k - 1), x1 = x(k), x2 = x(k + 1);
    const double y0 = y(k - 1), y1 = y(k), y2 = y(k + 1);
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);
    if (!(a < 0)) {
        return {0.0, x1, y1};
    }
    const double b = d01 - a * (x0 + x1);
    const double c = y0 - a * x0 * x0 - b * x0;
    const double xp = std::clamp(-b / (2 * a), x0, x2);
    return {0.0, xp, (a * xp + b) * xp + c};
}

SweepResult frequency_sweep(std::span<const PhaseCircuit> circuits, const CylinderParams* cyl,
                            const Eigen::VectorXd& F_grid, const Eigen::VectorXd& f_grid) {
    if (circuits.empty()) {
        throw DomainError("frequency_sweep: no circuits");
    }
    if (f_grid.size() == 0) {
        throw DomainError("frequency_sweep: empty frequency grid");
    }
    if (cyl && F_grid.size() == 0) {
        throw DomainError("frequency_sweep: empty rotor-frequency grid");
    }
    SweepResult out;
    out.f_grid = f_grid;
    out.with_cylinder = cyl != nullptr;
    out.F_grid = cyl ? F_grid : Eigen::VectorXd::Zero(1);
    const Eigen::Index nF = out.F_grid.size();
    const Eigen::Index nf = f_grid.size();

    for (const auto& c : circuits) {
        out.labels.push_back(c.label);
        Eigen::MatrixXcd V(nF, nf);
        Eigen::MatrixXd R(nF, nf);
        Eigen::MatrixXd L(nF, nf);
        std::vector<PeakRecord> peaks;
        for (Eigen::Index i = 0; i < nF; ++i) {
            const double F = out.F_grid(i);
            for (Eigen::Index j = 0; j < nf; ++j) {
                const double f = f_grid(j);
                V(i, j) = transfer(c, cyl, f, F);
                const auto rl = total_RL(extract_impedance(c.drive(), V(i, j), f, c), c, f);
                R(i, j) = rl.R;
                L(i, j) = rl.L;
            }
            auto peak = locate_peak(f_grid, V.row(i).cwiseAbs().transpose());
            peak.F = F;
            peaks.push_back(peak);
        }
        out.V_o.push_back(std::move(V));
        out.R.push_back(std::move(R));
        out.L.push_back(std::move(L));
        out.peaks.push_back(std::move(peaks));
    }
    return out;
}

StabilityMap stability_map(std::span<const PhaseCircuit> circuits, const CylinderParams* cyl,
                           const Eigen::VectorXd& f_grid, const Eigen::VectorXd& F_grid) {
    if (circuits.empty() || f_grid.size() == 0 || F_grid.size() == 0) {
        throw DomainError("stability_map: empty input");
    }
    StabilityMap out;
    out.f_grid = f_grid;
    out.F_grid = F_grid;
    Eigen::MatrixXd worst = Eigen::MatrixXd::Constant(F_grid.size(), f_grid.size(),
                                                      -std::numeric_limits<double>::infinity());
    for (const auto& c : circuits) {
        out.labels.push_back(c.label);
        Eigen::MatrixXd R(F_grid.size(), f_grid.size());
        for (Eigen::Index i = 0; i < F_grid.size(); ++i) {
            for (Eigen::Index j = 0; j < f_grid.size(); ++j) {
                R(i, j) = total_RL(coil_cylinder_impedance(c, cyl, f_grid(j), F_grid(i)), c, f_grid(j)).R;
            }
        }
        worst = worst.cwiseMax(R);
        out.R.push_back(std::move(R));
    }
    out.unstable = worst.array() < 0.0;
    return out;
}

LevenbergMarquardtResult levenberg_marquardt(const ResidualFunction& residuals, Eigen::VectorXd x0,
                                             const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                             const LevenbergMarquardtOptions& options) {
    const Eigen::Index n = x0.size();
    if (lower.size() != n || upper.size() != n || (lower.array() > upper.array()).any()) {
        throw DomainError("levenberg_marquardt: inconsistent bounds");
    }
    auto project = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.cwiseMax(lower).cwiseMin(upper); };
    auto cost_of = [](const Eigen::VectorXd& r) { return 0.5 * r.squaredNorm(); };

    LevenbergMarquardtResult out;
    out.x = project(x0);
    Eigen::VectorXd r = residuals(out.x);
    out.cost = cost_of(r);
    if (!std::isfinite(out.cost)) {
        throw NumericError("levenberg_marquardt: non-finite residual at the starting point");
    }
    double lambda = 1e-3;

    for (out.iterations = 1; out.iterations <= options.max_iterations; ++out.iterations) {
        if (out.cost == 0.0) {
            out.converged = true;
            return out;
        }
        Eigen::MatrixXd J(r.size(), n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double h = options.relative_step * std::max(std::abs(out.x(k)), 1.0);
            Eigen::VectorXd xp = out.x, xm = out.x;
            xp(k) += h;
            xm(k) -= h;
            J.col(k) = (residuals(xp) - residuals(xm)) / (2 * h);
        }
        const Eigen::VectorXd g = J.transpose() * r;
        const Eigen::MatrixXd H = J.transpose() * J;
        const Eigen::VectorXd scale = H.diagonal().cwiseMax(1e-12);

        bool accepted = false;
        for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
            Eigen::MatrixXd A = H;
            A.diagonal() += lambda * scale;
            const Eigen::VectorXd dx = A.ldlt().solve(-g);
            const Eigen::VectorXd xn = project(out.x + dx);
            const Eigen::VectorXd step = xn - out.x;
            const Eigen::VectorXd rn = residuals(xn);
            const double cn = cost_of(rn);
            if (std::isfinite(cn) && cn <= out.cost) {
                const double decrease = out.cost - cn;
                const bool small_step = step.norm() <= options.tolerance * (out.x.norm() + options.tolerance);
                out.x = xn;
                r = rn;
                out.cost = cn;
                lambda = std::max(lambda / 10, 1e-12);
                accepted = true;
                if (decrease <= options.tolerance * cn || small_step) {
                    out.converged = true;
                    return out;
                }
            } else {
                lambda *= 10;
            }
        }
        if (!accepted) {
            // No downhill step at any damping: stationary within round-off.
            out.converged = true;
            return out;
        }
    }
    out.iterations = options.max_iterations;
    return out;
}

namespace {

void check_fit_data(std::span<const FitPoint> data, const char* who) {
    if (data.size() < 5) {
        throw DomainError(std::string(who) + ": need at least 5 data points");
    }
    for (const auto& p : data) {
        if (!std::isfinite(p.F) || !std::isfinite(p.value)) {
            throw DomainError(std::string(who) + ": non-finite data point");
        }
    }
}

std::vector<std::string> side_warnings(std::span<const FitPoint> data, double f, int mode_m) {
    const double threshold = f / mode_m;
    const bool any_below = std::any_of(data.begin(), data.end(), [&](const FitPoint& p) { return p.F < threshold; });
    const bool any_above = std::any_of(data.begin(), data.end(), [&](const FitPoint& p) { return p.F > threshold; });
    if (any_below && any_above) {
        return {};
    }
    return {"all data lie on one side of the threshold F = f/m; coupling and offset are poorly separated"};
}

// Runs the LM from each seed and keeps the lowest converged cost.
LevenbergMarquardtResult best_of(const ResidualFunction& residuals, const std::vector<Eigen::VectorXd>& starts,
                                 const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                 const LevenbergMarquardtOptions& options, const char* who) {
    LevenbergMarquardtResult best;
    bool have = false;
    for (const auto& x0 : starts) {
        auto res = levenberg_marquardt(residuals, x0, lower, upper, options);
        if (res.converged && (!have || res.cost < best.cost)) {
            best = res;
            have = true;
        }
    }
    if (!have) {
        throw ConvergenceError(std::string(who) + ": no start converged within the iteration budget");
    }
    return best;
}

}  // namespace

FitResult fit_cylinder_coupling(std::span<const FitPoint> data, double f, const CylinderParams& geometry,
                                double L_coil, const FitOptions& options) {
    check_fit_data(data, "fit_cylinder_coupling");
    if (!(f > 0) || !(L_coil > 0)) {
        throw DomainError("fit_cylinder_coupling: f and L_coil must be > 0");
    }
    geometry.validate();
    CylinderParams unit = geometry;
    unit.coupling_A = 1.0;
    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::VectorXd basis(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = data[static_cast<std::size_t>(i)];
        basis(i) = cylinder_impedance(unit, L_coil, constants::two_pi * f, constants::two_pi * p.F).resistance;
        y(i) = p.value;
    }
    const ResidualFunction residuals = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return (x(1) + x(0) * basis.array() - y.array()).matrix();
    };
    const Eigen::Vector2d lower(1e-12, 0.0);
    const Eigen::Vector2d upper(10.0, 1e4);
    const double offset_seed = std::clamp(y.mean(), 0.0, 1e4);
    std::vector<Eigen::VectorXd> starts;
    for (double s : options.seeds) starts.push_back(Eigen::Vector2d(s, offset_seed));

    const auto best = best_of(residuals, starts, lower, upper, options.lm, "fit_cylinder_coupling");
    FitResult out;
    out.coupling_A = best.x(0);
    out.R_circ = best.x(1);
    out.residual_rms = std::sqrt(2 * best.cost / static_cast<double>(n));
    out.iterations = best.iterations;
    out.warnings = side_warnings(data, f, geometry.mode_m);
    return out;
}

FitResult fit_inductance_offset(std::span<const FitPoint> data, double f, const CylinderParams& cyl,
                                const FitOptions& options) {
    check_fit_data(data, "fit_inductance_offset");
    if (!(f > 0)) {
        throw DomainError("fit_inductance_offset: f must be > 0");
    }
    cyl.validate();
    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::VectorXd factor(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = data[static_cast<std::size_t>(i)];
        // L0 + Lcyl = L0 (1 + A Re S) because Lcyl is proportional to the coil inductance.
        factor(i) = 1.0 + cylinder_impedance(cyl, 1.0, constants::two_pi * f, constants::two_pi * p.F).inductance;
        y(i) = p.value;
    }
    const ResidualFunction residuals = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return (x(0) * factor.array() - y.array()).matrix();
    };
    const Eigen::VectorXd lower = Eigen::VectorXd::Constant(1, 1e-12);
    const Eigen::VectorXd upper = Eigen::VectorXd::Constant(1, 10.0);
    std::vector<Eigen::VectorXd> starts;
    for (double s : options.seeds) starts.push_back(Eigen::VectorXd::Constant(1, s));

    const auto best = best_of(residuals, starts, lower, upper, options.lm, "fit_inductance_offset");
    FitResult out;
    out.coupling_A = cyl.coupling_A;
    out.L0 = best.x(0);
    out.residual_rms = std::sqrt(2 * best.cost / static_cast<double>(n));
    out.iterations = best.iterations;
    out.warnings = side_warnings(data, f, cyl.mode_m);
    return out;
}

}  // namespace zeldovich
