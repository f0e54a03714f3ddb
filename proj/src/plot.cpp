#include "zeldovich/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "zeldovich/errors.hpp"

namespace zeldovich {

namespace {

std::string fixed(double x, int digits = 2) {
    if (!std::isfinite(x)) return "0";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
    std::string s(buf, ptr);
    if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
    return s;
}

std::string label_number(double x) {
    if (x == 0) return "0";
    const double a = std::abs(x);
    if (a >= 1e4 || a < 1e-2) {
        char buf[64];
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 1);
        return std::string(buf, ptr);
    }
    std::string s = fixed(x, a >= 100 ? 0 : 2);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colors[i % 10];
}

struct Range {
    double lo{std::numeric_limits<double>::infinity()};
    double hi{-std::numeric_limits<double>::infinity()};
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Range padded() const {
        Range r = *this;
        if (!std::isfinite(r.lo)) return {0.0, 1.0};
        if (r.hi - r.lo <= 1e-12 * std::max(1.0, std::abs(r.hi))) {
            const double d = std::max(std::abs(r.hi) * 0.05, 1e-12);
            r.lo -= d;
            r.hi += d;
        } else {
            const double d = 0.05 * (r.hi - r.lo);
            r.lo -= d;
            r.hi += d;
        }
        return r;
    }
};

// One plotting panel in pixel space.
class Panel {
public:
    Panel(double x, double y, double w, double h, Range xr, Range yr) : x_(x), y_(y), w_(w), h_(h), xr_(xr), yr_(yr) {}

    double px(double v) const { return x_ + (v - xr_.lo) / (xr_.hi - xr_.lo) * w_; }
    double py(double v) const { return y_ + h_ - (v - yr_.lo) / (yr_.hi - yr_.lo) * h_; }

    void frame(std::string& out, const std::string& xlabel, const std::string& ylabel) const {
        out += "<rect x=\"" + fixed(x_) + "\" y=\"" + fixed(y_) + "\" width=\"" + fixed(w_) + "\" height=\"" +
               fixed(h_) + "\" fill=\"none\" stroke=\"#000\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double xv = xr_.lo + (xr_.hi - xr_.lo) * i / 4.0;
            const double yv = yr_.lo + (yr_.hi - yr_.lo) * i / 4.0;
            out += "<text x=\"" + fixed(px(xv)) + "\" y=\"" + fixed(y_ + h_ + 14) +
                   "\" font-size=\"10\" text-anchor=\"middle\">" + label_number(xv) + "</text>\n";
            out += "<text x=\"" + fixed(x_ - 4) + "\" y=\"" + fixed(py(yv) + 3) +
                   "\" font-size=\"10\" text-anchor=\"end\">" + label_number(yv) + "</text>\n";
        }
        if (!xlabel.empty())
            out += "<text x=\"" + fixed(x_ + w_ / 2) + "\" y=\"" + fixed(y_ + h_ + 28) +
                   "\" font-size=\"11\" text-anchor=\"middle\">" + xlabel + "</text>\n";
        out += "<text x=\"" + fixed(x_ - 48) + "\" y=\"" + fixed(y_ + h_ / 2) +
               "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 " + fixed(x_ - 48) + " " +
               fixed(y_ + h_ / 2) + ")\">" + ylabel + "</text>\n";
    }

    void polyline(std::string& out, const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& color, bool dashed = false) const {
        out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.2\"";
        if (dashed) out += " stroke-dasharray=\"5,3\"";
        out += " points=\"";
        bool first = true;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
            if (!first) out += ' ';
            out += fixed(px(xs[i])) + "," + fixed(py(ys[i]));
            first = false;
        }
        out += "\"/>\n";
    }

private:
    double x_, y_, w_, h_;
    Range xr_, yr_;
};

std::string header(double w, double h) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           fixed(w, 0) + "\" height=\"" + fixed(h, 0) + "\" viewBox=\"0 0 " + fixed(w, 0) + " " + fixed(h, 0) +
           "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string plot_sweep(const SweepResult& sweep, const SweepResult* baseline, std::size_t phase) {
    if (sweep.empty()) throw DomainError("plot_sweep: empty sweep");
    if (phase >= sweep.phase_count()) throw DomainError("plot_sweep: phase index out of range");
    if (baseline && (baseline->empty() || phase >= baseline->phase_count()))
        throw DomainError("plot_sweep: baseline does not cover the phase");

    Range xr, yr;
    for (Eigen::Index j = 0; j < sweep.f_grid.size(); ++j) xr.add(sweep.f_grid(j));
    yr.add(0.0);
    auto amp = [](const Eigen::MatrixXcd& V, Eigen::Index row) {
        std::vector<double> out(static_cast<std::size_t>(V.cols()));
        for (Eigen::Index j = 0; j < V.cols(); ++j) out[static_cast<std::size_t>(j)] = std::abs(V(row, j));
        return out;
    };
    for (Eigen::Index i = 0; i < sweep.F_grid.size(); ++i)
        for (double v : amp(sweep.V_o[phase], i)) yr.add(v);
    if (baseline)
        for (double v : amp(baseline->V_o[phase], 0)) yr.add(v);

    const double W = 720, H = 440;
    std::string out = header(W, H);
    Panel p(80, 30, 500, 350, xr.padded(), yr.padded());
    p.frame(out, "f (Hz)", "|V_o| (V), " + sweep.labels[phase]);
    const auto xs = to_std(sweep.f_grid);
    double ly = 40;
    for (Eigen::Index i = 0; i < sweep.F_grid.size(); ++i) {
        const char* c = palette(static_cast<std::size_t>(i));
        p.polyline(out, xs, amp(sweep.V_o[phase], i), c);
        out += "<text x=\"600\" y=\"" + fixed(ly) + "\" font-size=\"11\" fill=\"" + c + "\">F = " +
               label_number(sweep.F_grid(i)) + " Hz</text>\n";
        ly += 16;
    }
    if (baseline) {
        p.polyline(out, to_std(baseline->f_grid), amp(baseline->V_o[phase], 0), "#000", true);
        out += "<text x=\"600\" y=\"" + fixed(ly) + "\" font-size=\"11\">no cylinder (dashed)</text>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string plot_stability_map(const StabilityMap& map, int mode_m) {
    if (map.f_grid.size() == 0 || map.F_grid.size() == 0 || map.R.empty())
        throw DomainError("plot_stability_map: empty grid");
    Range xr{map.f_grid.minCoeff(), map.f_grid.maxCoeff()};
    Range yr{map.F_grid.minCoeff(), map.F_grid.maxCoeff()};
    if (xr.hi == xr.lo) xr = xr.padded();
    if (yr.hi == yr.lo) yr = yr.padded();
    const double W = 720, H = 460;
    std::string out = header(W, H);
    Panel p(80, 30, 520, 360, xr, yr);

    Eigen::MatrixXd Rmax = map.R.front();
    for (const auto& R : map.R) Rmax = Rmax.cwiseMax(R);
    double scale = 0;
    for (Eigen::Index i = 0; i < Rmax.size(); ++i)
        if (std::isfinite(Rmax.data()[i])) scale = std::max(scale, std::abs(Rmax.data()[i]));
    if (scale == 0) scale = 1;

    const Eigen::Index nf = map.f_grid.size(), nF = map.F_grid.size();
    const double cw = 520.0 / static_cast<double>(nf), ch = 360.0 / static_cast<double>(nF);
    for (Eigen::Index i = 0; i < nF; ++i) {
        for (Eigen::Index j = 0; j < nf; ++j) {
            const double r = Rmax(i, j);
            // blue for positive, red for negative resistance, square-root scaled
            const double s = std::isfinite(r) ? std::sqrt(std::min(std::abs(r) / scale, 1.0)) : 0.0;
            const int fade = static_cast<int>(std::lround(255 * (1 - s)));
            char color[8];
            if (r >= 0)
                std::snprintf(color, sizeof color, "#%02x%02xff", fade, fade);
            else
                std::snprintf(color, sizeof color, "#ff%02x%02x", fade, fade);
            const double x = 80 + cw * static_cast<double>(j);
            const double y = 30 + 360 - ch * static_cast<double>(i + 1);
            out += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\" width=\"" + fixed(cw + 0.05) +
                   "\" height=\"" + fixed(ch + 0.05) + "\" fill=\"" + color + "\"/>\n";
        }
    }
    for (Eigen::Index i = 0; i < nF; ++i) {
        for (Eigen::Index j = 0; j < nf; ++j) {
            if (!map.unstable(i, j)) continue;
            const double x = 80 + cw * static_cast<double>(j);
            const double y = 30 + 360 - ch * static_cast<double>(i + 1);
            out += "<rect x=\"" + fixed(x) + "\" y=\"" + fixed(y) + "\" width=\"" + fixed(cw + 0.05) +
                   "\" height=\"" + fixed(ch + 0.05) + "\" fill=\"#000\" fill-opacity=\"0.45\"/>\n";
        }
    }
    // threshold f = m F
    std::vector<double> tx, ty;
    for (int k = 0; k <= 100; ++k) {
        const double F = yr.lo + (yr.hi - yr.lo) * k / 100.0;
        const double f = mode_m * F;
        if (f >= xr.lo && f <= xr.hi) {
            tx.push_back(f);
            ty.push_back(F);
        }
    }
    if (tx.size() > 1) p.polyline(out, tx, ty, "#000", true);
    p.frame(out, "f (Hz)", "F (Hz)");
    out += "<text x=\"612\" y=\"50\" font-size=\"11\">max R over phases</text>\n";
    out += "<text x=\"612\" y=\"66\" font-size=\"11\" fill=\"#0000ff\">R &gt; 0</text>\n";
    out += "<text x=\"612\" y=\"82\" font-size=\"11\" fill=\"#ff0000\">R &lt; 0</text>\n";
    out += "<text x=\"612\" y=\"98\" font-size=\"11\">shaded: unstable</text>\n";
    out += "<text x=\"612\" y=\"114\" font-size=\"11\">dashed: f = " + std::to_string(mode_m) + "F</text>\n";
    out += "<text x=\"612\" y=\"130\" font-size=\"11\">|R| scale " + label_number(scale) + " ohm</text>\n";
    out += "</svg>\n";
    return out;
}

std::string plot_trace(const SimTrace& trace) {
    if (trace.size() < 2) throw DomainError("plot_trace: trace has fewer than two samples");
    const std::vector<double>& t = trace.t;
    std::vector<double> logv(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i)
        logv[i] = trace.v_resistor[i] > 0 ? std::log10(trace.v_resistor[i]) : std::numeric_limits<double>::quiet_NaN();

    struct Series {
        const std::vector<double>* y;
        std::string label;
    };
    const std::vector<Series> series{{&logv, "log10 V (V)"},
                                     {&trace.f_inst, "f_inst (Hz)"},
                                     {&trace.F, "F (Hz)"},
                                     {&trace.R_net, "R_net (ohm)"}};
    const double W = 720, panel_h = 150, gap = 40;
    const double H = 30 + series.size() * (panel_h + gap) + 10;
    std::string out = header(W, H);
    Range xr{t.front(), t.back()};
    for (std::size_t s = 0; s < series.size(); ++s) {
        Range yr;
        for (double v : *series[s].y) yr.add(v);
        const double top = 20 + static_cast<double>(s) * (panel_h + gap);
        Panel p(90, top, 580, panel_h, xr, yr.padded());
        for (const auto& e : trace.events) {
            const double x = p.px(e.time);
            const char* c = e.kind == "component_failure" ? "#d62728" : (e.kind == "instability_on" ? "#2ca02c" : "#9467bd");
            out += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(x) + "\" y2=\"" +
                   fixed(top + panel_h) + "\" stroke=\"" + c + "\" stroke-dasharray=\"2,2\"/>\n";
        }
        p.polyline(out, t, *series[s].y, palette(s));
        p.frame(out, s + 1 == series.size() ? "t (s)" : "", series[s].label);
    }
    out += "</svg>\n";
    return out;
}

}  // namespace zeldovich
