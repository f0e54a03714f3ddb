#include "zeldovich/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "zeldovich/errors.hpp"

namespace zeldovich {

namespace fs = std::filesystem;

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0) return "0";  // folds -0
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw NumericError("format_number: conversion failed");
    return std::string(buf, ptr);
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ += ',';
        out_ += header[i];
    }
    out_ += '\n';
}

void CsvBuilder::sep() {
    if (filled_ == columns_) throw DomainError("CsvBuilder: too many fields in row");
    if (filled_++) out_ += ',';
}

CsvBuilder& CsvBuilder::operator<<(double x) {
    sep();
    out_ += format_number(x);
    return *this;
}

CsvBuilder& CsvBuilder::operator<<(const std::string& s) {
    sep();
    out_ += s;
    return *this;
}

void CsvBuilder::end_row() {
    if (filled_ != columns_) throw DomainError("CsvBuilder: row has too few fields");
    out_ += '\n';
    filled_ = 0;
}

void ArtifactSet::add(std::string name, std::string content) {
    files_.emplace_back(std::move(name), std::move(content));
}

std::vector<fs::path> ArtifactSet::commit(const fs::path& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

    std::vector<std::pair<fs::path, fs::path>> staged;
    auto discard = [&] {
        for (const auto& [tmp, final_path] : staged) fs::remove(tmp, ec);
    };
    for (const auto& [name, content] : files_) {
        const fs::path final_path = dir / name;
        const fs::path tmp = dir / ("." + name + ".tmp");
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.close();
        staged.emplace_back(tmp, final_path);
        if (!out) {
            discard();
            throw IoError("cannot write '" + tmp.string() + "'");
        }
    }
    std::vector<fs::path> written;
    for (const auto& [tmp, final_path] : staged) {
        fs::rename(tmp, final_path, ec);
        if (ec) {
            discard();
            throw IoError("cannot rename into '" + final_path.string() + "': " + ec.message());
        }
        written.push_back(final_path);
    }
    return written;
}

std::string sweep_csv(const SweepResult& s) {
    CsvBuilder csv({"f_hz", "F_hz", "phase_label", "Vo_re", "Vo_im", "R_ohm", "L_henry"});
    for (Eigen::Index i = 0; i < s.F_grid.size(); ++i) {
        for (std::size_t k = 0; k < s.phase_count(); ++k) {
            for (Eigen::Index j = 0; j < s.f_grid.size(); ++j) {
                const auto v = s.V_o[k](i, j);
                csv << s.f_grid(j) << s.F_grid(i) << s.labels[k] << v.real() << v.imag() << s.R[k](i, j)
                    << s.L[k](i, j);
                csv.end_row();
            }
        }
    }
    return csv.str();
}

std::string peaks_csv(const SweepResult& s) {
    CsvBuilder csv({"F_hz", "phase_label", "f_peak_hz", "peak_volt"});
    for (std::size_t i = 0; i < static_cast<std::size_t>(s.F_grid.size()); ++i) {
        for (std::size_t k = 0; k < s.phase_count(); ++k) {
            const auto& p = s.peaks[k][i];
            csv << p.F << s.labels[k] << p.f_peak << p.amplitude;
            csv.end_row();
        }
    }
    return csv.str();
}

std::string map_csv(const StabilityMap& m) {
    std::vector<std::string> header{"f_hz", "F_hz"};
    for (const auto& l : m.labels) header.push_back("R_" + l + "_ohm");
    header.emplace_back("unstable");
    CsvBuilder csv(header);
    for (Eigen::Index i = 0; i < m.F_grid.size(); ++i) {
        for (Eigen::Index j = 0; j < m.f_grid.size(); ++j) {
            csv << m.f_grid(j) << m.F_grid(i);
            for (const auto& R : m.R) csv << R(i, j);
            csv << (m.unstable(i, j) ? 1.0 : 0.0);
            csv.end_row();
        }
    }
    return csv.str();
}

std::string trace_csv(const SimTrace& tr) {
    CsvBuilder csv({"t_s", "amplitude_a", "v_resistor_volt", "f_inst_hz", "F_hz", "R_net_ohm", "L_mode_henry",
                    "E_field_j", "E_rotor_j", "heat_j", "W_motor_j", "W_loss_j", "W_noise_j", "carrier_phase_rad"});
    for (std::size_t i = 0; i < tr.size(); ++i) {
        csv << tr.t[i] << tr.amplitude[i] << tr.v_resistor[i] << tr.f_inst[i] << tr.F[i] << tr.R_net[i]
            << tr.L_mode[i] << tr.E_field[i] << tr.E_rotor[i] << tr.heat[i] << tr.W_motor[i] << tr.W_loss[i]
            << tr.W_noise[i] << tr.carrier_phase[i];
        csv.end_row();
    }
    return csv.str();
}

std::string events_jsonl(const SimTrace& tr) {
    std::string out;
    for (const auto& e : tr.events) {
        nlohmann::ordered_json j;
        j["time"] = e.time;
        j["kind"] = e.kind;
        j["detail"] = e.detail;
        out += j.dump() + "\n";
    }
    return out;
}

std::string waveform_csv(const Waveform& w) {
    w.validate();
    std::vector<std::string> header{"t_s"};
    for (std::size_t k = 0; k < w.channels.size(); ++k) header.push_back("v" + std::to_string(k + 1) + "_volt");
    CsvBuilder csv(header);
    for (Eigen::Index i = 0; i < w.length(); ++i) {
        csv << w.time(i);
        for (const auto& c : w.channels) csv << c(i);
        csv.end_row();
    }
    return csv.str();
}

std::string envelope_csv(const std::vector<std::string>& labels, const std::vector<EnvelopeTrace>& env,
                         const std::vector<Eigen::VectorXd>& R) {
    CsvBuilder csv({"t_s", "phase_label", "amplitude_volt", "phase_rad", "f_inst_hz", "R_ohm"});
    for (std::size_t k = 0; k < env.size(); ++k) {
        for (Eigen::Index i = 0; i < env[k].size(); ++i) {
            csv << env[k].t(i) << labels[k] << env[k].amplitude(i) << env[k].phase(i) << env[k].f_inst(i) << R[k](i);
            csv.end_row();
        }
    }
    return csv.str();
}

std::string spectrogram_csv(const Spectrogram& s, double f_lo, double f_hi) {
    CsvBuilder csv({"t_s", "f_hz", "db"});
    for (Eigen::Index i = 0; i < s.t.size(); ++i) {
        for (Eigen::Index j = 0; j < s.f.size(); ++j) {
            if (s.f(j) < f_lo || s.f(j) > f_hi) continue;
            csv << s.t(i) << s.f(j) << s.db(i, j);
            csv.end_row();
        }
    }
    return csv.str();
}

std::string fit_csv(const std::vector<FitPoint>& data, const std::vector<double>& model) {
    CsvBuilder csv({"F_hz", "data", "model"});
    for (std::size_t i = 0; i < data.size(); ++i) {
        csv << data[i].F << data[i].value << model[i];
        csv.end_row();
    }
    return csv.str();
}

namespace {

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.emplace_back();
        rows.push_back(std::move(fields));
    }
    return rows;
}

double parse_field(const std::string& s, std::size_t row, std::size_t col) {
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    double v = 0;
    if (b != std::string::npos) {
        const auto [ptr, ec] = std::from_chars(s.data() + b, s.data() + e + 1, v);
        if (ec == std::errc() && ptr == s.data() + e + 1) return v;
    }
    throw DomainError("csv row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1) + ": '" + s +
                      "' is not a number");
}

}  // namespace

Waveform parse_waveform_csv(const std::string& text) {
    const auto rows = split_csv(text);
    if (rows.size() < 3) throw DomainError("waveform csv: need a header and at least two samples");
    const auto& header = rows.front();
    if (header.size() < 2 || header.size() > 4 || header[0] != "t_s") {
        throw DomainError("waveform csv: header must be t_s followed by one to three voltage columns");
    }
    const std::size_t nch = header.size() - 1;
    const auto n = static_cast<Eigen::Index>(rows.size() - 1);
    Eigen::VectorXd t(n);
    std::vector<Eigen::VectorXd> ch(nch, Eigen::VectorXd(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(i) + 1;
        if (rows[r].size() != header.size()) {
            throw DomainError("waveform csv row " + std::to_string(r + 1) + ": expected " +
                              std::to_string(header.size()) + " fields");
        }
        t(i) = parse_field(rows[r][0], r, 0);
        for (std::size_t k = 0; k < nch; ++k) ch[k](i) = parse_field(rows[r][k + 1], r, k + 1);
    }
    const double dt = (t(n - 1) - t(0)) / static_cast<double>(n - 1);
    if (!(dt > 0)) throw DomainError("waveform csv: time column must increase");
    for (Eigen::Index i = 1; i < n; ++i) {
        if (std::abs(t(i) - t(0) - static_cast<double>(i) * dt) > 1e-3 * dt) {
            throw DomainError("waveform csv: time column is not uniformly sampled near row " + std::to_string(i + 2));
        }
    }
    Waveform w;
    w.sample_rate = 1.0 / dt;
    w.t0 = t(0);
    for (std::size_t k = 0; k < nch; ++k) w.names.push_back(header[k + 1]);
    w.channels = std::move(ch);
    w.validate();
    return w;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Waveform read_waveform_csv(const fs::path& path) { return parse_waveform_csv(read_text_file(path)); }

std::vector<FitPoint> parse_fit_csv(const std::string& text) {
    const auto rows = split_csv(text);
    if (rows.size() < 2) throw DomainError("fit csv: need a header and data rows");
    std::vector<FitPoint> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 2) throw DomainError("fit csv row " + std::to_string(r + 1) + ": expected 2 fields");
        out.push_back({parse_field(rows[r][0], r, 0), parse_field(rows[r][1], r, 1)});
    }
    return out;
}

}  // namespace zeldovich
