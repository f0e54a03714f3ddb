#pragma once

// CSV / JSON-lines serialisation and atomic artifact output. Numbers are
// written with std::to_chars (shortest round-trip, '.' separator) so output
// never depends on the process locale.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "zeldovich/dynamics.hpp"
#include "zeldovich/signal.hpp"
#include "zeldovich/steady_state.hpp"
#include "zeldovich/waveform.hpp"

namespace zeldovich {

std::string format_number(double x);

class CsvBuilder {
public:
    explicit CsvBuilder(const std::vector<std::string>& header);
    CsvBuilder& operator<<(double x);
    CsvBuilder& operator<<(const std::string& s);
    void end_row();
    const std::string& str() const { return out_; }

private:
    void sep();
    std::string out_;
    std::size_t columns_;
    std::size_t filled_{0};
};

/// Files are collected in memory and written by commit(): each goes to a
/// temporary sibling first and all are renamed into place only after every
/// write succeeded.
class ArtifactSet {
public:
    void add(std::string name, std::string content);
    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }
    std::vector<std::filesystem::path> commit(const std::filesystem::path& dir) const;

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string sweep_csv(const SweepResult& s);
std::string peaks_csv(const SweepResult& s);
std::string map_csv(const StabilityMap& m);
std::string trace_csv(const SimTrace& tr);
std::string events_jsonl(const SimTrace& tr);
std::string waveform_csv(const Waveform& w);
std::string envelope_csv(const std::vector<std::string>& labels, const std::vector<EnvelopeTrace>& env,
                         const std::vector<Eigen::VectorXd>& R);
std::string spectrogram_csv(const Spectrogram& s, double f_lo, double f_hi);
std::string fit_csv(const std::vector<FitPoint>& data, const std::vector<double>& model);

/// Reads t_s plus one to three voltage columns. The time column must be
/// uniformly spaced; sample_rate and t0 are taken from it.
Waveform parse_waveform_csv(const std::string& text);
Waveform read_waveform_csv(const std::filesystem::path& path);

/// Two columns, F_hz and value, with a header row.
std::vector<FitPoint> parse_fit_csv(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace zeldovich
