#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace zeldovich {

/// Uniformly sampled multi-channel voltage record.
struct Waveform {
    double sample_rate{12500.0};  ///< Hz
    double t0{0.0};               ///< s
    std::vector<std::string> names;
    std::vector<Eigen::VectorXd> channels;  ///< volts

    Eigen::Index length() const { return channels.empty() ? 0 : channels.front().size(); }
    double time(Eigen::Index k) const { return t0 + static_cast<double>(k) / sample_rate; }

    /// Throws DomainError when channel lengths differ, there are more than three, or the rate is not positive.
    void validate() const;
};

}  // namespace zeldovich
