#pragma once

#include <cstdint>
#include <istream>
#include <string>

#include "scsc/network.hpp"

namespace scsc::io {

/// Flat key=value run configuration. Recognized keys:
///   k, s, T, b, B, ratio, epochs, lr, batch, seed, sigma, lambda, rounds
/// Unknown keys are rejected. '#' starts a comment, blank lines are
/// ignored. sigma <= 0 means "use ratio/2".
struct RunConfig {
    std::size_t filters = 64;    // k
    std::size_t kernel_size = 3; // s
    std::size_t blocks = 4;      // T
    std::size_t pan_bands = 1;   // b
    std::size_t ms_bands = 4;    // B
    int ratio = 2;
    int epochs = 200;
    double lr = 5e-4;
    int batch = 8;
    std::uint64_t seed = 0;
    double sigma = -1.0;
    double lambda = 0.1;
    int rounds = 1;

    double effective_sigma() const { return sigma > 0.0 ? sigma : 0.5 * double(ratio); }
    net::ModelConfig model_config() const;
    void validate() const;

    static RunConfig parse(std::istream& in);
    static RunConfig from_file(const std::string& path);
};

} // namespace scsc::io
