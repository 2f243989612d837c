#pragma once

#include <cstdint>
#include <string>

namespace scsc::cli {

// Each command is callable directly so the CLI surface stays a thin
// argument-parsing shell over the same code paths the tests exercise.

struct SynthOptions {
    std::string out;
    std::size_t n = 8;
    std::size_t bands = 4;     // multispectral bands B
    std::size_t pan_bands = 1; // panchromatic bands b
    std::size_t size = 32;
    int ratio = 2;
    std::uint64_t seed = 0;
};
void cmd_synth(const SynthOptions& opt);

struct TrainOptions {
    std::string data;
    std::string config; // empty = defaults
    std::string out_model;
    std::string trace; // optional "epoch,loss" file
};
void cmd_train(const TrainOptions& opt);

struct InferOptions {
    std::string model;
    std::string data;
    std::string out;
};
void cmd_infer(const InferOptions& opt);

struct EvalOptions {
    std::string pred;
    std::string ref;
    std::string out;
    int ratio = 2;
};
void cmd_eval(const EvalOptions& opt);

struct CscSolveOptions {
    std::string image; // container with a single rank-3 tensor
    std::string dict;  // container with a single rank-4 tensor
    std::string out;
    double lambda = 0.1;
    int iters = 500;
    double tol = 1e-8;
};
void cmd_csc_solve(const CscSolveOptions& opt);

struct GradCheckOptions {
    std::string config; // empty = defaults
    std::uint64_t seed = 0;
};
/// Prints the report; returns 0 when max relative error < 1e-4, else 3.
int cmd_gradcheck(const GradCheckOptions& opt);

struct CountParamsOptions {
    std::string config; // empty = defaults
    bool siem_only = false;
};
long long cmd_count_params(const CountParamsOptions& opt);

struct ExportPgmOptions {
    std::string in;
    std::string name; // container entry
    std::size_t band = 0;
    std::string out;
};
void cmd_export_pgm(const ExportPgmOptions& opt);

/// Full argument parsing and exit-code mapping:
/// 0 ok, 1 usage/config, 2 I/O, 3 numeric failure.
int run_cli(int argc, const char* const* argv);

} // namespace scsc::cli
