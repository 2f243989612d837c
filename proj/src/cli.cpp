#include "scsc/cli.hpp"

#include <fstream>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "scsc/container.hpp"
#include "scsc/metrics.hpp"
#include "scsc/run_config.hpp"
#include "scsc/solver.hpp"
#include "scsc/training.hpp"

namespace scsc::cli {

namespace {

io::RunConfig load_run_config(const std::string& path) {
    if (path.empty()) return io::RunConfig{};
    return io::RunConfig::from_file(path);
}

std::string sample_field(std::size_t i, const char* field) {
    return "sample" + std::to_string(i) + "." + field;
}

// Accepts either a dataset container (H entries) or an inference output
// (H_hat entries).
const Tensor& sample_image(const io::TensorContainer& c, std::size_t i, bool prefer_pred) {
    const std::string pred = sample_field(i, "H_hat");
    const std::string ref = sample_field(i, "H");
    if (prefer_pred && c.has(pred)) return c.tensor(pred);
    if (c.has(ref)) return c.tensor(ref);
    if (c.has(pred)) return c.tensor(pred);
    throw IoError("container has no image for sample " + std::to_string(i));
}

std::size_t count_samples(const io::TensorContainer& c) {
    std::size_t n = 0;
    while (c.has(sample_field(n, "H")) || c.has(sample_field(n, "H_hat"))) ++n;
    return n;
}

} // namespace

void cmd_synth(const SynthOptions& opt) {
    const auto samples =
        train::synth_dataset(opt.n, opt.bands, opt.pan_bands, opt.size, opt.ratio, opt.seed);
    io::save_dataset(samples, opt.out);
}

void cmd_train(const TrainOptions& opt) {
    const io::RunConfig cfg = load_run_config(opt.config);
    const auto data = io::load_dataset(opt.data);
    if (data.empty()) throw ConfigError("train: dataset is empty");
    if (data.front().hrms.extent(0) != cfg.ms_bands) {
        throw ConfigError("train: config B does not match the dataset bands");
    }
    if (data.front().pan.extent(0) != cfg.pan_bands) {
        throw ConfigError("train: config b does not match the dataset PAN bands");
    }

    net::ScscPnnModel model = net::init_params(cfg.model_config(), cfg.seed);
    train::TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.learning_rate = cfg.lr;
    tc.batch_size = cfg.batch;
    tc.seed = cfg.seed;
    tc.patch_size = int(data.front().hrms.extent(1));
    tc.ratio = cfg.ratio;
    const train::TrainResult result = train::train(model, data, tc);

    io::save_model(model, opt.out_model);
    if (!opt.trace.empty()) {
        std::ofstream out(opt.trace, std::ios::trunc);
        if (!out) throw IoError("cannot open trace file '" + opt.trace + "'");
        for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
            out << e << "," << io::format_number(result.loss_trace[e]) << "\n";
        }
        if (!out) throw IoError("write to '" + opt.trace + "' failed");
    }
}

void cmd_infer(const InferOptions& opt) {
    const net::ScscPnnModel model = io::load_model(opt.model);
    const auto data = io::load_dataset(opt.data);
    io::TensorContainer out;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const net::ForwardResult fr = net::forward(data[i].lrms_up, data[i].pan, model);
        out.add(sample_field(i, "H_hat"), fr.hrms);
    }
    out.write_file(opt.out);
}

void cmd_eval(const EvalOptions& opt) {
    const auto pred = io::TensorContainer::read_file(opt.pred);
    const auto ref = io::TensorContainer::read_file(opt.ref);
    const std::size_t n = count_samples(pred);
    if (n == 0) throw IoError("eval: prediction container holds no samples");
    if (count_samples(ref) != n) {
        throw IoError("eval: prediction and reference sample counts differ");
    }

    std::string report;
    for (std::size_t i = 0; i < n; ++i) {
        const Tensor& p = sample_image(pred, i, true);
        const Tensor& r = sample_image(ref, i, false);
        const auto m = metrics::compute_fusion_metrics(p, r, opt.ratio);
        report += std::to_string(i) + "," + io::format_number(m.psnr) + "," +
                  io::format_number(m.ssim) + "," + io::format_number(m.sam) + "," +
                  io::format_number(m.ergas) + "\n";
    }
    std::ofstream out(opt.out, std::ios::trunc);
    if (!out) throw IoError("cannot open report file '" + opt.out + "'");
    out << report;
    if (!out) throw IoError("write to '" + opt.out + "' failed");
    std::cout << "wrote " << n << " records to " << opt.out << "\n";
}

void cmd_csc_solve(const CscSolveOptions& opt) {
    const auto image_c = io::TensorContainer::read_file(opt.image);
    const auto dict_c = io::TensorContainer::read_file(opt.dict);
    if (image_c.size() != 1 || dict_c.size() != 1) {
        throw IoError("csc-solve: image and dict containers must hold exactly one tensor");
    }
    const Tensor& image = image_c.entries().front().tensor;
    const FilterBank dict(dict_c.entries().front().tensor);

    solver::IstaSettings settings;
    settings.lambda = opt.lambda;
    settings.max_iters = opt.iters;
    settings.tol = opt.tol;
    const solver::IstaResult result = solver::ista_csc(image, dict, settings);

    io::TensorContainer out;
    out.add("features", result.features);
    out.add("objective_trace",
            Tensor::from_data(Shape{std::max<std::size_t>(
                                  1, result.report.objective_trace.size())},
                              result.report.objective_trace.empty()
                                  ? std::vector<double>{0.0}
                                  : result.report.objective_trace));
    out.write_file(opt.out);
    std::cout << "iterations=" << result.report.iterations_run
              << " converged=" << (result.report.converged ? "yes" : "no")
              << " objective=" << io::format_number(result.report.objective_trace.back())
              << "\n";
}

int cmd_gradcheck(const GradCheckOptions& opt) {
    const io::RunConfig cfg = load_run_config(opt.config);
    const auto report = train::gradient_check(cfg.model_config(), opt.seed);
    std::cout << "max_rel_error=" << io::format_number(report.max_rel_error)
              << " checked=" << report.checked << " skipped=" << report.skipped << "\n";
    return report.max_rel_error < 1e-4 ? 0 : 3;
}

long long cmd_count_params(const CountParamsOptions& opt) {
    const io::RunConfig cfg = load_run_config(opt.config);
    const long long count = opt.siem_only ? net::count_params_siem(cfg.model_config())
                                          : net::count_params(cfg.model_config());
    std::cout << count << "\n";
    return count;
}

void cmd_export_pgm(const ExportPgmOptions& opt) {
    const auto c = io::TensorContainer::read_file(opt.in);
    const Tensor& t = c.tensor(opt.name);
    if (t.rank() != 3) throw DimensionError("export-pgm: entry must be rank 3 [C, M, N]");
    if (opt.band >= t.extent(0)) throw ConfigError("export-pgm: band out of range");
    const std::size_t plane = t.extent(1) * t.extent(2);
    std::vector<double> band(t.data() + opt.band * plane, t.data() + (opt.band + 1) * plane);
    io::write_pgm16(Tensor::from_data(Shape{t.extent(1), t.extent(2)}, std::move(band)),
                    opt.out);
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Convolutional sparse coding toolkit for pansharpening"};
    app.require_subcommand(1);

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    synth_cmd->add_option("--out", synth.out, "output dataset container")->required();
    synth_cmd->add_option("--n", synth.n, "number of samples");
    synth_cmd->add_option("--bands", synth.bands, "multispectral bands");
    synth_cmd->add_option("--pan-bands", synth.pan_bands, "panchromatic bands");
    synth_cmd->add_option("--size", synth.size, "patch size");
    synth_cmd->add_option("--ratio", synth.ratio, "spatial ratio");
    synth_cmd->add_option("--seed", synth.seed, "random seed");

    TrainOptions tr;
    auto* train_cmd = app.add_subcommand("train", "train a model on a dataset");
    train_cmd->add_option("--data", tr.data, "dataset container")->required();
    train_cmd->add_option("--config", tr.config, "run config file");
    train_cmd->add_option("--out-model", tr.out_model, "checkpoint path")->required();
    train_cmd->add_option("--trace", tr.trace, "loss trace file (epoch,loss)");

    InferOptions inf;
    auto* infer_cmd = app.add_subcommand("infer", "reconstruct images with a checkpoint");
    infer_cmd->add_option("--model", inf.model, "checkpoint path")->required();
    infer_cmd->add_option("--data", inf.data, "dataset container")->required();
    infer_cmd->add_option("--out", inf.out, "output container")->required();

    EvalOptions ev;
    auto* eval_cmd = app.add_subcommand("eval", "fusion quality metrics");
    eval_cmd->add_option("--pred", ev.pred, "prediction container")->required();
    eval_cmd->add_option("--ref", ev.ref, "reference container")->required();
    eval_cmd->add_option("--out", ev.out, "report file")->required();
    eval_cmd->add_option("--ratio", ev.ratio, "spatial ratio for ERGAS");

    CscSolveOptions cs;
    auto* csc_cmd = app.add_subcommand("csc-solve", "classical sparse coding solve");
    csc_cmd->add_option("--image", cs.image, "image container")->required();
    csc_cmd->add_option("--dict", cs.dict, "dictionary container")->required();
    csc_cmd->add_option("--out", cs.out, "output container")->required();
    csc_cmd->add_option("--lambda", cs.lambda, "sparsity weight");
    csc_cmd->add_option("--iters", cs.iters, "iteration budget");
    csc_cmd->add_option("--tol", cs.tol, "relative objective-change tolerance");

    GradCheckOptions gc;
    auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference gradient check");
    grad_cmd->add_option("--config", gc.config, "run config file");
    grad_cmd->add_option("--seed", gc.seed, "random seed");

    CountParamsOptions cp;
    auto* count_cmd = app.add_subcommand("count-params", "learnable parameter count");
    count_cmd->add_option("--config", cp.config, "run config file");
    count_cmd->add_flag("--siem-only", cp.siem_only, "count only the side module");

    ExportPgmOptions ep;
    auto* pgm_cmd = app.add_subcommand("export-pgm", "export one band as 16-bit PGM");
    pgm_cmd->add_option("--in", ep.in, "input container")->required();
    pgm_cmd->add_option("--name", ep.name, "entry name")->required();
    pgm_cmd->add_option("--band", ep.band, "band index");
    pgm_cmd->add_option("--out", ep.out, "output PGM file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*synth_cmd) {
            cmd_synth(synth);
        } else if (*train_cmd) {
            cmd_train(tr);
        } else if (*infer_cmd) {
            cmd_infer(inf);
        } else if (*eval_cmd) {
            cmd_eval(ev);
        } else if (*csc_cmd) {
            cmd_csc_solve(cs);
        } else if (*grad_cmd) {
            return cmd_gradcheck(gc);
        } else if (*count_cmd) {
            cmd_count_params(cp);
        } else if (*pgm_cmd) {
            cmd_export_pgm(ep);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace scsc::cli
