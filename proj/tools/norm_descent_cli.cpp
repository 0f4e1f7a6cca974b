// norm-descent: analyze Hessians, run single optimizations, and sweep the
// GD vs. signGD quadratic grid.
//
// Exit codes: 0 success, 2 input error, 3 divergence.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "norm_descent/norm_descent.hpp"

namespace nd = norm_descent;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitDivergence = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw nd::InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw nd::InputError("cannot write '" + out_path + "'");
    out << text;
}

int cmd_analyze(const std::string& path) {
    const auto h = nd::parse_matrix(read_file(path));
    if (h.dim() > nd::kBruteForceMaxDim)
        std::cerr << "warning: d = " << h.dim() << " exceeds " << nd::kBruteForceMaxDim
                  << "; Linf_exact omitted\n";
    std::cout << nd::format_report_json(nd::analyze(h)) << std::flush;
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_path) {
    const auto cfg = nd::parse_run_config(nd::parse_json_text(read_file(config_path)));
    try {
        emit(nd::format_trace_csv(nd::execute_run(cfg)), out_path);
    } catch (const nd::DivergenceError& e) {
        emit(nd::format_trace_csv(e.partial()), out_path);
        std::cerr << "error: " << e.what() << '\n';
        return kExitDivergence;
    }
    return 0;
}

int cmd_quadgrid(const std::string& config_path, const std::string& out_path, const std::string& dump_dir) {
    const auto cfg = nd::parse_grid_config(nd::parse_json_text(read_file(config_path)));
    const auto result = nd::run_quadgrid(cfg, nd::thread_count_from_env(), !dump_dir.empty());
    std::cerr << "quadgrid: " << result.cells.size() << " cells\n";
    emit(nd::format_grid_csv(result.cells), out_path);
    if (!dump_dir.empty()) {
        std::filesystem::create_directories(dump_dir);
        for (std::size_t k = 0; k < result.cells.size(); ++k) {
            const auto base = std::filesystem::path(dump_dir) / ("cell_" + std::to_string(k));
            emit(nd::format_points_csv(result.x0_gd[k]), base.string() + "_gd.csv");
            emit(nd::format_points_csv(result.x0_signgd[k]), base.string() + "_signgd.csv");
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steepest descent under arbitrary norms: analysis and experiments"};
    app.require_subcommand(1);

    std::string matrix_path, config_path, out_path, dump_dir;

    auto* analyze = app.add_subcommand("analyze", "Smoothness report for a symmetric matrix (JSON)");
    analyze->add_option("matrix", matrix_path, "Matrix text file")->required();

    auto* run = app.add_subcommand("run", "Run one optimizer from a JSON config (trace CSV)");
    run->add_option("--config", config_path, "Run config")->required();
    run->add_option("--out", out_path, "Output file (default stdout)");

    auto* grid = app.add_subcommand("quadgrid", "GD vs. signGD over a (lambda_max, theta) grid (CSV)");
    grid->add_option("--config", config_path, "Grid config")->required();
    grid->add_option("--out", out_path, "Output file (default stdout)");
    grid->add_option("--dump-x0", dump_dir, "Directory for the starting points each method consumed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*analyze) return cmd_analyze(matrix_path);
        if (*run) return cmd_run(config_path, out_path);
        return cmd_quadgrid(config_path, out_path, dump_dir);
    } catch (const nd::DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
}
