#include <CLI11.hpp>

#include <iostream>

#include "config.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Perforated-domain nonlocal homogenization experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir = ".";
    std::vector<std::string> emit_fields;
    CLI::App* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Path to the INI config")->required();
    run->add_option("--output-dir", output_dir, "Directory for the CSV, summary and field files");
    run->add_option("--emit-fields", emit_fields, "Fields to dump in the plain-text grid format")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : perfhom::cli::kExitConfig;
    }

    try {
        const auto config = perfhom::cli::Config::load(config_path);
        perfhom::cli::RunOptions options;
        options.output_dir = output_dir;
        options.emit_fields = emit_fields;
        const auto report = perfhom::cli::run(config, options);
        for (const auto& path : report.written) std::cout << "wrote " << path.string() << '\n';
        if (report.exit_code != perfhom::cli::kExitOk) std::cerr << "perfhom: " << report.message << '\n';
        return report.exit_code;
    } catch (...) {
        std::string message;
        const int code = perfhom::cli::exit_code_for_current_exception(message);
        std::cerr << "perfhom: " << message << '\n';
        return code;
    }
}
