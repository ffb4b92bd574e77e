#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ambigate/errors.hpp"
#include "app_config.hpp"
#include "commands.hpp"

namespace {

struct GlobalFlags {
    std::string config_path;
    double alpha = 0.0;
    double beta = 0.0;
    bool stub = false;
    std::uint64_t seed = 0;
    std::string calibration;
    std::string backend_url;
    std::string model;
    std::string templates;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pre-execution ambiguity gate for natural-language robot instructions"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "JSON config file");
    auto* alpha_opt = app.add_option("--alpha", flags.alpha, "significance level in (0,1)");
    auto* beta_opt = app.add_option("--beta", flags.beta, "variance weight >= 0");
    auto* stub_opt = app.add_flag("--stub", flags.stub, "deterministic offline evaluators");
    auto* seed_opt = app.add_option("--seed", flags.seed, "stub evaluator seed");
    auto* cal_opt = app.add_option("--calibration", flags.calibration, "calibration artifact path");
    auto* url_opt = app.add_option("--backend-url", flags.backend_url, "chat backend base URL");
    auto* model_opt = app.add_option("--model", flags.model, "backend model name");
    auto* tpl_opt = app.add_option("--templates", flags.templates, "prompt template directory");

    std::string dataset_path;
    std::string out_path;
    std::string cache_path;
    auto* calibrate = app.add_subcommand("calibrate", "score a labeled dataset and persist statistics");
    calibrate->add_option("dataset", dataset_path, "labeled dataset (.jsonl)")->required();
    calibrate->add_option("--out", out_path, "calibration artifact to write")->required();
    auto* calibrate_cache = calibrate->add_option("--cache", cache_path, "score cache path");

    std::string text;
    std::string context;
    auto* classify = app.add_subcommand("classify", "classify one instruction");
    classify->add_option("text", text, "instruction text")->required();
    auto* context_opt = classify->add_option("--context", context, "scene or procedure context");

    std::string eval_path;
    std::string json_path;
    auto* evaluate = app.add_subcommand("evaluate", "run the metrics harness on a labeled dataset");
    evaluate->add_option("dataset", eval_path, "evaluation dataset (.jsonl)")->required();
    auto* evaluate_json = evaluate->add_option("--json", json_path, "also write the report as JSON");
    auto* evaluate_cache = evaluate->add_option("--cache", cache_path, "score cache path");

    auto* repl = app.add_subcommand("repl", "interactive clarification loop");

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "run the HTTP gate service");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "bind port");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ambigate::kExitOperationalError;
    }

    ambigate::AppConfig config;
    try {
        if (!flags.config_path.empty()) {
            config = ambigate::load_app_config(flags.config_path);
        }
        ambigate::apply_env_overrides(config);
        if (alpha_opt->count() > 0) config.conformal.alpha = flags.alpha;
        if (beta_opt->count() > 0) config.conformal.beta = flags.beta;
        if (stub_opt->count() > 0) config.stub_mode = flags.stub;
        if (seed_opt->count() > 0) config.stub_seed = flags.seed;
        if (cal_opt->count() > 0) config.calibration_path = flags.calibration;
        if (url_opt->count() > 0) config.backend.base_url = flags.backend_url;
        if (model_opt->count() > 0) config.backend.model_name = flags.model;
        if (tpl_opt->count() > 0) config.template_dir = flags.templates;
        config.conformal.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ambigate::kExitOperationalError;
    }

    const auto optional_path =
        [](const CLI::Option* opt,
           const std::string& value) -> std::optional<std::filesystem::path> {
        if (opt->count() == 0) return std::nullopt;
        return std::filesystem::path(value);
    };

    if (calibrate->parsed()) {
        return ambigate::cmd_calibrate(dataset_path, out_path,
                                       optional_path(calibrate_cache, cache_path), config,
                                       std::cout, std::cerr);
    }
    if (classify->parsed()) {
        std::optional<std::string> ctx;
        if (context_opt->count() > 0) ctx = context;
        return ambigate::cmd_classify(text, ctx, config, std::cout, std::cerr);
    }
    if (evaluate->parsed()) {
        return ambigate::cmd_evaluate(eval_path, optional_path(evaluate_cache, cache_path),
                                      optional_path(evaluate_json, json_path), config, std::cout,
                                      std::cerr);
    }
    if (repl->parsed()) {
        return ambigate::cmd_repl(config, std::cin, std::cout, std::cerr);
    }
    if (serve->parsed()) {
        return ambigate::cmd_serve(config, host, port, std::cout, std::cerr);
    }
    std::cerr << "error: no subcommand selected\n";
    return ambigate::kExitOperationalError;
}
