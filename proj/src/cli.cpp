#include "ofd/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace ofd
{

namespace
{

struct CommonFlags
{
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    int workers = 0;
    std::string stage_input;
    std::string dataset;
    std::string polytope;
    std::string ellipsoid;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--config", f.config, "JSON configuration file");
    cmd->add_option_function<std::uint64_t>("--seed", [&f](const std::uint64_t& s) {
        f.seed = s;
        f.seed_set = true;
    }, "master seed (overrides the config)");
    cmd->add_option("--out-dir", f.out_dir, "directory for artifacts");
    cmd->add_option("--workers", f.workers, "worker threads (overrides the config)");
    cmd->add_option("--stage-input", f.stage_input, "directory holding upstream artifacts");
}

PipelineConfig load_config(const CommonFlags& f, std::filesystem::path& out_dir)
{
    std::filesystem::path path = f.config;
    if (path.empty())
    {
        const std::filesystem::path dir = !f.stage_input.empty() ? f.stage_input
            : !f.out_dir.empty()                                ? f.out_dir
                                                                : "ofd_out";
        path = dir / artifact::kConfig;
        if (!std::filesystem::exists(path))
            throw ConfigError("no --config given and no " + path.string() + " to resume from");
    }
    json j;
    try
    {
        j = read_json_file(path);
    }
    catch (const ParseError& e)
    {
        throw ConfigError(e.what());
    }
    if (f.seed_set)
    {
        j["seed"] = f.seed;
        // derived seeds follow the new master seed
        if (j.contains("dataset") && j["dataset"].is_object())
            j["dataset"].erase("seed");
        if (j.contains("evaluate") && j["evaluate"].is_object())
            j["evaluate"].erase("M2_seed");
    }
    if (f.workers > 0)
        j["workers"] = f.workers;
    PipelineConfig cfg = parse_config(j);
    if (!f.out_dir.empty())
        out_dir = f.out_dir;
    else if (j.contains("out_dir") && j["out_dir"].is_string())
        out_dir = j["out_dir"].get<std::string>();
    else
        out_dir = "ofd_out";
    return cfg;
}

StagePaths paths_for(const CommonFlags& f, const std::filesystem::path& out_dir)
{
    StagePaths p;
    p.out_dir = out_dir;
    p.input_dir = f.stage_input.empty() ? out_dir : std::filesystem::path(f.stage_input);
    p.dataset_override = f.dataset;
    p.polytope_override = f.polytope;
    p.ellipsoid_override = f.ellipsoid;
    return p;
}

void summarize(const json& report)
{
    std::cout << "containment: " << (report["containment"]["contained"].get<bool>() ? "certified" : "FAILED")
              << "\nbeta: " << report["design"]["beta"].get<double>()
              << "\nvolume P(x*): " << report["volumes"]["x_star"]["estimate"].get<double>() << " +- "
              << report["volumes"]["x_star"]["std_error"].get<double>() << '\n';
    if (report["volumes"].contains("reduced"))
        std::cout << "volume P(x_r*): " << report["volumes"]["reduced"]["estimate"].get<double>() << " +- "
                  << report["volumes"]["reduced"]["std_error"].get<double>() << '\n';
    std::cout << "train accuracy: " << report["train"]["train_accuracy"].get<double>()
              << "\nvalidation accuracy: " << report["train"]["validation_accuracy"].get<double>() << '\n';
    if (report.contains("M2"))
        std::cout << "M2: " << report["M2"]["fraction"].get<double>() << '\n';
}

} // namespace

int cli_main(int argc, const char* const* argv)
{
    CLI::App app{"Optimal flexibility design for aggregator market bids"};
    app.require_subcommand(1);
    CommonFlags f;

    struct Command
    {
        const char* name;
        const char* help;
    };
    const Command commands[] = {
        {"gen-data", "sample the fleet, scenario pool and bounding box"},
        {"label", "generate the labeled dataset"},
        {"train", "fit the quadratic classifier"},
        {"approx", "build the polytope P_D inside the ellipsoid"},
        {"design", "compute the prototype and the Farkas design"},
        {"evaluate", "volumes, containment, M1/M2 and plot data"},
        {"run", "all stages in order"},
        {"validate", "re-check invariants of existing artifacts"},
    };
    std::map<std::string, CLI::App*> sub;
    for (const auto& c : commands)
    {
        CLI::App* cmd = app.add_subcommand(c.name, c.help);
        add_common(cmd, f);
        sub[c.name] = cmd;
    }
    sub["train"]->add_option("--dataset", f.dataset, "dataset JSONL file");
    sub["design"]->add_option("--dataset", f.dataset, "dataset JSONL file");
    sub["design"]->add_option("--polytope", f.polytope, "P_D polytope JSON file");
    sub["approx"]->add_option("--ellipsoid", f.ellipsoid, "ellipsoid JSON file");
    sub["evaluate"]->add_option("--dataset", f.dataset, "dataset JSONL file");
    sub["evaluate"]->add_option("--polytope", f.polytope, "P_D polytope JSON file");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        std::filesystem::path out_dir;
        const PipelineConfig cfg = load_config(f, out_dir);
        const StagePaths p = paths_for(f, out_dir);
        if (!sub["validate"]->parsed())
            write_json_file(p.out_dir / artifact::kConfig, to_json(cfg));

        if (sub["gen-data"]->parsed())
            run_gen_data(cfg, p);
        else if (sub["label"]->parsed())
            run_label(cfg, p);
        else if (sub["train"]->parsed())
            run_train(cfg, p);
        else if (sub["approx"]->parsed())
            run_approx(cfg, p);
        else if (sub["design"]->parsed())
            run_design(cfg, p);
        else if (sub["evaluate"]->parsed())
            summarize(run_evaluate(cfg, p));
        else if (sub["run"]->parsed())
            summarize(run_pipeline(cfg, p));
        else if (sub["validate"]->parsed())
        {
            const json audit = stage_validate(cfg, p.input_dir);
            write_json_file(p.out_dir / artifact::kValidate, audit);
            for (const auto& c : audit["checks"])
                std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << ": "
                          << c["detail"].get<std::string>() << '\n';
            return audit["pass"].get<bool>() ? 0 : 1;
        }
        return 0;
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const StageError& e)
    {
        std::cerr << "stage " << e.what() << '\n';
        return 1;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace ofd
