#include "amdcast/errors.hpp"
#include "amdcast/pipeline.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

#ifdef _WIN32
#define AMDCAST_ISATTY() false
#else
#include <unistd.h>
#define AMDCAST_ISATTY() (isatty(fileno(stderr)) != 0)
#endif

namespace {

bool use_color() {
    return std::getenv("NO_COLOR") == nullptr && AMDCAST_ISATTY();
}

void print_error(const std::string& kind, const std::string& what) {
    if (use_color()) {
        std::cerr << "\033[1;31m" << kind << ":\033[0m " << what << "\n";
    } else {
        std::cerr << kind << ": " << what << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acid mine drainage water-quality forecasting pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;

    const char* names[] = {"inspect", "clean", "train", "forecast", "synth"};
    const char* blurbs[] = {
        "stationarity report (ADF test per parameter)",
        "anomaly screening + interpolation onto a daily grid",
        "train the configured neural model on daily.csv",
        "roll the trained model over the forecast horizon",
        "generate the synthetic weekly dataset",
    };
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
        sub->add_option("--config", config_path, "JSON pipeline config");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "root seed (overrides config)")
            ->each([&](const std::string&) { seed_given = true; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        amdcast::PipelineConfig config;
        if (!config_path.empty()) {
            config = amdcast::load_config(config_path);
        }
        if (!out_dir.empty()) {
            config.output_dir = out_dir;
        }
        if (seed_given) {
            config.seed = seed;
        }

        const std::string command = app.get_subcommands().front()->get_name();
        if (command == "inspect") amdcast::cmd_inspect(config, std::cout);
        else if (command == "clean") amdcast::cmd_clean(config, std::cout);
        else if (command == "train") amdcast::cmd_train(config, std::cout);
        else if (command == "forecast") amdcast::cmd_forecast(config, std::cout);
        else amdcast::cmd_synth(config, std::cout);
        return 0;
    } catch (const amdcast::ConfigError& e) {
        print_error("config error", e.what());
        return 1;
    } catch (const amdcast::NumericError& e) {
        print_error("numeric error", e.what());
        return 3;
    } catch (const amdcast::Error& e) {
        print_error("error", e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error("error", e.what());
        return 1;
    }
}
