// vqclab: compile, verify and sweep experiments.
//
// Exit codes: 0 ok, 1 verification failed, 2 config parse error,
// 3 validation error, 4 runtime error.

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "vqclab/experiment.hpp"

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw vqc::ConfigError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw vqc::ConfigError(std::string("not valid JSON: ") + e.what());
    }
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::uint64_t> shots;
    std::optional<std::uint64_t> budget;
};

void apply(json& j, const Overrides& o) {
    if (o.seed) j["seed"] = *o.seed;
    if (o.out) j["output_dir"] = *o.out;
    if (o.shots) j["optimizer"]["shots"] = *o.shots;
    if (o.budget) j["optimizer"]["budget"] = *o.budget;
}

void print_summary(const vqc::ExperimentConfig& c, const vqc::CompileResult& r) {
    std::cout << c.name << ": " << r.trace.records.back().iteration << " iterations, " << r.trace.termination
              << ", noisy " << r.final_noisy_cost << ", noiseless " << r.final_noiseless_cost << ", "
              << r.wall_seconds << " s -> " << c.output_dir.string() << '\n';
}

int cmd_compile(const std::string& path, const Overrides& o) {
    json j = read_json(path);
    apply(j, o);
    const auto c = vqc::parse_experiment(j);
    print_summary(c, vqc::run_compile(c));
    return 0;
}

int cmd_verify(const std::string& suite, const std::string& path, std::optional<std::uint64_t> seed,
               const std::string& out) {
    json opts = path.empty() ? json::object() : read_json(path);
    if (seed) opts["seed"] = *seed;
    const auto r = vqc::run_verify(suite, opts);
    const std::string text = r.report.dump(2);
    if (out.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream f(out);
        f << text << '\n';
        if (!f) throw vqc::Error("cannot write " + out);
        std::cout << suite << ": " << (r.pass ? "pass" : "FAIL") << '\n';
    }
    return r.pass ? 0 : 1;
}

// Runs the experiment once per value with the key at `pointer` replaced.
int cmd_sweep(const std::string& path, const std::string& pointer, const std::vector<double>& values,
              const Overrides& o) {
    json base = read_json(path);
    apply(base, o);
    const json::json_pointer ptr(pointer);
    const std::filesystem::path root = base.value("output_dir", std::string("out"));

    std::vector<vqc::ExperimentConfig> configs;
    for (std::size_t i = 0; i < values.size(); ++i) {
        json j = base;
        j[ptr] = values[i];
        j["output_dir"] = (root / ("point_" + std::to_string(i))).string();
        configs.push_back(vqc::parse_experiment(j));
    }

    std::vector<vqc::CompileResult> results(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    std::mutex io;
    auto work = [&] {
        for (std::size_t i; (i = next++) < configs.size();) {
            try {
                results[i] = vqc::run_compile(configs[i]);
                std::lock_guard lock(io);
                print_summary(configs[i], results[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::min<std::size_t>(vqc::worker_count(), configs.size());
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::filesystem::create_directories(root);
    std::ofstream csv(root / "sweep.csv");
    csv << "value,final_noisy_cost,final_noiseless_cost,iterations,total_shots,termination\n";
    csv.precision(17);
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto& last = results[i].trace.records.back();
        csv << values[i] << ',' << results[i].final_noisy_cost << ',' << results[i].final_noiseless_cost << ','
            << last.iteration << ',' << last.cumulative_shots << ',' << results[i].trace.termination << '\n';
    }
    if (!csv) throw vqc::Error("cannot write sweep.csv");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noisy variational compiling lab"};
    app.require_subcommand(1);

    Overrides ov;
    std::string config;
    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--seed", ov.seed, "Override the experiment seed");
        sub->add_option("--out", ov.out, "Override the output directory");
        sub->add_option("--shots", ov.shots, "Override the fixed shot count");
        sub->add_option("--budget", ov.budget, "Override the shot budget");
    };

    auto* compile = app.add_subcommand("compile", "Train an ansatz and write trace.csv and summary.json");
    compile->add_option("config", config, "Experiment config (JSON)")->required();
    add_overrides(compile);

    std::string suite;
    std::string verify_out;
    std::optional<std::uint64_t> verify_seed;
    std::string verify_config;
    auto* verify = app.add_subcommand("verify", "Run a verification suite and print a JSON report");
    verify->add_option("suite", suite, "affine, thm1, thm2, thm3, corollaries, warmup, sandwiches or all")->required();
    verify->add_option("--config", verify_config, "Suite options (JSON)");
    verify->add_option("--seed", verify_seed, "Seed for the random instances");
    verify->add_option("--out", verify_out, "Write the report here instead of stdout");

    std::string pointer;
    std::vector<double> values;
    auto* sweep = app.add_subcommand("sweep", "Repeat an experiment over a grid of one config value");
    sweep->add_option("config", config, "Experiment config (JSON)")->required();
    sweep->add_option("--param", pointer, "JSON pointer of the swept key, e.g. /cost/q or /noise/depol_2q")
        ->required();
    sweep->add_option("--values", values, "Grid values")->required()->delimiter(',');
    add_overrides(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*compile) return cmd_compile(config, ov);
        if (*verify) return cmd_verify(suite, verify_config, verify_seed, verify_out);
        if (*sweep) return cmd_sweep(config, pointer, values, ov);
    } catch (const vqc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const vqc::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 3;
    } catch (const vqc::DimensionError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 3;
    } catch (const vqc::NotCliffordError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
