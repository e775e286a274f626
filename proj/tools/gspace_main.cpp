#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gspace/config.hpp"
#include "gspace/data.hpp"
#include "gspace/gsgd.hpp"
#include "gspace/verify.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerificationFailed = 3;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string arch;
    std::string out;
    std::string seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key=value config file");
    cmd->add_option("--set", args.overrides, "override, e.g. --set optimizer=gsgd")->take_all();
    cmd->add_option("--arch", args.arch, "layer widths, e.g. 49,8,8,10");
    cmd->add_option("--out", args.out, "output directory");
    cmd->add_option("--seed", args.seed, "RNG seed");
}

gspace::RunConfig resolve_config(const CommonArgs& args) {
    std::vector<std::string> overrides = args.overrides;
    if (!args.arch.empty()) overrides.push_back("arch=" + args.arch);
    if (!args.out.empty()) overrides.push_back("out=" + args.out);
    if (!args.seed.empty()) overrides.push_back("seed=" + args.seed);
    return gspace::parse_run_config(args.config_path, overrides);
}

json config_json(const gspace::RunConfig& config) {
    json j;
    j["optimizer"] = config.train.optimizer == gspace::Optimizer::Gsgd ? "gsgd" : "sgd";
    j["learning_rate"] = config.train.learning_rate;
    j["batch_size"] = config.train.batch_size;
    j["epochs"] = config.train.epochs;
    j["seed"] = config.train.seed;
    j["loss"] = config.train.loss == gspace::LossKind::MeanSquaredError ? "mse" : "softmax_ce";
    j["arch"] = config.arch_widths;
    j["out"] = config.out_dir;
    if (config.dataset.kind == gspace::DatasetSpec::Kind::Blobs) {
        j["dataset"] = {{"kind", "blobs"},
                        {"n_per_class", config.dataset.n_per_class},
                        {"n_test_per_class", config.dataset.n_test_per_class},
                        {"spread", config.dataset.spread}};
    } else {
        j["dataset"] = {{"kind", "idx"},
                        {"images", config.dataset.images},
                        {"labels", config.dataset.labels},
                        {"test_images", config.dataset.test_images},
                        {"test_labels", config.dataset.test_labels},
                        {"downsample", config.dataset.downsample}};
    }
    return j;
}

json record_json(const gspace::EpochRecord& r) {
    return json{{"epoch", r.epoch},       {"train_loss", r.train_loss}, {"train_acc", r.train_acc},
                {"test_loss", r.test_loss}, {"test_acc", r.test_acc},   {"wall_ms", r.wall_ms}};
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw gspace::IoError("cannot write " + path);
    out << j.dump(2) << '\n';
}

int cmd_train(const CommonArgs& args) {
    const gspace::RunConfig config = resolve_config(args);
    const gspace::Architecture arch(config.arch_widths);
    const auto [train_data, test_data] = gspace::load_datasets(config);
    const gspace::SkeletonPlan plan = gspace::build_skeleton(arch);

    std::filesystem::create_directories(config.out_dir);
    const gspace::TrainResult result = gspace::train(arch, config.train, train_data, test_data, &plan);

    for (const gspace::EpochRecord& r : result.metrics.epochs) {
        std::printf("epoch %3d  train_loss %.6f  train_acc %.4f  test_loss %.6f  test_acc %.4f\n", r.epoch,
                    r.train_loss, r.train_acc, r.test_loss, r.test_acc);
    }
    gspace::write_metrics(config.out_dir + "/metrics.csv", result.metrics);
    gspace::save_checkpoint(config.out_dir + "/weights.bin", arch, result.final_weights);

    json summary;
    summary["config"] = config_json(config);
    summary["seed"] = config.train.seed;
    summary["final"] = record_json(result.metrics.final_record());
    summary["rejected_steps"] = result.rejected_steps;
    write_json(config.out_dir + "/summary.json", summary);
    std::printf("wrote %s/{metrics.csv,summary.json,weights.bin}\n", config.out_dir.c_str());
    return kExitOk;
}

int cmd_verify(const std::string& arch_text, long long max_paths, std::uint64_t seed) {
    const gspace::Architecture arch(gspace::parse_arch_widths(arch_text));
    std::printf("architecture [%s]: m = %d edges, H = %d hidden nodes, %lld paths\n", arch_text.c_str(),
                arch.edge_count(), arch.hidden_count(), arch.path_count());
    const auto results = gspace::run_verification(arch, max_paths, seed);
    bool all_pass = true;
    for (const auto& check : results) {
        all_pass &= check.pass;
        std::printf("%-5s %-50s %s\n", check.skipped ? "SKIP" : (check.pass ? "PASS" : "FAIL"),
                    check.name.c_str(), check.detail.c_str());
    }
    return all_pass ? kExitOk : kExitVerificationFailed;
}

int cmd_compare(const CommonArgs& args) {
    const gspace::RunConfig config = resolve_config(args);
    const gspace::Architecture arch(config.arch_widths);
    const auto [train_data, test_data] = gspace::load_datasets(config);
    const gspace::SkeletonPlan plan = gspace::build_skeleton(arch);

    const gspace::WeightVector w0 = gspace::init_weights(arch, plan, config.train.seed);
    gspace::ScalingVector g(static_cast<size_t>(arch.hidden_count()), 1.0);
    for (int j = 0; j < arch.width(1); ++j) {
        g[static_cast<size_t>(arch.hidden_index(1, j))] = config.compare_unbalance;
    }
    const gspace::WeightVector w0_unbalanced = gspace::apply_scaling(arch, w0, g);

    auto basis_now = [&plan](const gspace::WeightVector& w) {
        std::vector<double> v(static_cast<size_t>(plan.basis_count()));
        for (int j = 0; j < plan.basis_count(); ++j) v[static_cast<size_t>(j)] = path_value(w, plan.basis_path(j));
        return v;
    };

    struct Run {
        gspace::TrainResult result{gspace::Metrics{}, {}, 0};
        std::vector<std::vector<double>> basis_per_epoch;
    };
    auto run_one = [&](gspace::Optimizer opt, const gspace::WeightVector& start, const std::string& name) {
        gspace::TrainConfig tc = config.train;
        tc.optimizer = opt;
        Run run;
        run.result = gspace::train(arch, tc, train_data, test_data, &plan, &start,
                                   [&](int, const gspace::WeightVector& w) { run.basis_per_epoch.push_back(basis_now(w)); });
        const std::string dir = config.out_dir + "/" + name;
        std::filesystem::create_directories(dir);
        gspace::write_metrics(dir + "/metrics.csv", run.result.metrics);
        gspace::save_checkpoint(dir + "/weights.bin", arch, run.result.final_weights);
        std::printf("%-16s final train_loss %.6f  test_acc %.4f\n", name.c_str(),
                    run.result.metrics.final_record().train_loss, run.result.metrics.final_record().test_acc);
        return run;
    };

    const Run sgd_bal = run_one(gspace::Optimizer::Sgd, w0, "sgd_balanced");
    const Run sgd_unb = run_one(gspace::Optimizer::Sgd, w0_unbalanced, "sgd_unbalanced");
    const Run gsgd_bal = run_one(gspace::Optimizer::Gsgd, w0, "gsgd_balanced");
    const Run gsgd_unb = run_one(gspace::Optimizer::Gsgd, w0_unbalanced, "gsgd_unbalanced");

    auto divergence = [](const Run& a, const Run& b) {
        double worst = 0.0;
        for (size_t e = 0; e < std::min(a.basis_per_epoch.size(), b.basis_per_epoch.size()); ++e) {
            for (size_t j = 0; j < a.basis_per_epoch[e].size(); ++j) {
                worst = std::max(worst, gspace::rel_err(a.basis_per_epoch[e][j], b.basis_per_epoch[e][j]));
            }
        }
        return worst;
    };

    const double ratio = static_cast<double>(arch.hidden_count()) / arch.edge_count();
    json summary;
    summary["config"] = config_json(config);
    summary["invariant_ratio"] = ratio;
    summary["invariant_ratio_text"] =
        std::to_string(arch.hidden_count()) + "/" + std::to_string(arch.edge_count());
    summary["final_train_loss"] = {{"sgd_balanced", sgd_bal.result.metrics.final_record().train_loss},
                                   {"sgd_unbalanced", sgd_unb.result.metrics.final_record().train_loss},
                                   {"gsgd_balanced", gsgd_bal.result.metrics.final_record().train_loss},
                                   {"gsgd_unbalanced", gsgd_unb.result.metrics.final_record().train_loss}};
    summary["delta_unbalanced_sgd_minus_gsgd"] = sgd_unb.result.metrics.final_record().train_loss -
                                                 gsgd_unb.result.metrics.final_record().train_loss;
    summary["basis_trajectory_divergence"] = {{"gsgd", divergence(gsgd_bal, gsgd_unb)},
                                              {"sgd", divergence(sgd_bal, sgd_unb)}};
    write_json(config.out_dir + "/delta_summary.json", summary);

    std::printf("invariant ratio H/m = %d/%d = %.4g\n", arch.hidden_count(), arch.edge_count(), ratio);
    std::printf("basis trajectory divergence: gsgd %.3e, sgd %.3e\n", divergence(gsgd_bal, gsgd_unb),
                divergence(sgd_bal, sgd_unb));
    std::printf("wrote %s/delta_summary.json\n", config.out_dir.c_str());
    return kExitOk;
}

int cmd_paths(const std::string& arch_text, long long max_paths, const std::string& matrix_path,
              const std::string& plan_path) {
    const gspace::Architecture arch(gspace::parse_arch_widths(arch_text));
    if (!plan_path.empty()) {
        std::ofstream out(plan_path);
        if (!out) throw gspace::IoError("cannot write " + plan_path);
        gspace::write_plan(out, gspace::build_skeleton(arch));
        std::printf("wrote plan to %s\n", plan_path.c_str());
    }
    const gspace::StructureMatrix matrix = gspace::structure_matrix(arch, max_paths);
    if (matrix_path.empty()) {
        gspace::write_structure_matrix(std::cout, matrix);
    } else {
        std::ofstream out(matrix_path);
        if (!out) throw gspace::IoError("cannot write " + matrix_path);
        gspace::write_structure_matrix(out, matrix);
        std::printf("wrote structure matrix to %s\n", matrix_path.c_str());
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"positively scale-invariant optimization of ReLU MLPs"};
    app.require_subcommand(1);

    CommonArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "train an MLP with SGD or G-SGD");
    add_common(train_cmd, train_args);

    std::string verify_arch;
    std::string verify_config;
    long long verify_cap = gspace::kDefaultEnumerationCap;
    std::uint64_t verify_seed = 0;
    CLI::App* verify_cmd = app.add_subcommand("verify", "run the structural verification suite");
    verify_cmd->add_option("--arch", verify_arch, "layer widths, e.g. 2,1,2");
    verify_cmd->add_option("--config", verify_config, "config file providing arch and verify.max_paths");
    CLI::Option* verify_cap_opt = verify_cmd->add_option("--max-paths", verify_cap, "path enumeration cap");
    verify_cmd->add_option("--seed", verify_seed, "RNG seed for the sweeps");

    CommonArgs compare_args;
    CLI::App* compare_cmd = app.add_subcommand("compare", "SGD vs G-SGD from balanced and unbalanced starts");
    add_common(compare_cmd, compare_args);

    std::string paths_arch;
    long long paths_cap = gspace::kDefaultEnumerationCap;
    std::string matrix_path;
    std::string plan_path;
    CLI::App* paths_cmd = app.add_subcommand("paths", "dump path enumeration and skeleton plan");
    paths_cmd->add_option("--arch", paths_arch, "layer widths")->required();
    paths_cmd->add_option("--max-paths", paths_cap, "path enumeration cap");
    paths_cmd->add_option("--matrix", matrix_path, "write structure-matrix triplets here (default stdout)");
    paths_cmd->add_option("--plan", plan_path, "write the skeleton plan here");

    try {
        app.parse(argc, argv);
        if (train_cmd->parsed()) return cmd_train(train_args);
        if (verify_cmd->parsed()) {
            if (!verify_config.empty()) {
                const gspace::RunConfig config = gspace::parse_run_config(verify_config, {});
                if (verify_arch.empty()) {
                    std::string arch_text;
                    for (int h : config.arch_widths) {
                        if (!arch_text.empty()) arch_text += ',';
                        arch_text += std::to_string(h);
                    }
                    verify_arch = arch_text;
                }
                if (verify_cap_opt->count() == 0) verify_cap = config.verify_max_paths;
            }
            if (verify_arch.empty()) {
                std::fprintf(stderr, "error: verify needs --arch or --config\n");
                return kExitValidation;
            }
            return cmd_verify(verify_arch, verify_cap, verify_seed);
        }
        if (compare_cmd->parsed()) return cmd_compare(compare_args);
        if (paths_cmd->parsed()) return cmd_paths(paths_arch, paths_cap, matrix_path, plan_path);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    } catch (const gspace::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitOk;
}
