#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "gspace/config.hpp"

using namespace gspace;

namespace {

std::string write_temp_config(const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() /
                      ("gspace_cfg_" + std::to_string(std::random_device{}()) + ".toml");
    std::ofstream out(path);
    out << body;
    return path.string();
}

} // namespace

TEST_CASE("config file parsing") {
    const std::string path = write_temp_config(
        "# an experiment\n"
        "arch = 49,8,8,10\n"
        "optimizer = gsgd\n"
        "learning_rate = 0.02\n"
        "batch_size = 32\n"
        "epochs = 7\n"
        "seed = 99\n"
        "loss = mse\n"
        "dataset.kind = blobs\n"
        "blobs.n_per_class = 50   # inline comment\n"
        "lr_schedule = 3:0.1,5:0.5\n"
        "out = runs/exp\n");
    const RunConfig config = parse_run_config(path, {});
    std::filesystem::remove(path);

    CHECK(config.arch_widths == std::vector<int>{49, 8, 8, 10});
    CHECK(config.train.optimizer == Optimizer::Gsgd);
    CHECK(config.train.learning_rate == 0.02);
    CHECK(config.train.batch_size == 32);
    CHECK(config.train.epochs == 7);
    CHECK(config.train.seed == 99);
    CHECK(config.train.loss == LossKind::MeanSquaredError);
    CHECK(config.dataset.n_per_class == 50);
    CHECK(config.train.lr_schedule == std::vector<std::pair<int, double>>{{3, 0.1}, {5, 0.5}});
    CHECK(config.out_dir == "runs/exp");
}

TEST_CASE("overrides win over the file") {
    const std::string path = write_temp_config("arch = 2,1,2\noptimizer = sgd\nepochs = 3\n");
    const RunConfig config = parse_run_config(path, {"optimizer=gsgd", "epochs=11"});
    std::filesystem::remove(path);
    CHECK(config.train.optimizer == Optimizer::Gsgd);
    CHECK(config.train.epochs == 11);
}

TEST_CASE("overrides alone are enough") {
    const RunConfig config = parse_run_config("", {"arch=3,4,2", "seed=5"});
    CHECK(config.arch_widths == std::vector<int>{3, 4, 2});
    CHECK(config.train.seed == 5);
}

TEST_CASE("validation reports every problem at once") {
    try {
        parse_run_config("", {"optimizer=adam", "epochs=-3", "learning_rate=zero", "mystery=1"});
        FAIL("expected FormatError");
    } catch (const FormatError& err) {
        const std::string what = err.what();
        CHECK(what.find("optimizer") != std::string::npos);
        CHECK(what.find("epochs") != std::string::npos);
        CHECK(what.find("learning_rate") != std::string::npos);
        CHECK(what.find("unknown key 'mystery'") != std::string::npos);
        CHECK(what.find("missing required key 'arch'") != std::string::npos);
    }
}

TEST_CASE("idx dataset requires all four paths") {
    try {
        parse_run_config("", {"arch=49,8,8,10", "dataset.kind=idx", "dataset.images=a"});
        FAIL("expected FormatError");
    } catch (const FormatError& err) {
        const std::string what = err.what();
        CHECK(what.find("dataset.labels") != std::string::npos);
        CHECK(what.find("dataset.test_images") != std::string::npos);
        CHECK(what.find("dataset.test_labels") != std::string::npos);
    }
}

TEST_CASE("arch parsing rejects junk") {
    CHECK_THROWS_AS(parse_arch_widths("2"), FormatError);
    CHECK_THROWS_AS(parse_arch_widths("2,x,2"), FormatError);
    CHECK_THROWS_AS(parse_arch_widths("2,0,2"), FormatError);
    CHECK(parse_arch_widths(" 2, 1 ,2 ") == std::vector<int>{2, 1, 2});
}

TEST_CASE("blob datasets come out sized and split") {
    const RunConfig config = parse_run_config(
        "", {"arch=4,3,3", "blobs.n_per_class=8", "blobs.n_test_per_class=2", "blobs.spread=0.05"});
    const auto [train_data, test_data] = load_datasets(config);
    CHECK(train_data.size() == 24);
    CHECK(test_data.size() == 6);
    CHECK(train_data.feature_dim == 4);
    CHECK(train_data.split == "train");
    CHECK(test_data.split == "test");
}
