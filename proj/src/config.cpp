#include "gspace/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gspace/errors.hpp"

namespace gspace {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::pair<std::string, std::string> split_entry(const std::string& line, const std::string& where) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(where + ": expected key=value, got '" + line + "'");
    return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

class Validator {
public:
    void error(const std::string& message) { errors_.push_back(message); }

    bool parse_int(const std::string& key, const std::string& value, int& out) {
        const char* begin = value.data();
        const char* end = begin + value.size();
        const auto [ptr, ec] = std::from_chars(begin, end, out);
        if (ec != std::errc() || ptr != end) {
            error(key + ": '" + value + "' is not an integer");
            return false;
        }
        return true;
    }

    bool parse_u64(const std::string& key, const std::string& value, std::uint64_t& out) {
        const char* begin = value.data();
        const char* end = begin + value.size();
        const auto [ptr, ec] = std::from_chars(begin, end, out);
        if (ec != std::errc() || ptr != end) {
            error(key + ": '" + value + "' is not an unsigned integer");
            return false;
        }
        return true;
    }

    bool parse_double(const std::string& key, const std::string& value, double& out) {
        try {
            size_t used = 0;
            out = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            error(key + ": '" + value + "' is not a number");
            return false;
        }
        return true;
    }

    void finish(const std::string& header) const {
        if (errors_.empty()) return;
        std::ostringstream all;
        all << header;
        for (const std::string& e : errors_) all << "\n  - " << e;
        throw FormatError(all.str());
    }

private:
    std::vector<std::string> errors_;
};

} // namespace

std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) throw IoError("cannot open config file " + config_path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        entries.push_back(split_entry(line, config_path + ":" + std::to_string(line_no)));
    }
    return entries;
}

std::vector<int> parse_arch_widths(const std::string& text) {
    std::vector<int> widths;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        token = trim(token);
        int value = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size() || value < 1) {
            throw FormatError("bad architecture width '" + token + "' in '" + text + "'");
        }
        widths.push_back(value);
    }
    if (widths.size() < 2) throw FormatError("architecture needs at least two comma-separated widths");
    return widths;
}

RunConfig parse_run_config_text(const std::vector<std::pair<std::string, std::string>>& entries) {
    RunConfig config;
    Validator v;
    bool saw_arch = false;
    for (const auto& [key, value] : entries) {
        if (key == "optimizer") {
            if (value == "sgd") config.train.optimizer = Optimizer::Sgd;
            else if (value == "gsgd") config.train.optimizer = Optimizer::Gsgd;
            else v.error("optimizer: expected sgd or gsgd, got '" + value + "'");
        } else if (key == "learning_rate") {
            if (v.parse_double(key, value, config.train.learning_rate) && config.train.learning_rate <= 0.0) {
                v.error("learning_rate must be positive");
            }
        } else if (key == "batch_size") {
            if (v.parse_int(key, value, config.train.batch_size) && config.train.batch_size < 1) {
                v.error("batch_size must be >= 1");
            }
        } else if (key == "epochs") {
            if (v.parse_int(key, value, config.train.epochs) && config.train.epochs < 0) {
                v.error("epochs must be >= 0");
            }
        } else if (key == "seed") {
            v.parse_u64(key, value, config.train.seed);
        } else if (key == "loss") {
            if (value == "softmax_ce") config.train.loss = LossKind::SoftmaxCrossEntropy;
            else if (value == "mse") config.train.loss = LossKind::MeanSquaredError;
            else v.error("loss: expected softmax_ce or mse, got '" + value + "'");
        } else if (key == "lr_schedule") {
            config.train.lr_schedule.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto colon = item.find(':');
                int epoch = 0;
                double mult = 0.0;
                if (colon == std::string::npos || !v.parse_int(key, trim(item.substr(0, colon)), epoch) ||
                    !v.parse_double(key, trim(item.substr(colon + 1)), mult)) {
                    v.error("lr_schedule: expected epoch:multiplier items, got '" + item + "'");
                    break;
                }
                config.train.lr_schedule.emplace_back(epoch, mult);
            }
        } else if (key == "arch") {
            try {
                config.arch_widths = parse_arch_widths(value);
                saw_arch = true;
            } catch (const FormatError& err) {
                v.error(err.what());
            }
        } else if (key == "out") {
            config.out_dir = value;
        } else if (key == "dataset.kind") {
            if (value == "blobs") config.dataset.kind = DatasetSpec::Kind::Blobs;
            else if (value == "idx") config.dataset.kind = DatasetSpec::Kind::Idx;
            else v.error("dataset.kind: expected blobs or idx, got '" + value + "'");
        } else if (key == "dataset.images") {
            config.dataset.images = value;
        } else if (key == "dataset.labels") {
            config.dataset.labels = value;
        } else if (key == "dataset.test_images") {
            config.dataset.test_images = value;
        } else if (key == "dataset.test_labels") {
            config.dataset.test_labels = value;
        } else if (key == "dataset.downsample") {
            if (v.parse_int(key, value, config.dataset.downsample) && config.dataset.downsample < 1) {
                v.error("dataset.downsample must be >= 1");
            }
        } else if (key == "blobs.n_per_class") {
            if (v.parse_int(key, value, config.dataset.n_per_class) && config.dataset.n_per_class < 1) {
                v.error("blobs.n_per_class must be >= 1");
            }
        } else if (key == "blobs.n_test_per_class") {
            if (v.parse_int(key, value, config.dataset.n_test_per_class) && config.dataset.n_test_per_class < 1) {
                v.error("blobs.n_test_per_class must be >= 1");
            }
        } else if (key == "blobs.spread") {
            if (v.parse_double(key, value, config.dataset.spread) && config.dataset.spread < 0.0) {
                v.error("blobs.spread must be >= 0");
            }
        } else if (key == "compare.unbalance") {
            if (v.parse_double(key, value, config.compare_unbalance) && config.compare_unbalance <= 0.0) {
                v.error("compare.unbalance must be positive");
            }
        } else if (key == "verify.max_paths") {
            std::uint64_t cap = 0;
            if (v.parse_u64(key, value, cap)) {
                if (cap < 1) v.error("verify.max_paths must be >= 1");
                else config.verify_max_paths = static_cast<long long>(cap);
            }
        } else {
            v.error("unknown key '" + key + "'");
        }
    }
    if (!saw_arch) v.error("missing required key 'arch'");
    if (config.dataset.kind == DatasetSpec::Kind::Idx) {
        if (config.dataset.images.empty()) v.error("dataset.images required for dataset.kind=idx");
        if (config.dataset.labels.empty()) v.error("dataset.labels required for dataset.kind=idx");
        if (config.dataset.test_images.empty()) v.error("dataset.test_images required for dataset.kind=idx");
        if (config.dataset.test_labels.empty()) v.error("dataset.test_labels required for dataset.kind=idx");
    }
    v.finish("invalid configuration:");
    return config;
}

RunConfig parse_run_config(const std::string& config_path, const std::vector<std::string>& overrides) {
    std::vector<std::pair<std::string, std::string>> entries;
    if (!config_path.empty()) entries = read_key_values(config_path);
    for (const std::string& item : overrides) {
        entries.push_back(split_entry(item, "--set"));
    }
    return parse_run_config_text(entries);
}

std::pair<Dataset, Dataset> load_datasets(const RunConfig& config) {
    const Architecture arch(config.arch_widths);
    if (config.dataset.kind == DatasetSpec::Kind::Blobs) {
        Dataset train = synthetic_blobs(config.train.seed, config.dataset.n_per_class, arch.input_dim(),
                                        arch.output_dim(), config.dataset.spread);
        Dataset test = synthetic_blobs(config.train.seed + 1, config.dataset.n_test_per_class, arch.input_dim(),
                                       arch.output_dim(), config.dataset.spread);
        train.split = "train";
        test.split = "test";
        return {std::move(train), std::move(test)};
    }
    Dataset train = load_idx(config.dataset.images, config.dataset.labels);
    Dataset test = load_idx(config.dataset.test_images, config.dataset.test_labels);
    if (config.dataset.downsample > 1) {
        train = avg_pool_downsample(train, config.dataset.downsample);
        test = avg_pool_downsample(test, config.dataset.downsample);
    }
    train.split = "train";
    test.split = "test";
    if (train.feature_dim != arch.input_dim()) {
        throw ShapeError("dataset features (" + std::to_string(train.feature_dim) +
                         ") do not match architecture input (" + std::to_string(arch.input_dim()) + ")");
    }
    return {std::move(train), std::move(test)};
}

} // namespace gspace
