#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gspace/data.hpp"
#include "gspace/gsgd.hpp"

namespace gspace {

struct DatasetSpec {
    enum class Kind { Blobs, Idx };
    Kind kind = Kind::Blobs;
    // idx
    std::string images;
    std::string labels;
    std::string test_images;
    std::string test_labels;
    int downsample = 1;
    // blobs
    int n_per_class = 100;
    int n_test_per_class = 20;
    double spread = 0.08;
};

struct RunConfig {
    std::vector<int> arch_widths;
    TrainConfig train;
    DatasetSpec dataset;
    std::string out_dir = "runs/out";
    double compare_unbalance = 100.0;
    long long verify_max_paths = kDefaultEnumerationCap;
};

// Flat key=value lines with dotted sections and '#' comments. Overrides
// are further "key=value" strings applied on top. Unknown keys and type
// errors are all reported together in one FormatError.
RunConfig parse_run_config(const std::string& config_path, const std::vector<std::string>& overrides);
RunConfig parse_run_config_text(const std::vector<std::pair<std::string, std::string>>& entries);

std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& config_path);
std::vector<int> parse_arch_widths(const std::string& text);

// Materializes (train, test) per the dataset spec. Blobs dimensions come
// from the architecture; the test split uses seed + 1.
std::pair<Dataset, Dataset> load_datasets(const RunConfig& config);

} // namespace gspace
