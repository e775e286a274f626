#include "gspace/metrics.hpp"

namespace gspace {

bool same_up_to_walltime(const Metrics& a, const Metrics& b) {
    if (a.epochs.size() != b.epochs.size()) return false;
    for (size_t i = 0; i < a.epochs.size(); ++i) {
        const EpochRecord& x = a.epochs[i];
        const EpochRecord& y = b.epochs[i];
        if (x.epoch != y.epoch || x.train_loss != y.train_loss || x.train_acc != y.train_acc ||
            x.test_loss != y.test_loss || x.test_acc != y.test_acc) {
            return false;
        }
    }
    return true;
}

} // namespace gspace
