// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned in code next to its check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gspace/data.hpp"
#include "gspace/exact_rank.hpp"
#include "gspace/gsgd.hpp"
#include "gspace/scaling.hpp"
#include "gspace/verify.hpp"
#include "test_util.hpp"

using namespace gspace;

namespace {

const std::vector<std::vector<int>> kVerificationSet = {{2, 1, 2}, {3, 2},       {2, 2, 2},
                                                        {3, 4, 2}, {2, 3, 2, 2}, {3, 3, 3, 3}};

struct Criterion {
    std::string name;
    std::function<bool(std::string&)> run;
};

bool criterion_rank_theorem(std::string& detail) {
    std::ostringstream out;
    bool ok = true;
    for (const auto& widths : kVerificationSet) {
        const Architecture arch(widths);
        const int rank = exact_rank(structure_matrix(arch));
        const int expected = arch.edge_count() - arch.hidden_count();
        ok &= rank == expected;
        out << "[" << widths[0];
        for (size_t i = 1; i < widths.size(); ++i) out << ":" << widths[i];
        out << "] rank " << rank << "=" << expected << " ";
    }
    detail = out.str();
    return ok;
}

bool criterion_basis_validity(std::string& detail) {
    bool ok = true;
    std::vector<std::vector<int>> set = kVerificationSet;
    set.push_back({49, 8, 8, 10});
    for (const auto& widths : set) {
        const Architecture arch(widths);
        const SkeletonPlan plan = build_skeleton(arch);
        ok &= verify_basis(arch, plan).all_ok();
        if (widths == std::vector<int>{49, 8, 8, 10}) {
            ok &= plan.basis_count() == 520;
            ok &= arch.edge_count() == 536 && arch.hidden_count() == 16;
            detail = "all flags true; [49:8:8:10] basis count " + std::to_string(plan.basis_count()) +
                     " (m=536, H=16)";
        }
    }
    return ok;
}

bool criterion_scaling_invariance(std::string& detail) {
    double worst_output = 0.0;
    double worst_value = 0.0;
    int pattern_mismatches = 0;
    for (const auto& widths : kVerificationSet) {
        const Architecture arch(widths);
        const std::vector<Path> paths = enumerate_paths(arch);
        std::mt19937_64 rng(2024);
        for (int trial = 0; trial < 100; ++trial) {
            const WeightVector w = random_nonzero_weights(arch, rng);
            const ScalingVector g = random_scaling(arch.hidden_count(), rng);
            const std::vector<double> x = random_input(arch.input_dim(), rng);
            const WeightVector scaled = apply_scaling(arch, w, g);
            for (const Path& p : paths) {
                worst_value = std::max(worst_value, rel_err(path_value(w, p), path_value(scaled, p)));
            }
            const ForwardTrace base = forward(arch, w, x);
            const ForwardTrace other = forward(arch, scaled, x);
            for (size_t k = 0; k < base.outputs.size(); ++k) {
                worst_output = std::max(worst_output, rel_err(base.outputs[k], other.outputs[k]));
            }
            if (test_util::away_from_kink(base, 1e-8) &&
                activation_pattern(arch, base) != activation_pattern(arch, other)) {
                ++pattern_mismatches;
            }
        }
    }
    std::ostringstream out;
    out << "max output err " << worst_output << " (tol 1e-9), max path-value err " << worst_value
        << " (tol 1e-10), pattern mismatches " << pattern_mismatches;
    detail = out.str();
    return worst_output <= 1e-9 && worst_value <= 1e-10 && pattern_mismatches == 0;
}

bool criterion_icr_gradients(std::string& detail) {
    double worst = 0.0;
    for (const auto& widths : std::vector<std::vector<int>>{{2, 1, 2}, {3, 4, 2}}) {
        const Architecture arch(widths);
        const SkeletonPlan plan = build_skeleton(arch);
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> target_dist(-1.0, 1.0);
        int checked = 0;
        while (checked < 50) {
            const WeightVector w = random_nonzero_weights(arch, rng);
            std::vector<double> x = random_input(arch.input_dim(), rng);
            if (!test_util::away_from_kink(forward(arch, w, x), 1e-4)) continue;
            std::vector<double> target(static_cast<size_t>(arch.output_dim()));
            for (double& t : target) t = target_dist(rng);
            const std::vector<Example> batch{{x, Target::of_vector(target)}};

            const WeightVector dw = batch_gradient(arch, w, batch, LossKind::MeanSquaredError);
            const std::vector<double> v = basis_values(w, plan);
            const std::vector<double> dv = icr_gradients(dw, w, v, plan);
            const std::vector<double> fd =
                test_util::fd_basis_gradient(arch, plan, w, batch, LossKind::MeanSquaredError, 1e-6);
            for (size_t j = 0; j < dv.size(); ++j) worst = std::max(worst, rel_err(dv[j], fd[j]));
            ++checked;
        }
    }
    std::ostringstream out;
    out << "max |icr - fd| rel err " << worst << " (tol 1e-5)";
    detail = out.str();
    return worst <= 1e-5;
}

bool criterion_icr_wa_round_trip(std::string& detail) {
    double worst = 0.0;
    bool free_ok = true;
    for (const auto& widths : kVerificationSet) {
        const Architecture arch(widths);
        const SkeletonPlan plan = build_skeleton(arch);
        std::mt19937_64 rng(31337);
        std::uniform_real_distribution<double> mag(0.5, 2.0);
        std::bernoulli_distribution flip(0.2);
        for (int trial = 0; trial < 100; ++trial) {
            const WeightVector w = random_nonzero_weights(arch, rng);
            const std::vector<double> v = basis_values(w, plan);
            std::vector<double> ratios(v.size());
            for (double& r : ratios) r = flip(rng) ? -mag(rng) : mag(rng);
            const std::vector<double> r = weight_allocation(ratios, plan);
            for (int e : plan.free_edges) free_ok &= r[static_cast<size_t>(e)] == 1.0;
            WeightVector moved(w.size());
            for (size_t i = 0; i < w.size(); ++i) moved[i] = w[i] * r[i];
            const std::vector<double> after = basis_values(moved, plan);
            for (size_t j = 0; j < v.size(); ++j) worst = std::max(worst, rel_err(after[j], v[j] * ratios[j]));
        }
    }
    std::ostringstream out;
    out << "max reconstruction err " << worst << " (tol 1e-12), free ratios exactly 1: "
        << (free_ok ? "yes" : "NO");
    detail = out.str();
    return worst <= 1e-12 && free_ok;
}

bool criterion_trajectory_invariance(std::string& detail) {
    const Architecture arch({3, 4, 2});
    const SkeletonPlan plan = build_skeleton(arch);
    std::mt19937_64 rng(424242);
    const double eta = 0.01;
    const int steps = 10;

    // Fixed minibatch sequence shared by every trajectory.
    std::vector<std::vector<Example>> batches;
    for (int s = 0; s < steps; ++s) {
        std::vector<Example> batch;
        for (int i = 0; i < 8; ++i) {
            batch.push_back(Example{random_input(3, rng), Target::of_class(static_cast<int>(rng() % 2))});
        }
        batches.push_back(std::move(batch));
    }
    const WeightVector w0 = random_nonzero_weights(arch, rng);
    const ScalingVector g = random_scaling(arch.hidden_count(), rng, 0.1, 10.0);
    const WeightVector w0_scaled = apply_scaling(arch, w0, g);

    double gsgd_divergence = 0.0;
    {
        WeightVector a = w0;
        WeightVector b = w0_scaled;
        for (int s = 0; s < steps; ++s) {
            a = gsgd_step(arch, a, batches[static_cast<size_t>(s)], eta, plan, LossKind::SoftmaxCrossEntropy);
            b = gsgd_step(arch, b, batches[static_cast<size_t>(s)], eta, plan, LossKind::SoftmaxCrossEntropy);
            const std::vector<double> va = basis_values(a, plan);
            const std::vector<double> vb = basis_values(b, plan);
            for (size_t j = 0; j < va.size(); ++j) {
                gsgd_divergence = std::max(gsgd_divergence, rel_err(va[j], vb[j]));
            }
        }
    }

    ScalingVector c10(static_cast<size_t>(arch.hidden_count()), 1.0);
    c10[0] = 10.0;
    double sgd_divergence = 0.0;
    {
        WeightVector a = w0;
        WeightVector b = apply_scaling(arch, w0, c10);
        for (int s = 0; s < steps; ++s) {
            a = sgd_step(arch, a, batches[static_cast<size_t>(s)], eta, LossKind::SoftmaxCrossEntropy);
            b = sgd_step(arch, b, batches[static_cast<size_t>(s)], eta, LossKind::SoftmaxCrossEntropy);
            for (int j = 0; j < plan.basis_count(); ++j) {
                sgd_divergence = std::max(sgd_divergence, rel_err(path_value(a, plan.basis_path(j)),
                                                                  path_value(b, plan.basis_path(j))));
            }
        }
    }

    std::ostringstream out;
    out << "gsgd divergence " << gsgd_divergence << " (tol 1e-7), sgd divergence " << sgd_divergence
        << " (must be >= 1e-3)";
    detail = out.str();
    return gsgd_divergence <= 1e-7 && sgd_divergence >= 1e-3;
}

struct DeskScale {
    TrainResult sgd_balanced, sgd_unbalanced, gsgd_balanced, gsgd_unbalanced;
    WeightVector w0;
    SkeletonPlan plan;
};

const DeskScale& desk_scale_runs() {
    static const DeskScale runs = [] {
        const Architecture arch({49, 8, 8, 10});
        SkeletonPlan plan = build_skeleton(arch);
        const Dataset train_data = synthetic_blobs(7, 100, 49, 10, 0.25);
        const Dataset test_data = synthetic_blobs(8, 20, 49, 10, 0.25);
        TrainConfig config;
        config.learning_rate = 0.01;
        config.batch_size = 64;
        config.epochs = 20;
        config.seed = 7;
        config.loss = LossKind::SoftmaxCrossEntropy;

        const WeightVector w0 = init_weights(arch, plan, config.seed);
        ScalingVector g(static_cast<size_t>(arch.hidden_count()), 1.0);
        for (int j = 0; j < arch.width(1); ++j) g[static_cast<size_t>(arch.hidden_index(1, j))] = 100.0;
        const WeightVector w0_unbalanced = apply_scaling(arch, w0, g);

        auto run = [&](Optimizer opt, const WeightVector& start) {
            TrainConfig tc = config;
            tc.optimizer = opt;
            return train(arch, tc, train_data, test_data, &plan, &start);
        };
        DeskScale out{run(Optimizer::Sgd, w0), run(Optimizer::Sgd, w0_unbalanced),
                      run(Optimizer::Gsgd, w0), run(Optimizer::Gsgd, w0_unbalanced), w0, std::move(plan)};
        return out;
    }();
    return runs;
}

bool criterion_free_skeleton_constancy(std::string& detail) {
    const DeskScale& runs = desk_scale_runs();
    int moved = 0;
    for (int e : runs.plan.free_edges) {
        if (runs.gsgd_balanced.final_weights[static_cast<size_t>(e)] != runs.w0[static_cast<size_t>(e)]) {
            ++moved;
        }
    }
    detail = "after 20 epochs, " + std::to_string(runs.plan.free_edges.size() - static_cast<size_t>(moved)) +
             "/" + std::to_string(runs.plan.free_edges.size()) + " free skeleton weights bitwise unchanged";
    return moved == 0;
}

bool criterion_desk_scale(std::string& detail) {
    const DeskScale& runs = desk_scale_runs();
    const double sgd_unb = runs.sgd_unbalanced.metrics.final_record().train_loss;
    const double gsgd_unb = runs.gsgd_unbalanced.metrics.final_record().train_loss;
    const double gsgd_bal = runs.gsgd_balanced.metrics.final_record().train_loss;
    const double sgd_bal = runs.sgd_balanced.metrics.final_record().train_loss;

    const double gsgd_gap = std::fabs(gsgd_bal - gsgd_unb) / std::max(1.0, std::fabs(gsgd_bal));
    const double sgd_gap = std::fabs(sgd_bal - sgd_unb) / std::max(1.0, std::fabs(sgd_bal));

    std::ostringstream out;
    out << "final train loss: gsgd(unbal) " << gsgd_unb << " <= sgd(unbal) " << sgd_unb
        << "; gsgd bal-vs-unbal gap " << gsgd_gap << " (tol 1e-6); sgd gap " << sgd_gap << " (must exceed 1e-6)";
    detail = out.str();
    return gsgd_unb <= sgd_unb && gsgd_gap <= 1e-6 && sgd_gap > 1e-6;
}

bool criterion_path_sum_oracle(std::string& detail) {
    double worst = 0.0;
    for (const auto& widths : kVerificationSet) {
        const Architecture arch(widths);
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 100; ++trial) {
            const WeightVector w = random_nonzero_weights(arch, rng);
            const std::vector<double> x = random_input(arch.input_dim(), rng);
            const std::vector<double> a = forward(arch, w, x).outputs;
            const std::vector<double> b = path_sum_output(arch, w, x);
            for (size_t k = 0; k < a.size(); ++k) worst = std::max(worst, rel_err(a[k], b[k]));
        }
    }
    std::ostringstream out;
    out << "max |forward - path sum| rel err " << worst << " (tol 1e-10)";
    detail = out.str();
    return worst <= 1e-10;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"rank theorem on the verification set", criterion_rank_theorem},
        {"basis validity incl. [49:8:8:10] count 520", criterion_basis_validity},
        {"scaling invariance (outputs/paths/patterns)", criterion_scaling_invariance},
        {"ICR gradients vs finite differences", criterion_icr_gradients},
        {"ICR/WA round trip", criterion_icr_wa_round_trip},
        {"trajectory invariance (G-SGD) / divergence (SGD)", criterion_trajectory_invariance},
        {"free-skeleton constancy over 20 epochs", criterion_free_skeleton_constancy},
        {"desk-scale experiment on [49:8:8:10] blobs", criterion_desk_scale},
        {"path-sum oracle agreement", criterion_path_sum_oracle},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = criteria[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %zu. %s (%.2fs) - %s\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].name.c_str(),
                    secs, detail.c_str());
        if (!pass) ++failures;
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
