#include "rage/metrics.hpp"

#include <stdexcept>
#include <string>

namespace rage {

ConfusionMatrix confusion(const std::vector<int>& predicted, const LabelField& truth,
                          const std::vector<int>& exclude) {
    const int n = truth.pixels();
    if (static_cast<int>(predicted.size()) != n)
        throw std::invalid_argument("prediction length " + std::to_string(predicted.size()) +
                                    " does not match pixel count " + std::to_string(n));
    std::vector<char> skip(n, 0);
    for (int i : exclude) {
        if (i < 0 || i >= n) throw std::invalid_argument("exclude index " + std::to_string(i) + " out of range");
        skip[i] = 1;
    }

    const int c = truth.num_classes();
    ConfusionMatrix cm;
    cm.counts = Eigen::MatrixXi::Zero(c, c);
    for (int i = 0; i < n; ++i) {
        const int t = truth.labels[i];
        if (t == 0 || skip[i]) continue;
        const int p = predicted[i];
        if (p < 1 || p > c)
            throw std::invalid_argument("predicted label " + std::to_string(p) + " at pixel " +
                                        std::to_string(i) + " outside 1.." + std::to_string(c));
        ++cm.counts(t - 1, p - 1);
    }
    return cm;
}

double overall_accuracy(const ConfusionMatrix& cm) {
    const long total = cm.total();
    if (total == 0) throw std::invalid_argument("confusion matrix is empty");
    return static_cast<double>(cm.counts.diagonal().sum()) / static_cast<double>(total);
}

double average_accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw std::invalid_argument("confusion matrix is empty");
    double sum = 0.0;
    int present = 0;
    for (int j = 0; j < cm.c(); ++j) {
        const long row_sum = cm.counts.row(j).sum();
        if (row_sum == 0) continue;  // class absent from the truth
        sum += static_cast<double>(cm.counts(j, j)) / static_cast<double>(row_sum);
        ++present;
    }
    return sum / present;
}

double kappa(const ConfusionMatrix& cm) {
    const long total = cm.total();
    if (total == 0) throw std::invalid_argument("confusion matrix is empty");
    // (p_o - p_e) / (1 - p_e) scaled by total^2 so the hand examples come out
    // exact: single rounding in the final division
    long chance = 0;
    for (int j = 0; j < cm.c(); ++j) {
        chance += static_cast<long>(cm.counts.row(j).sum()) * cm.counts.col(j).sum();
    }
    const long numerator = total * static_cast<long>(cm.counts.diagonal().sum()) - chance;
    const long denominator = total * total - chance;
    if (denominator == 0) return overall_accuracy(cm) == 1.0 ? 1.0 : 0.0;  // p_e = 1
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace rage
