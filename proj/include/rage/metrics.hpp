#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rage/hsi_io.hpp"

namespace rage {

/// c x c counts over evaluated pixels; rows = true class, columns = predicted.
struct ConfusionMatrix {
    Eigen::MatrixXi counts;

    int c() const { return static_cast<int>(counts.rows()); }
    long total() const { return counts.sum(); }
};

/// Tallies pixels with truth != 0 whose index is not in `exclude`. Predicted
/// labels on evaluated pixels must lie in 1..c.
ConfusionMatrix confusion(const std::vector<int>& predicted, const LabelField& truth,
                          const std::vector<int>& exclude = {});

/// trace / total.
double overall_accuracy(const ConfusionMatrix& cm);

/// Mean per-class recall over classes that appear in the truth.
double average_accuracy(const ConfusionMatrix& cm);

/// Cohen's kappa: (p_o - p_e) / (1 - p_e); when p_e = 1, returns 1 if
/// p_o = 1 else 0.
double kappa(const ConfusionMatrix& cm);

}  // namespace rage
