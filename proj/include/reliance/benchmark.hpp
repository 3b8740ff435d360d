#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reliance/engagement.hpp"

namespace reliance {

/// segment_id -> mode on one axis; an empty optional marks an unclassified
/// prediction.
using AxisLabels = std::map<std::string, std::optional<EngagementMode>>;

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;  // gold count
};

struct ConfusionMatrix {
    Axis axis = Axis::HelpSeeking;
    std::array<std::array<std::int64_t, 3>, 3> counts{};  // [gold][predicted]
    std::array<std::int64_t, 3> unclassified{};          // per gold class
    std::array<ClassMetrics, 3> per_class{};
    double f1_micro = 0.0;
    double accuracy = 0.0;
    std::size_t scored = 0;
    std::size_t dropped = 0;  // unclassified predictions left out with drop_unclassified

    std::int64_t total() const;
};

/// Scores predictions on one axis. Unclassified predictions count as false
/// negatives of their gold class (and as errors for accuracy) unless
/// `drop_unclassified`. Per-class F1 is 0 when precision + recall is 0.
/// Throws ValidationError when the id sets differ or a gold label is missing.
ConfusionMatrix score_predictions(const AxisLabels& gold, const AxisLabels& pred, Axis axis,
                                  bool drop_unclassified = false);

struct CategoricalAgreement {
    double agreement = 0.0;
    std::optional<double> kappa;           // undefined when chance agreement is 1
    std::optional<double> weighted_kappa;  // linear weights; ordinal axes only
    std::size_t n = 0;
    std::vector<std::string> disagreements;
};

/// Percent agreement and Cohen's kappa over paired categorical ratings.
/// `ordinal_levels` > 1 also computes linearly weighted kappa treating the
/// categories "0".."levels-1" as ordinal positions.
CategoricalAgreement categorical_agreement(const std::vector<std::string>& ids, const std::vector<std::string>& a,
                                           const std::vector<std::string>& b, int ordinal_levels = 0);

struct RaterLabel {
    EngagementMode help_seeking = EngagementMode::Passive;
    EngagementMode response_use = EngagementMode::Passive;
    std::optional<std::string> kc_id;
};

struct AgreementReport {
    CategoricalAgreement help_seeking;
    CategoricalAgreement response_use;
    std::optional<CategoricalAgreement> kc;  // over segments both raters gave a kc_id
    double joint_agreement = 0.0;            // both axes match
    std::vector<std::string> disagreements;  // either axis differs, sorted
    std::size_t overlap = 0;
};

/// Agreement between two raters over the segments both labeled. Throws
/// ValidationError on an empty overlap.
AgreementReport agreement(const std::map<std::string, RaterLabel>& a, const std::map<std::string, RaterLabel>& b);

}  // namespace reliance
