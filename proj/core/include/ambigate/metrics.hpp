#pragma once

#include <map>
#include <string>

#include "ambigate/domain.hpp"

namespace ambigate {

// 2x2 confusion counts with Ambiguous as the positive class.
struct ConfusionCounts {
    long tp = 0;
    long fn = 0;
    long fp = 0;
    long tn = 0;

    long total() const { return tp + fn + fp + tn; }
};

// Each rate is 0 when its denominator is 0.
double accuracy(const ConfusionCounts& c);
double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
double f1(const ConfusionCounts& c);

struct ClassMetrics {
    ConfusionCounts confusion;
    double f1 = 0.0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

ClassMetrics compute_metrics(const ConfusionCounts& confusion);

struct MetricsReport {
    ConfusionCounts confusion;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // Keyed by the ambiguity type of the ambiguous half of each pair.
    std::map<AmbiguityType, ClassMetrics> per_type;
    long uncertain_count = 0;
};

// Fixed-width text table, one row per ambiguity type plus a total row.
std::string render_metrics_table(const MetricsReport& report);

// Machine-readable JSON text with stable key order.
std::string metrics_to_json(const MetricsReport& report);

}  // namespace ambigate
