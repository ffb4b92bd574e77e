#include "ambigate/metrics.hpp"

#include <cstdio>

#include <json.hpp>

namespace ambigate {

double accuracy(const ConfusionCounts& c) {
    const long total = c.total();
    return total == 0 ? 0.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
}

double precision(const ConfusionCounts& c) {
    const long denom = c.tp + c.fp;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double recall(const ConfusionCounts& c) {
    const long denom = c.tp + c.fn;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double f1(const ConfusionCounts& c) {
    const double p = precision(c);
    const double r = recall(c);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

ClassMetrics compute_metrics(const ConfusionCounts& confusion) {
    ClassMetrics m;
    m.confusion = confusion;
    m.f1 = f1(confusion);
    m.accuracy = accuracy(confusion);
    m.precision = precision(confusion);
    m.recall = recall(confusion);
    return m;
}

std::string render_metrics_table(const MetricsReport& report) {
    char buf[160];
    std::string out;
    out += "Classification metrics (positive class: ambiguous)\n";
    out += "Uncertain verdicts count as misclassifications of the true label.\n";
    std::snprintf(buf, sizeof(buf), "Confusion: TP=%ld FN=%ld FP=%ld TN=%ld | uncertain: %ld\n\n",
                  report.confusion.tp, report.confusion.fn, report.confusion.fp,
                  report.confusion.tn, report.uncertain_count);
    out += buf;

    std::snprintf(buf, sizeof(buf), "%-12s %8s %10s %10s %8s\n", "type", "F1", "accuracy",
                  "precision", "recall");
    out += buf;
    const auto row = [&](const std::string& name, const ClassMetrics& m) {
        std::snprintf(buf, sizeof(buf), "%-12s %8.4f %10.4f %10.4f %8.4f\n", name.c_str(), m.f1,
                      m.accuracy, m.precision, m.recall);
        out += buf;
    };
    for (const auto& [type, metrics] : report.per_type) {
        row(to_string(type), metrics);
    }
    ClassMetrics total;
    total.f1 = report.f1;
    total.accuracy = report.accuracy;
    total.precision = report.precision;
    total.recall = report.recall;
    row("total", total);
    return out;
}

std::string metrics_to_json(const MetricsReport& report) {
    nlohmann::ordered_json j;
    j["confusion"] = {{"tp", report.confusion.tp},
                      {"fn", report.confusion.fn},
                      {"fp", report.confusion.fp},
                      {"tn", report.confusion.tn}};
    j["accuracy"] = report.accuracy;
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f1"] = report.f1;
    j["uncertain_count"] = report.uncertain_count;
    nlohmann::ordered_json per_type = nlohmann::ordered_json::object();
    for (const auto& [type, m] : report.per_type) {
        per_type[to_string(type)] = {{"f1", m.f1},
                                     {"accuracy", m.accuracy},
                                     {"precision", m.precision},
                                     {"recall", m.recall},
                                     {"confusion",
                                      {{"tp", m.confusion.tp},
                                       {"fn", m.confusion.fn},
                                       {"fp", m.confusion.fp},
                                       {"tn", m.confusion.tn}}}};
    }
    j["per_type"] = std::move(per_type);
    return j.dump(2);
}

}  // namespace ambigate
