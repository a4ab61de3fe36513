#pragma once

#include "spf/posterior.hpp"

#include <string>
#include <vector>

namespace spf {

// Topic index -> gold label string; empty entries leave the topic unmapped
// (predictions landing there can only be misclassifications).
struct LabelMap {
    std::vector<std::string> topic_to_label;

    std::string label_for(int topic) const;
};

struct ClassMetrics {
    std::string label;
    long long support = 0; // gold documents of this class
    long long predicted = 0;
    long long tp = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_defined = true; // false when no predictions for the class
    bool recall_defined = true;    // false when support is zero
    double tp_certainty = 0.0;     // mean assignment certainty over TPs
    double fp_certainty = 0.0;     // mean assignment certainty over FPs
    long long tp_count = 0;
    long long fp_count = 0;
};

struct ClassificationReport {
    std::vector<ClassMetrics> classes;
    double accuracy = 0.0;
    double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
    double weighted_precision = 0.0, weighted_recall = 0.0, weighted_f1 = 0.0;
    long long total = 0;
};

ClassificationReport evaluate(const std::vector<Assignment>& assignments,
                              const std::vector<std::string>& gold_labels,
                              const LabelMap& map);

// Aligned text table with per-class rows, averages and accuracy.
std::string render_report(const ClassificationReport& report);

// Machine-readable key,value lines.
std::string report_csv(const ClassificationReport& report);

} // namespace spf
