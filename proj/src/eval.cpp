#include "spf/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

namespace spf {

std::string LabelMap::label_for(int topic) const {
    if (topic >= 0 && topic < static_cast<int>(topic_to_label.size()) &&
        !topic_to_label[topic].empty())
        return topic_to_label[topic];
    return "<topic " + std::to_string(topic) + ">";
}

ClassificationReport evaluate(const std::vector<Assignment>& assignments,
                              const std::vector<std::string>& gold_labels,
                              const LabelMap& map) {
    if (assignments.size() != gold_labels.size())
        throw std::runtime_error("evaluate: assignment/gold size mismatch");
    if (assignments.empty())
        throw std::runtime_error("evaluate: nothing to evaluate");

    // Class set: gold labels in first-appearance order, then predicted-only
    // labels (e.g. unmapped topics, which have zero support).
    std::vector<std::string> labels;
    std::unordered_map<std::string, int> idx;
    auto intern = [&](const std::string& s) {
        auto it = idx.find(s);
        if (it != idx.end()) return it->second;
        const int i = static_cast<int>(labels.size());
        idx.emplace(s, i);
        labels.push_back(s);
        return i;
    };
    for (const std::string& g : gold_labels) intern(g);
    std::vector<int> pred(assignments.size());
    for (std::size_t i = 0; i < assignments.size(); ++i)
        pred[i] = intern(map.label_for(assignments[i].topic));

    const int C = static_cast<int>(labels.size());
    ClassificationReport rep;
    rep.classes.resize(C);
    rep.total = static_cast<long long>(assignments.size());
    std::vector<double> tp_cert_sum(C, 0.0), fp_cert_sum(C, 0.0);

    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const int g = idx.at(gold_labels[i]);
        const int p = pred[i];
        ++rep.classes[g].support;
        ++rep.classes[p].predicted;
        if (g == p) {
            ++rep.classes[p].tp;
            ++rep.classes[p].tp_count;
            tp_cert_sum[p] += assignments[i].certainty;
        } else {
            ++rep.classes[p].fp_count;
            fp_cert_sum[p] += assignments[i].certainty;
        }
    }

    long long correct = 0;
    for (int c = 0; c < C; ++c) {
        ClassMetrics& m = rep.classes[c];
        m.label = labels[c];
        correct += m.tp;
        m.precision_defined = m.predicted > 0;
        m.recall_defined = m.support > 0;
        m.precision = m.precision_defined ? static_cast<double>(m.tp) / m.predicted : 0.0;
        m.recall = m.recall_defined ? static_cast<double>(m.tp) / m.support : 0.0;
        m.f1 = (m.precision + m.recall) > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        m.tp_certainty = m.tp_count > 0 ? tp_cert_sum[c] / m.tp_count : 0.0;
        m.fp_certainty = m.fp_count > 0 ? fp_cert_sum[c] / m.fp_count : 0.0;

        rep.macro_precision += m.precision;
        rep.macro_recall += m.recall;
        rep.macro_f1 += m.f1;
        rep.weighted_precision += m.precision * m.support;
        rep.weighted_recall += m.recall * m.support;
        rep.weighted_f1 += m.f1 * m.support;
    }
    rep.accuracy = static_cast<double>(correct) / rep.total;
    rep.macro_precision /= C;
    rep.macro_recall /= C;
    rep.macro_f1 /= C;
    rep.weighted_precision /= rep.total;
    rep.weighted_recall /= rep.total;
    rep.weighted_f1 /= rep.total;
    return rep;
}

namespace {

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string fmt2(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

} // namespace

std::string render_report(const ClassificationReport& rep) {
    std::size_t w = 14; // at least "Weighted avg" plus two spaces
    for (const ClassMetrics& m : rep.classes) w = std::max(w, m.label.size() + 2);

    std::string out;
    out += pad("True label", w) + pad("Precision", 11) + pad("Recall", 9) +
           pad("F1-score", 10) + pad("TP cert", 9) + pad("FP cert", 9) + "Count\n";
    for (const ClassMetrics& m : rep.classes) {
        out += pad(m.label, w);
        out += pad(fmt2(m.precision) + (m.precision_defined ? "" : "*"), 11);
        out += pad(fmt2(m.recall) + (m.recall_defined ? "" : "*"), 9);
        out += pad(fmt2(m.f1), 10);
        out += pad(m.tp_count > 0 ? fmt2(m.tp_certainty) : "-", 9);
        out += pad(m.fp_count > 0 ? fmt2(m.fp_certainty) : "-", 9);
        out += std::to_string(m.support) + "\n";
    }
    out += pad("Macro avg", w) + pad(fmt2(rep.macro_precision), 11) +
           pad(fmt2(rep.macro_recall), 9) + pad(fmt2(rep.macro_f1), 10) +
           pad("", 9) + pad("", 9) + std::to_string(rep.total) + "\n";
    out += pad("Weighted avg", w) + pad(fmt2(rep.weighted_precision), 11) +
           pad(fmt2(rep.weighted_recall), 9) + pad(fmt2(rep.weighted_f1), 10) +
           pad("", 9) + pad("", 9) + std::to_string(rep.total) + "\n";
    out += "Accuracy: " + fmt2(rep.accuracy) + "\n";
    if (rep.classes.end() !=
        std::find_if(rep.classes.begin(), rep.classes.end(), [](const ClassMetrics& m) {
            return !m.precision_defined || !m.recall_defined;
        }))
        out += "(* metric undefined for this class; reported as 0)\n";
    return out;
}

std::string report_csv(const ClassificationReport& rep) {
    std::string out =
        "label,precision,recall,f1,support,tp_certainty,fp_certainty,"
        "precision_defined,recall_defined\n";
    char buf[256];
    for (const ClassMetrics& m : rep.classes) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%lld,%.17g,%.17g,%d,%d\n",
                      m.label.c_str(), m.precision, m.recall, m.f1, m.support,
                      m.tp_certainty, m.fp_certainty, m.precision_defined ? 1 : 0,
                      m.recall_defined ? 1 : 0);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "macro avg,%.17g,%.17g,%.17g,%lld,,,,\n",
                  rep.macro_precision, rep.macro_recall, rep.macro_f1, rep.total);
    out += buf;
    std::snprintf(buf, sizeof buf, "weighted avg,%.17g,%.17g,%.17g,%lld,,,,\n",
                  rep.weighted_precision, rep.weighted_recall, rep.weighted_f1, rep.total);
    out += buf;
    std::snprintf(buf, sizeof buf, "accuracy,%.17g,,,%lld,,,,\n", rep.accuracy, rep.total);
    out += buf;
    return out;
}

} // namespace spf
