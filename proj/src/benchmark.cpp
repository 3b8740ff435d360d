#include "reliance/benchmark.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "reliance/error.hpp"

namespace reliance {

std::int64_t ConfusionMatrix::total() const {
    std::int64_t t = 0;
    for (const auto& row : counts)
        for (auto v : row) t += v;
    for (auto v : unclassified) t += v;
    return t;
}

ConfusionMatrix score_predictions(const AxisLabels& gold, const AxisLabels& pred, Axis axis, bool drop_unclassified) {
    for (const auto& [id, _] : pred)
        if (!gold.count(id)) throw ValidationError("prediction for a segment missing from gold", {}, 0, id);
    for (const auto& [id, _] : gold)
        if (!pred.count(id)) throw ValidationError("gold segment missing from predictions", {}, 0, id);

    ConfusionMatrix cm;
    cm.axis = axis;
    for (const auto& [id, g] : gold) {
        if (!g) throw ValidationError("gold label is unclassified", {}, 0, id);
        const auto& p = pred.at(id);
        if (!p) {
            if (drop_unclassified) {
                ++cm.dropped;
                continue;
            }
            ++cm.unclassified[ordinal(*g)];
        } else {
            ++cm.counts[ordinal(*g)][ordinal(*p)];
        }
        ++cm.scored;
    }

    std::int64_t tp_all = 0, fp_all = 0, fn_all = 0;
    for (int c = 0; c < 3; ++c) {
        std::int64_t tp = cm.counts[c][c], fp = 0, fn = cm.unclassified[c];
        for (int o = 0; o < 3; ++o) {
            if (o == c) continue;
            fp += cm.counts[o][c];
            fn += cm.counts[c][o];
        }
        auto& m = cm.per_class[c];
        m.support = tp + fn;
        m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        m.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        tp_all += tp;
        fp_all += fp;
        fn_all += fn;
    }
    const double p = tp_all + fp_all ? static_cast<double>(tp_all) / static_cast<double>(tp_all + fp_all) : 0.0;
    const double r = tp_all + fn_all ? static_cast<double>(tp_all) / static_cast<double>(tp_all + fn_all) : 0.0;
    cm.f1_micro = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    cm.accuracy = cm.scored ? static_cast<double>(tp_all) / static_cast<double>(cm.scored) : 0.0;
    return cm;
}

CategoricalAgreement categorical_agreement(const std::vector<std::string>& ids, const std::vector<std::string>& a,
                                           const std::vector<std::string>& b, int ordinal_levels) {
    if (a.size() != b.size() || ids.size() != a.size()) throw ValidationError("agreement: rating lists differ in length");
    if (a.empty()) throw ValidationError("agreement: no overlapping segments");

    CategoricalAgreement out;
    out.n = a.size();
    const double n = static_cast<double>(a.size());
    std::map<std::string, double> ma, mb;
    std::size_t matches = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma[a[i]] += 1.0;
        mb[b[i]] += 1.0;
        if (a[i] == b[i]) ++matches;
        else out.disagreements.push_back(ids[i]);
    }
    out.agreement = static_cast<double>(matches) / n;
    double pe = 0.0;
    for (const auto& [cat, count] : ma)
        if (auto it = mb.find(cat); it != mb.end()) pe += (count / n) * (it->second / n);
    if (pe < 1.0) out.kappa = (out.agreement - pe) / (1.0 - pe);

    if (ordinal_levels > 1) {
        const double span = static_cast<double>(ordinal_levels - 1);
        auto pos = [&](const std::string& s) {
            char* end = nullptr;
            const long v = std::strtol(s.c_str(), &end, 10);
            if (end == s.c_str() || *end || v < 0 || v >= ordinal_levels)
                throw ValidationError("agreement: weighted kappa needs ordinal codes", {}, 0, s);
            return static_cast<double>(v);
        };
        double po_w = 0.0, pe_w = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) po_w += 1.0 - std::abs(pos(a[i]) - pos(b[i])) / span;
        po_w /= n;
        for (const auto& [ca, na] : ma)
            for (const auto& [cb, nb] : mb) pe_w += (na / n) * (nb / n) * (1.0 - std::abs(pos(ca) - pos(cb)) / span);
        if (pe_w < 1.0) out.weighted_kappa = (po_w - pe_w) / (1.0 - pe_w);
    }
    return out;
}

AgreementReport agreement(const std::map<std::string, RaterLabel>& a, const std::map<std::string, RaterLabel>& b) {
    std::vector<std::string> ids, ha, hb, ua, ub, kid, ka, kb;
    std::set<std::string> differing;
    std::size_t joint = 0;
    for (const auto& [id, la] : a) {
        auto it = b.find(id);
        if (it == b.end()) continue;
        const auto& lb = it->second;
        ids.push_back(id);
        ha.push_back(std::to_string(ordinal(la.help_seeking)));
        hb.push_back(std::to_string(ordinal(lb.help_seeking)));
        ua.push_back(std::to_string(ordinal(la.response_use)));
        ub.push_back(std::to_string(ordinal(lb.response_use)));
        if (la.help_seeking == lb.help_seeking && la.response_use == lb.response_use) ++joint;
        else differing.insert(id);
        if (la.kc_id && lb.kc_id) {
            kid.push_back(id);
            ka.push_back(*la.kc_id);
            kb.push_back(*lb.kc_id);
        }
    }
    if (ids.empty()) throw ValidationError("agreement: no overlapping segments");

    AgreementReport rep;
    rep.overlap = ids.size();
    rep.help_seeking = categorical_agreement(ids, ha, hb, 3);
    rep.response_use = categorical_agreement(ids, ua, ub, 3);
    if (!kid.empty()) rep.kc = categorical_agreement(kid, ka, kb);
    rep.joint_agreement = static_cast<double>(joint) / static_cast<double>(ids.size());
    rep.disagreements.assign(differing.begin(), differing.end());
    return rep;
}

}  // namespace reliance
