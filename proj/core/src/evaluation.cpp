#include <walkscope/evaluation.hpp>

#include <walkscope/error.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace walkscope {

using nlohmann::json;

ConfusionMatrix& ConfusionMatrix::accumulate(const ConfusionMatrix& other) noexcept {
    for (int g = 0; g < kClassCount; ++g) {
        for (int p = 0; p < kClassCount; ++p) {
            counts_[g][p] += other.counts_[g][p];
        }
    }
    return *this;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
    std::uint64_t t = 0;
    for (const auto& row : counts_) {
        for (std::uint64_t v : row) {
            t += v;
        }
    }
    return t;
}

ConfusionMatrix confusion(const TileRaster& gt, const TileRaster& pred) {
    if (gt.width() != pred.width() || gt.height() != pred.height()) {
        throw DimensionMismatch("tile " + gt.tile_id() + ": ground truth is " + std::to_string(gt.width()) + "x" +
                                std::to_string(gt.height()) + ", prediction is " + std::to_string(pred.width()) +
                                "x" + std::to_string(pred.height()));
    }
    ConfusionMatrix::Counts counts{};
    const auto g = gt.labels().values();
    const auto p = pred.labels().values();
    for (std::size_t i = 0; i < g.size(); ++i) {
        ++counts[g[i]][p[i]];
    }
    return ConfusionMatrix(counts);
}

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) {
        return std::nullopt;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> mean_of(const std::vector<double>& v) {
    if (v.empty()) {
        return std::nullopt;
    }
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

std::optional<double> miou_of(const std::array<ClassScore, kClassCount>& per_class) {
    std::vector<double> ious;
    for (const ClassScore& s : per_class) {
        if (s.iou) {
            ious.push_back(*s.iou);
        }
    }
    return mean_of(ious);
}

} // namespace

ClassScores scores(const ConfusionMatrix& cm) {
    ClassScores out;
    for (int c = 0; c < kClassCount; ++c) {
        const std::uint64_t tp = cm.at(c, c);
        std::uint64_t fp = 0;
        std::uint64_t fn = 0;
        for (int o = 0; o < kClassCount; ++o) {
            if (o != c) {
                fp += cm.at(o, c);
                fn += cm.at(c, o);
            }
        }
        out.per_class[c] = ClassScore{ratio(tp, tp + fp + fn), ratio(tp, tp + fp), ratio(tp, tp + fn)};
    }
    out.miou = miou_of(out.per_class);
    return out;
}

ClassScores average_scores(const std::vector<ClassScores>& per_tile) {
    ClassScores out;
    for (int c = 0; c < kClassCount; ++c) {
        std::vector<double> iou;
        std::vector<double> precision;
        std::vector<double> recall;
        for (const ClassScores& s : per_tile) {
            const ClassScore& cs = s.per_class[c];
            if (cs.iou) {
                iou.push_back(*cs.iou);
            }
            if (cs.precision) {
                precision.push_back(*cs.precision);
            }
            if (cs.recall) {
                recall.push_back(*cs.recall);
            }
        }
        out.per_class[c] = ClassScore{mean_of(iou), mean_of(precision), mean_of(recall)};
    }
    out.miou = miou_of(out.per_class);
    return out;
}

std::string_view feature_name(Feature f) noexcept {
    switch (f) {
    case Feature::width: return "Width";
    case Feature::angle: return "Angle";
    case Feature::curvature: return "Curvature";
    }
    return "Unknown";
}

void BinSpec::validate() const {
    if (edges.size() < 2) {
        throw PreconditionError(std::string(feature_name(feature)) + " bin spec needs at least two edges");
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (std::isnan(edges[i]) || (i + 1 < edges.size() && std::isinf(edges[i]))) {
            throw PreconditionError(std::string(feature_name(feature)) + " bin edges must be finite except the last");
        }
        if (i > 0 && !(edges[i - 1] < edges[i])) {
            throw PreconditionError(std::string(feature_name(feature)) + " bin edges must be strictly ascending");
        }
    }
}

std::optional<std::size_t> BinSpec::locate(double value) const noexcept {
    if (edges.size() < 2 || !(value >= edges.front()) || !(value < edges.back())) {
        return std::nullopt;
    }
    const auto it = std::upper_bound(edges.begin(), edges.end(), value);
    return static_cast<std::size_t>(it - edges.begin()) - 1;
}

BinSpec default_bins(Feature f) {
    switch (f) {
    case Feature::width: return {f, {0.0, 7.0, 14.0, kInf}};
    case Feature::angle: return {f, {0.0, 45.0, 90.0, 135.0, 180.0}};
    case Feature::curvature: return {f, {0.0, 0.1, 0.2, 0.3, kInf}};
    }
    return {f, {}};
}

BinnedRmse binned_rmse(const std::vector<ValuePair>& pairs, const BinSpec& spec, BinKey key) {
    spec.validate();
    BinnedRmse out;
    std::vector<double> sq(spec.bin_count(), 0.0);
    out.rows.resize(spec.bin_count());
    for (std::size_t b = 0; b < spec.bin_count(); ++b) {
        out.rows[b].feature = spec.feature;
        out.rows[b].lo = spec.edges[b];
        out.rows[b].hi = spec.edges[b + 1];
    }
    for (const ValuePair& p : pairs) {
        if (!p.gt || !p.pred || !std::isfinite(*p.gt) || !std::isfinite(*p.pred)) {
            ++out.dropped_undefined;
            continue;
        }
        const auto bin = spec.locate(key == BinKey::ground_truth ? *p.gt : *p.pred);
        if (!bin) {
            ++out.dropped_out_of_range;
            continue;
        }
        const double e = *p.pred - *p.gt;
        sq[*bin] += e * e;
        ++out.rows[*bin].n;
    }
    for (std::size_t b = 0; b < spec.bin_count(); ++b) {
        if (out.rows[b].n > 0) {
            out.rows[b].rmse = std::sqrt(sq[b] / static_cast<double>(out.rows[b].n));
        }
    }
    return out;
}

std::string format_bin(double lo, double hi) {
    auto edge = [](double v) { return std::isinf(v) ? std::string(v > 0 ? "inf" : "-inf") : fmt::format("{}", v); };
    return edge(lo) + "-" + edge(hi);
}

namespace {

constexpr std::array<ClassId, kClassCount> kReportOrder = {ClassId::building, ClassId::road, ClassId::sidewalk,
                                                           ClassId::background};

std::string fixed(const std::optional<double>& v, int digits = 4) {
    return v ? fmt::format("{:.{}f}", *v, digits) : std::string{};
}

json json_value(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

} // namespace

std::string scores_csv(const ClassScores& s) {
    std::string out = "Class,IoU,Precision,Recall\n";
    for (ClassId c : kReportOrder) {
        const ClassScore& cs = s[c];
        out += fmt::format("{},{},{},{}\n", class_display_name(c), fixed(cs.iou), fixed(cs.precision),
                           fixed(cs.recall));
    }
    out += fmt::format("mIoU,{},,\n", fixed(s.miou));
    return out;
}

std::string scores_json(const ClassScores& s) {
    json rows = json::array();
    for (ClassId c : kReportOrder) {
        const ClassScore& cs = s[c];
        rows.push_back({{"Class", std::string(class_display_name(c))},
                        {"IoU", json_value(cs.iou)},
                        {"Precision", json_value(cs.precision)},
                        {"Recall", json_value(cs.recall)}});
    }
    json doc = {{"classes", rows}, {"mIoU", json_value(s.miou)}};
    return doc.dump(2) + "\n";
}

std::string binned_rmse_csv(const std::vector<BinnedRmse>& tables) {
    std::string out = "Feature,Bin,N,RMSE\n";
    for (const BinnedRmse& t : tables) {
        for (const BinnedRmseRow& r : t.rows) {
            out += fmt::format("{},{},{},{}\n", feature_name(r.feature), format_bin(r.lo, r.hi), r.n, fixed(r.rmse));
        }
    }
    return out;
}

std::string binned_rmse_json(const std::vector<BinnedRmse>& tables) {
    json rows = json::array();
    json dropped = json::object();
    for (const BinnedRmse& t : tables) {
        for (const BinnedRmseRow& r : t.rows) {
            rows.push_back({{"Feature", std::string(feature_name(r.feature))},
                            {"Bin", format_bin(r.lo, r.hi)},
                            {"N", r.n},
                            {"RMSE", json_value(r.rmse)}});
        }
        if (!t.rows.empty()) {
            dropped[std::string(feature_name(t.rows.front().feature))] = {
                {"undefined", t.dropped_undefined}, {"out_of_range", t.dropped_out_of_range}};
        }
    }
    json doc = {{"rows", rows}, {"dropped", dropped}};
    return doc.dump(2) + "\n";
}

} // namespace walkscope
