#pragma once

#include <json.hpp>
#include <string>

#include "linefib/fibration.hpp"
#include "linefib/lemmas.hpp"
#include "linefib/standardizer.hpp"
#include "linefib/version.hpp"

namespace linefib {

using json = nlohmann::ordered_json;

inline json to_json(const Box& box) {
    return json{{"min", {box.min.x(), box.min.y(), box.min.z()}},
                {"max", {box.max.x(), box.max.y(), box.max.z()}}};
}

inline json to_json(const AuditTolerances& t) {
    return json{{"unit", t.unit},
                {"straightness", t.straightness},
                {"intersection_gap", t.intersection_gap},
                {"angle", t.angle},
                {"contact", t.contact},
                {"rank", t.rank}};
}

inline json audit_block(const AuditReport& r) {
    json intersections = json::array();
    for (const auto& rec : r.intersections)
        intersections.push_back(json{{"i", rec.i},
                                     {"j", rec.j},
                                     {"t1", rec.t1},
                                     {"t2", rec.t2},
                                     {"gap", rec.gap}});
    json errors = json::array();
    for (const auto& pe : r.point_errors)
        errors.push_back(json{{"index", pe.index}, {"message", pe.message}});
    return json{
        {"grid", {r.grid_dims[0], r.grid_dims[1], r.grid_dims[2]}},
        {"unit_defect_max", r.unit_defect_max},
        {"straightness_defect_max", r.straightness_defect_max},
        {"intersections", intersections},
        {"parallel_pairs_count", r.parallel_pairs.size()},
        {"rank_histogram", {r.rank_histogram[0], r.rank_histogram[1], r.rank_histogram[2],
                            r.rank_histogram[3]}},
        {"point_errors", errors},
        {"verdicts",
         {{"is_fibration_on_box", r.is_fibration_on_box},
          {"is_contact_on_box", r.is_contact_on_box},
          {"rank_profile", to_string(r.rank_profile)}}},
    };
}

inline json contact_block(const AuditReport& r) {
    return json{{"defect_min", r.contact_defect_min},
                {"defect_max", r.contact_defect_max},
                {"zero_set_detected", r.zero_set_detected}};
}

inline json winding_entry(const Point3& at, double eps, const WindingResult& w) {
    return json{{"at", {at.x(), at.y(), at.z()}},
                {"eps", eps},
                {"winding", w.winding},
                {"min_abs_w", w.min_abs_w},
                {"samples", w.samples_used},
                {"degenerate", w.degenerate}};
}

inline json flow_entry(const Point3& from, double t_max, const FlowCurve& curve,
                       double constancy, double straightness) {
    const Point3& first = curve.points.front();
    const Point3& last = curve.points.back();
    return json{{"from", {from.x(), from.y(), from.z()}},
                {"t_max", t_max},
                {"step", curve.step},
                {"points", curve.points.size()},
                {"start", {first.x(), first.y(), first.z()}},
                {"end", {last.x(), last.y(), last.z()}},
                {"constancy", constancy},
                {"projected_straightness", straightness}};
}

inline json standardization_block(const ClassifyResult& res) {
    json block;
    block["verdict"] = to_string(res.verdict);
    json theta_z = json::array();
    json theta_values = json::array();
    if (res.theta) {
        for (double v : res.theta->z) theta_z.push_back(v);
        for (double v : res.theta->theta) theta_values.push_back(v);
    }
    block["theta_z"] = theta_z;
    block["theta_values"] = theta_values;
    if (res.theta) {
        double lo = res.theta->theta_prime.front();
        double hi = lo;
        for (double v : res.theta->theta_prime) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        block["theta_prime_min"] = lo;
        block["theta_prime_max"] = hi;
    } else {
        block["theta_prime_min"] = nullptr;
        block["theta_prime_max"] = nullptr;
    }
    if (res.pullback_defect)
        block["pullback_defect"] = *res.pullback_defect;
    else
        block["pullback_defect"] = nullptr;
    block["refused"] = res.standardization_refused;
    if (!res.note.empty()) block["note"] = res.note;
    return block;
}

}  // namespace linefib
