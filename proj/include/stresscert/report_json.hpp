#pragma once

#include <json.hpp>

#include "stresscert/anchored.hpp"
#include "stresscert/stress.hpp"

// JSON rendering of verifier reports and purification traces, shared by the
// CLI and the python bindings. Rational scalars are rendered as "p/q" strings
// so nothing is rounded on the way out.

namespace stresscert {

inline nlohmann::json scalar_json(const Rat& v) { return v.to_string(); }
inline nlohmann::json scalar_json(double v) { return v; }

template <class T>
inline nlohmann::json verify_json(const VerifyReport<T>& r) {
    nlohmann::json j;
    j["symmetric"] = r.sym_ok;
    j["null_ok"] = r.null_ok;
    j["offedge_ok"] = r.offedge_ok;
    j["psd_ok"] = r.psd_ok;
    j["rank"] = r.rank;
    j["rank_ok"] = r.rank_ok;
    j["gram_rank"] = r.gram_rank;
    j["complementarity_ok"] = r.complementarity_ok;
    j["dual_objective"] = scalar_json(r.dual_obj);
    j["dual_objective_ok"] = r.dual_obj_ok;
    if (r.offedge_witness)
        j["offedge_witness"] = {r.offedge_witness->first, r.offedge_witness->second};
    if (r.psd_witness) j["psd_witness"] = scalar_json(*r.psd_witness);
    j["pass"] = r.pass();
    return j;
}

template <class T>
inline nlohmann::json verify_json(const AnchoredVerifyReport<T>& r) {
    nlohmann::json j;
    j["symmetric"] = r.sym_ok;
    j["znull_ok"] = r.znull_ok;
    j["psd_ok"] = r.psd_ok;
    j["rank"] = r.rank;
    j["rank_ok"] = r.rank_ok;
    j["offedge_ok"] = r.offedge_ok;
    j["weights_ok"] = r.weights_ok;
    j["gap"] = scalar_json(r.gap);
    j["gap_ok"] = r.gap_ok;
    if (r.offedge_witness)
        j["offedge_witness"] = {r.offedge_witness->first, r.offedge_witness->second};
    if (r.psd_witness) j["psd_witness"] = scalar_json(*r.psd_witness);
    if (r.weights_witness) j["weights_witness"] = *r.weights_witness;
    j["pass"] = r.pass();
    return j;
}

template <class T>
inline nlohmann::json trace_json(const PurificationTrace<T>& trace, bool with_vectors) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& st : trace.steps) {
        nlohmann::json o;
        o["vertex"] = st.vertex;
        o["position"] = st.position;
        o["skipped"] = st.skipped;
        if (!st.skipped) {
            o["selected"] = st.selected;
            o["reselected"] = st.reselected;
            if (with_vectors) {
                nlohmann::json v = nlohmann::json::array();
                for (const auto& x : st.s) v.push_back(scalar_json(x));
                o["s"] = std::move(v);
            }
        }
        if (st.rank_after) o["rank_after"] = *st.rank_after;
        steps.push_back(std::move(o));
    }
    return steps;
}

template <class T>
inline nlohmann::json trace_json(const AnchoredTrace<T>& trace, bool with_vectors) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& st : trace.steps) {
        nlohmann::json o;
        o["sensor"] = st.sensor;
        o["position"] = st.position;
        o["selected_anchors"] = st.selected_anchors;
        o["selected_sensors"] = st.selected_sensors;
        o["reselected"] = st.reselected;
        if (with_vectors) {
            nlohmann::json v = nlohmann::json::array();
            for (const auto& x : st.s) v.push_back(scalar_json(x));
            o["s"] = std::move(v);
        }
        if (st.rank_after) o["rank_after"] = *st.rank_after;
        steps.push_back(std::move(o));
    }
    return steps;
}

}  // namespace stresscert
