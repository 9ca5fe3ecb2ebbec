#include <fstream>

#include <nlohmann/json.hpp>

#include "mpsqc/mps.hpp"

namespace mpsqc {

using json = nlohmann::ordered_json;

namespace {

const char* form_name(CanonicalForm f) {
    switch (f) {
        case CanonicalForm::left: return "left";
        case CanonicalForm::right: return "right";
        default: return "none";
    }
}

CanonicalForm form_from(const std::string& s) {
    if (s == "left") return CanonicalForm::left;
    if (s == "right") return CanonicalForm::right;
    if (s == "none") return CanonicalForm::none;
    throw IoError("unknown canonical_form: " + s);
}

}  // namespace

std::string mps_to_json(const MPS& s) {
    json j;
    j["n"] = s.n();
    j["chi"] = s.max_bond();
    j["canonical_form"] = form_name(s.form);
    json ts = json::array();
    for (const auto& t : s.tensors) {
        // axis order: [left][physical][right], entries [real, imag]
        json jt = json::array();
        for (std::size_t a = 0; a < t.l; ++a) {
            json ja = json::array();
            for (int p = 0; p < 2; ++p) {
                json jp = json::array();
                for (std::size_t b = 0; b < t.r; ++b) {
                    const cd v = t.at(a, p, b);
                    jp.push_back(json::array({v.real(), v.imag()}));
                }
                ja.push_back(std::move(jp));
            }
            jt.push_back(std::move(ja));
        }
        ts.push_back(std::move(jt));
    }
    j["tensors"] = std::move(ts);
    return j.dump();
}

MPS mps_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("invalid MPS document: ") + e.what());
    }
    try {
        const int n = j.at("n").get<int>();
        MPS s;
        s.form = form_from(j.at("canonical_form").get<std::string>());
        const json& ts = j.at("tensors");
        if (static_cast<int>(ts.size()) != n) throw IoError("tensor count does not match n");
        std::size_t prev_r = 1;
        for (int k = 0; k < n; ++k) {
            const json& jt = ts.at(k);
            const std::size_t l = jt.size();
            if (l == 0 || jt.at(0).size() != 2) throw IoError("malformed tensor axes");
            const std::size_t r = jt.at(0).at(0).size();
            if (l != prev_r) throw IoError("bond dimensions do not chain");
            Tensor3 t(l, r);
            for (std::size_t a = 0; a < l; ++a)
                for (int p = 0; p < 2; ++p) {
                    const json& jp = jt.at(a).at(p);
                    if (jp.size() != r) throw IoError("ragged tensor row");
                    for (std::size_t b = 0; b < r; ++b)
                        t.at(a, p, b) = cd{jp.at(b).at(0).get<double>(), jp.at(b).at(1).get<double>()};
                }
            s.tensors.push_back(std::move(t));
            prev_r = r;
        }
        if (prev_r != 1) throw IoError("last tensor must close the chain");
        return s;
    } catch (const json::exception& e) {
        throw IoError(std::string("invalid MPS document: ") + e.what());
    }
}

void save_mps(const MPS& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << mps_to_json(s) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

MPS load_mps(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return mps_from_json(text);
}

}  // namespace mpsqc
