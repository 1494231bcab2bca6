#include "schema_check.hpp"

namespace liesym::cli {

namespace {

bool has_type(const nlohmann::json& doc, const std::string& t) {
    if (t == "object") return doc.is_object();
    if (t == "array") return doc.is_array();
    if (t == "string") return doc.is_string();
    if (t == "boolean") return doc.is_boolean();
    if (t == "integer") return doc.is_number_integer();
    if (t == "number") return doc.is_number();
    if (t == "null") return doc.is_null();
    return false;
}

} // namespace

std::vector<std::string> validate(const nlohmann::json& schema, const nlohmann::json& doc, const std::string& path) {
    std::vector<std::string> errs;
    if (schema.contains("type")) {
        const auto& t = schema["type"];
        bool ok = false;
        if (t.is_string())
            ok = has_type(doc, t.get<std::string>());
        else
            for (const auto& alt : t) ok = ok || has_type(doc, alt.get<std::string>());
        if (!ok) {
            errs.push_back(path + ": wrong type, expected " + t.dump());
            return errs;
        }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& e : schema["enum"]) found = found || e == doc;
        if (!found) errs.push_back(path + ": value " + doc.dump() + " not in enum");
    }
    if (schema.contains("minimum") && doc.is_number() && doc.get<double>() < schema["minimum"].get<double>())
        errs.push_back(path + ": below minimum");
    if (schema.contains("minLength") && doc.is_string() && doc.get<std::string>().size() < schema["minLength"].get<std::size_t>())
        errs.push_back(path + ": string too short");
    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const auto& r : schema["required"])
                if (!doc.contains(r.get<std::string>())) errs.push_back(path + ": missing " + r.get<std::string>());
        const nlohmann::json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
        bool closed = schema.contains("additionalProperties") && schema["additionalProperties"] == false;
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            if (props && props->contains(it.key())) {
                auto sub = validate((*props)[it.key()], it.value(), path + "." + it.key());
                errs.insert(errs.end(), sub.begin(), sub.end());
            } else if (closed) {
                errs.push_back(path + ": unexpected property " + it.key());
            }
        }
    }
    if (doc.is_array() && schema.contains("items"))
        for (std::size_t i = 0; i < doc.size(); ++i) {
            auto sub = validate(schema["items"], doc[i], path + "[" + std::to_string(i) + "]");
            errs.insert(errs.end(), sub.begin(), sub.end());
        }
    return errs;
}

} // namespace liesym::cli
