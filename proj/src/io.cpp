#include "dmso/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dmso {

namespace {

constexpr const char* kFormat = "dmso-class/1";

double parse_number(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw std::invalid_argument("parse_class: expected a decimal string");
    const std::string s = j.get<std::string>();
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw std::invalid_argument("parse_class: bad number '" + s + "'");
    return x;
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string serialize_class(const ModelClass& cls) {
    nlohmann::ordered_json doc;
    doc["format"] = kFormat;
    doc["decisions"] = cls.decisions();
    nlohmann::json support = nlohmann::json::array();
    for (Eigen::Index r = 0; r < cls.reward_support().size(); ++r) support.push_back(format_double(cls.reward_support()(r)));
    doc["reward_support"] = support;
    doc["obs_count"] = cls.obs_count();
    nlohmann::ordered_json models = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < cls.size(); ++i) {
        nlohmann::ordered_json m;
        m["label"] = cls.labels().empty() ? "" : cls.labels()[i];
        nlohmann::json rows = nlohmann::json::array();
        const Kernel& k = cls[i].kernel();
        for (Eigen::Index d = 0; d < k.rows(); ++d) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index x = 0; x < k.cols(); ++x) row.push_back(format_double(k(d, x)));
            rows.push_back(row);
        }
        m["kernel"] = rows;
        models.push_back(m);
    }
    doc["models"] = models;
    return doc.dump(1) + "\n";
}

ModelClass parse_class(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("parse_class: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != kFormat)
        throw std::invalid_argument("parse_class: missing or unknown format tag");
    try {
        const int decisions = doc.at("decisions").get<int>();
        const int obs_count = doc.at("obs_count").get<int>();
        const auto& sup = doc.at("reward_support");
        Vector support(static_cast<Eigen::Index>(sup.size()));
        for (std::size_t r = 0; r < sup.size(); ++r) support(r) = parse_number(sup[r]);
        const int alphabet = obs_count > 0 ? obs_count : 1;
        std::vector<FiniteModel> models;
        std::vector<std::string> labels;
        bool any_label = false;
        for (const auto& m : doc.at("models")) {
            const auto& rows = m.at("kernel");
            if (static_cast<int>(rows.size()) != decisions) throw std::invalid_argument("parse_class: row count mismatch");
            Kernel k(decisions, support.size() * alphabet);
            for (int d = 0; d < decisions; ++d) {
                if (static_cast<Eigen::Index>(rows[d].size()) != k.cols())
                    throw std::invalid_argument("parse_class: row width mismatch");
                for (Eigen::Index x = 0; x < k.cols(); ++x) k(d, x) = parse_number(rows[d][x]);
            }
            models.emplace_back(support, obs_count, std::move(k));
            const std::string label = m.value("label", "");
            any_label = any_label || !label.empty();
            labels.push_back(label);
        }
        if (!any_label) labels.clear();
        return ModelClass(std::move(models), std::move(labels));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("parse_class: ") + e.what());
    }
}

ModelClass load_class(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_class(ss.str());
}

void save_class(const std::string& path, const ModelClass& cls) { write_atomic(path, serialize_class(cls)); }

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace dmso
