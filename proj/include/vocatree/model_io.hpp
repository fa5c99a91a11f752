#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vocatree/common.hpp"
#include "vocatree/forest.hpp"
#include "vocatree/svm.hpp"

namespace vocatree {

// Doubles survive the JSON round trip bit-for-bit (shortest round-trip
// formatting on write, strtod on read), so a reloaded model scores
// identically to the trained one.

inline nlohmann::json svm_to_json(const SvmModel& m) {
    return {{"kind", "svm"},
            {"feature_mean", m.feature_mean},
            {"feature_std", m.feature_std},
            {"weights", m.weights},
            {"bias", m.bias},
            {"alpha", m.alpha},
            {"c", m.c},
            {"tol", m.tol},
            {"converged", m.converged}};
}

inline SvmModel svm_from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != std::string("svm")) {
        throw ParseError("model: expected kind 'svm'");
    }
    SvmModel m;
    m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
    m.feature_std = j.at("feature_std").get<std::vector<double>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.alpha = j.at("alpha").get<std::vector<double>>();
    m.c = j.at("c").get<double>();
    m.tol = j.at("tol").get<double>();
    m.converged = j.at("converged").get<bool>();
    if (m.feature_mean.size() != m.feature_std.size() ||
        m.feature_mean.size() != m.weights.size()) {
        throw ShapeError("model: inconsistent svm vector sizes");
    }
    return m;
}

inline nlohmann::json forest_to_json(const ForestModel& m) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : m.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& nd : tree.nodes) {
            nodes.push_back({{"feature", nd.feature},
                             {"threshold", nd.threshold},
                             {"left", nd.left},
                             {"right", nd.right},
                             {"leaf", label_sign(nd.leaf)}});
        }
        trees.push_back(std::move(nodes));
    }
    return {{"kind", "forest"},
            {"trees", trees},
            {"oob_accuracy", m.oob_accuracy},
            {"oob_counted", m.oob_counted}};
}

inline ForestModel forest_from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != std::string("forest")) {
        throw ParseError("model: expected kind 'forest'");
    }
    ForestModel m;
    for (const auto& jt : j.at("trees")) {
        DecisionTree tree;
        for (const auto& jn : jt) {
            TreeNode nd;
            nd.feature = jn.at("feature").get<int>();
            nd.threshold = jn.at("threshold").get<double>();
            nd.left = jn.at("left").get<int>();
            nd.right = jn.at("right").get<int>();
            nd.leaf = label_from_sign(jn.at("leaf").get<int>());
            tree.nodes.push_back(nd);
        }
        if (tree.nodes.empty()) throw ShapeError("model: empty tree");
        m.trees.push_back(std::move(tree));
    }
    m.oob_accuracy = j.at("oob_accuracy").get<double>();
    m.oob_counted = j.at("oob_counted").get<std::size_t>();
    return m;
}

inline void save_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("bad json in ") + path + ": " + e.what());
    }
}

}  // namespace vocatree
