// Copyright 2026 The lht Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON documents and CSV formatting. Needs nlohmann/json on the include path.

#pragma once

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "lht/protocol.hpp"

namespace lht {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "v1";

inline json to_json(const MeasureCollection& c) {
    json ms = json::array();
    for (const auto& m : c.measures) {
        json bs = json::array();
        for (const auto& b : m.blocks)
            bs.push_back({{"type", b.type},
                          {"offset", b.offset},
                          {"size", b.size},
                          {"stride", b.stride},
                          {"weight", {b.weight.num, b.weight.den}}});
        ms.push_back({{"multiplicity", m.multiplicity}, {"blocks", std::move(bs)}});
    }
    return {{"version", kSchemaVersion}, {"n", c.n}, {"d", c.d}, {"measures", std::move(ms)}};
}

inline MeasureCollection collection_from_json(const json& j) {
    require(j.value("version", "") == std::string(kSchemaVersion), "collection: unsupported schema version");
    MeasureCollection c;
    c.n = j.at("n").get<int>();
    c.d = j.at("d").get<int>();
    for (const auto& jm : j.at("measures")) {
        Measure m;
        m.multiplicity = jm.value("multiplicity", std::uint64_t{1});
        for (const auto& jb : jm.at("blocks")) {
            MeasureBlock b;
            b.type = jb.at("type").get<std::vector<int>>();
            b.offset = jb.value("offset", std::uint64_t{0});
            b.size = jb.at("size").get<std::uint64_t>();
            b.stride = jb.value("stride", std::uint64_t{0});
            const auto& w = jb.at("weight");
            require(w.is_array() && w.size() == 2, "collection: weight must be [num, den]");
            b.weight = {w[0].get<std::uint64_t>(), w[1].get<std::uint64_t>()};
            m.blocks.push_back(std::move(b));
        }
        c.measures.push_back(std::move(m));
    }
    return c;
}

inline json to_json(const TestOutcome& o) {
    return {{"alpha", o.alpha}, {"beta", o.beta}, {"log_beta", o.log_beta}, {"provenance", to_string(o.provenance)}};
}

/// Six significant digits, locale-independent.
inline std::string fmt6(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

/// Rows of numbers under a header; comma-separated, LF line endings.
inline std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + fmt6(r[i]);
        out += '\n';
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for reading");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace lht
