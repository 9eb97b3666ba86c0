#pragma once

// JSON frame files.
//
//   {
//     "schema": "cstar-frames/frame", "version": 1,
//     "algebra": {"d": 2}, "module": {"n": 3},
//     "vectors": [ [block_1, …, block_n], … ],       // block = d rows of d [re, im] pairs
//     "certificate": {                               // optional
//       "xi": 1.0, "permutation": [0, 1, 2],         // 0-based basis indices
//       "profile": {"kind": "gaussian", "xi": 1, "c": 1, "r": 0.5, "p": 1, "reciprocal": false},
//       "k_eigenvalues": [ … ]                       // instead of "profile" for finite-rank K
//     }
//   }
//
// Doubles are written in shortest round-trip form (never more than 17
// significant digits), so parse(serialize(F)) reproduces every entry bit for
// bit.

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "constructors.hpp"
#include "weaving.hpp"

namespace cstar_frames::io {

using json = nlohmann::json;

inline constexpr const char* kFrameSchema = "cstar-frames/frame";
inline constexpr const char* kPartitionSchema = "cstar-frames/partition";
inline constexpr int kSchemaVersion = 1;

/// Syntax or structural problem in an input file (CLI exit code 2).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(line ? msg + " at line " + std::to_string(line) + ", column " + std::to_string(column)
                                  : msg),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

    /// Same error and position, message prefixed with the file name.
    static ParseError in_file(const std::string& path, const ParseError& e) {
        ParseError out(path + ": " + e.what());
        out.line_ = e.line_;
        out.column_ = e.column_;
        return out;
    }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Counts in the file disagree with the declared d / n (CLI exit code 3).
class DimensionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

using PathToken = std::variant<std::size_t, std::string>;
using JsonPath = std::vector<PathToken>;

namespace detail {

inline std::string path_string(const JsonPath& path) {
    std::string out;
    for (const auto& t : path) {
        out += '/';
        if (const auto* i = std::get_if<std::size_t>(&t)) out += std::to_string(*i);
        else out += std::get<std::string>(t);
    }
    return out.empty() ? "/" : out;
}

// Minimal scanner over text that is already known to be valid JSON; used only
// to turn a path into a source position for error messages.
class Locator {
public:
    explicit Locator(const std::string& text) : s_(text) {}

    std::size_t find(const JsonPath& path) {
        i_ = 0;
        ws();
        for (const auto& tok : path) {
            if (i_ >= s_.size()) break;
            if (s_[i_] == '[' && std::holds_alternative<std::size_t>(tok)) {
                if (!enter_array(std::get<std::size_t>(tok))) break;
            } else if (s_[i_] == '{' && std::holds_alternative<std::string>(tok)) {
                if (!enter_object(std::get<std::string>(tok))) break;
            } else {
                break;
            }
        }
        return i_;
    }

    std::pair<std::size_t, std::size_t> line_col(std::size_t offset) const {
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k < offset && k < s_.size(); ++k) {
            if (s_[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }

private:
    void ws() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\n' || s_[i_] == '\t' || s_[i_] == '\r')) ++i_;
    }

    std::string str() {
        std::string out;
        ++i_;
        while (i_ < s_.size() && s_[i_] != '"') {
            if (s_[i_] == '\\') ++i_;
            if (i_ < s_.size()) out += s_[i_++];
        }
        ++i_;
        return out;
    }

    void skip() {
        ws();
        if (i_ >= s_.size()) return;
        const char c = s_[i_];
        if (c == '"') {
            str();
        } else if (c == '[' || c == '{') {
            const char close = c == '[' ? ']' : '}';
            ++i_;
            ws();
            if (s_[i_] == close) {
                ++i_;
                return;
            }
            while (i_ < s_.size()) {
                if (c == '{') {
                    ws();
                    str();
                    ws();
                    ++i_;  // ':'
                }
                skip();
                ws();
                if (s_[i_] == ',') {
                    ++i_;
                    continue;
                }
                ++i_;  // close
                return;
            }
        } else {
            while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != ']' && s_[i_] != '}' && s_[i_] != ' ' &&
                   s_[i_] != '\n' && s_[i_] != '\t' && s_[i_] != '\r')
                ++i_;
        }
    }

    bool enter_array(std::size_t index) {
        ++i_;
        for (std::size_t k = 0;; ++k) {
            ws();
            if (i_ >= s_.size() || s_[i_] == ']') return false;
            if (k == index) return true;
            skip();
            ws();
            if (i_ < s_.size() && s_[i_] == ',') ++i_;
        }
    }

    bool enter_object(const std::string& key) {
        ++i_;
        for (;;) {
            ws();
            if (i_ >= s_.size() || s_[i_] == '}') return false;
            const std::string k = str();
            ws();
            ++i_;  // ':'
            ws();
            if (k == key) return true;
            skip();
            ws();
            if (i_ < s_.size() && s_[i_] == ',') ++i_;
        }
    }

    const std::string& s_;
    std::size_t i_ = 0;
};

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const JsonPath& path, const std::string& msg) const {
        Locator loc(text_);
        const auto [line, col] = loc.line_col(loc.find(path));
        throw ParseError(msg + " (" + path_string(path) + ")", line, col);
    }

    [[noreturn]] void dim_fail(const JsonPath& path, const std::string& msg) const {
        Locator loc(text_);
        const auto [line, col] = loc.line_col(loc.find(path));
        throw DimensionError(msg + " (" + path_string(path) + ") at line " + std::to_string(line) + ", column " +
                             std::to_string(col));
    }

    const json& member(const json& obj, const std::string& key, JsonPath path) const {
        if (!obj.is_object()) fail(path, "expected an object");
        const auto it = obj.find(key);
        path.emplace_back(key);
        if (it == obj.end()) fail(path, "missing field '" + key + "'");
        return *it;
    }

    double number(const json& v, const JsonPath& path) const {
        if (!v.is_number()) fail(path, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(path, "number is not finite");
        return x;
    }

    std::size_t count(const json& v, const JsonPath& path) const {
        if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) fail(path, "expected a positive integer");
        return v.get<std::size_t>();
    }

    const json& array(const json& v, const JsonPath& path) const {
        if (!v.is_array()) fail(path, "expected an array");
        return v;
    }

private:
    const std::string& text_;
};

inline json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

} // namespace detail

struct FrameFile {
    FrameSystem frame;
    std::optional<CompactTightCert> cert;
};

inline json profile_to_json(const ScalarProfile& p) {
    json j = {{"kind", to_string(p.kind)}, {"xi", p.xi}, {"c", p.c}};
    if (p.kind == ProfileKind::Geometric) j["r"] = p.r;
    if (p.kind == ProfileKind::Power) j["p"] = p.p;
    if (p.reciprocal) j["reciprocal"] = true;
    return j;
}

/// Eigenvalues of K along the certificate's permuted basis.
inline std::vector<double> certificate_kappas(const CompactTightCert& cert) {
    const ModuleShape shape = cert.k.shape();
    std::vector<double> out;
    out.reserve(cert.permutation.size());
    for (std::size_t idx : cert.permutation) {
        const std::size_t i = idx * shape.d;
        out.push_back(cert.k.mat()(i, i).real());
    }
    return out;
}

inline json certificate_to_json(const CompactTightCert& cert) {
    json j = {{"xi", cert.xi}, {"permutation", cert.permutation}};
    if (cert.profile) j["profile"] = profile_to_json(*cert.profile);
    else j["k_eigenvalues"] = certificate_kappas(cert);
    return j;
}

inline json frame_to_json(const FrameSystem& frame, const std::optional<CompactTightCert>& cert = std::nullopt) {
    const ModuleShape shape = frame.shape();
    json vectors = json::array();
    for (const auto& v : frame.vectors()) {
        json blocks = json::array();
        for (std::size_t b = 0; b < shape.n; ++b) {
            json rows = json::array();
            for (std::size_t r = 0; r < shape.d; ++r) {
                json row = json::array();
                for (std::size_t c = 0; c < shape.d; ++c) row.push_back(detail::complex_json(v.rep()(r, b * shape.d + c)));
                rows.push_back(std::move(row));
            }
            blocks.push_back(std::move(rows));
        }
        vectors.push_back(std::move(blocks));
    }
    json j = {{"schema", kFrameSchema},
              {"version", kSchemaVersion},
              {"algebra", {{"d", shape.d}}},
              {"module", {{"n", shape.n}}},
              {"vectors", std::move(vectors)}};
    if (cert) j["certificate"] = certificate_to_json(*cert);
    return j;
}

inline std::string serialize_frame(const FrameSystem& frame, const std::optional<CompactTightCert>& cert = std::nullopt) {
    return frame_to_json(frame, cert).dump(1) + "\n";
}

inline constexpr double kCertificateTol = 1e-8;

inline FrameFile parse_frame(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        detail::Locator loc(text);
        const std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
        const auto [line, col] = loc.line_col(offset);
        throw ParseError("malformed JSON", line, col);
    } catch (const json::out_of_range& e) {
        throw ParseError(std::string("number out of range: ") + e.what());
    }
    const detail::Reader rd(text);
    if (!doc.is_object()) rd.fail({}, "top level must be an object");
    if (auto it = doc.find("schema"); it != doc.end() && *it != kFrameSchema) rd.fail({"schema"}, "unexpected schema");
    if (auto it = doc.find("version"); it != doc.end() && *it != kSchemaVersion)
        rd.fail({"version"}, "unsupported version");

    const std::size_t d = rd.count(rd.member(rd.member(doc, "algebra", {}), "d", {"algebra"}), {"algebra", "d"});
    const std::size_t n = rd.count(rd.member(rd.member(doc, "module", {}), "n", {"module"}), {"module", "n"});
    const ModuleShape shape(d, n);

    const json& vectors = rd.array(rd.member(doc, "vectors", {}), {"vectors"});
    if (vectors.empty()) rd.fail({"vectors"}, "a frame needs at least one vector");
    std::vector<ModuleVector> parsed;
    parsed.reserve(vectors.size());
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        const JsonPath vp{"vectors", k};
        const json& blocks = rd.array(vectors[k], vp);
        ComplexMatrix rep(d, shape.width());
        // Structure first (exit 2), then counts against d and n (exit 3).
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            JsonPath bp = vp;
            bp.emplace_back(b);
            const json& rows = rd.array(blocks[b], bp);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                JsonPath rp = bp;
                rp.emplace_back(r);
                const json& row = rd.array(rows[r], rp);
                for (std::size_t c = 0; c < row.size(); ++c) {
                    JsonPath ep = rp;
                    ep.emplace_back(c);
                    const json& pair = row[c];
                    if (!pair.is_array() || pair.size() != 2) rd.fail(ep, "expected an [re, im] pair");
                    JsonPath re = ep, im = ep;
                    re.emplace_back(std::size_t{0});
                    im.emplace_back(std::size_t{1});
                    const Complex z(rd.number(pair[0], re), rd.number(pair[1], im));
                    if (b < n && r < d && c < d) rep(r, b * d + c) = z;
                }
            }
        }
        if (blocks.size() != n)
            rd.dim_fail(vp, "vector has " + std::to_string(blocks.size()) + " blocks, module rank is " + std::to_string(n));
        for (std::size_t b = 0; b < n; ++b) {
            JsonPath bp = vp;
            bp.emplace_back(b);
            if (blocks[b].size() != d)
                rd.dim_fail(bp, "block has " + std::to_string(blocks[b].size()) + " rows, d is " + std::to_string(d));
            for (std::size_t r = 0; r < d; ++r)
                if (blocks[b][r].size() != d) {
                    JsonPath rp = bp;
                    rp.emplace_back(r);
                    rd.dim_fail(rp, "row has " + std::to_string(blocks[b][r].size()) + " entries, d is " +
                                        std::to_string(d));
                }
        }
        parsed.emplace_back(shape, std::move(rep));
    }
    FrameFile out{FrameSystem(std::move(parsed)), std::nullopt};

    if (auto it = doc.find("certificate"); it != doc.end()) {
        const json& cj = *it;
        const JsonPath cp{"certificate"};
        const double xi = rd.number(rd.member(cj, "xi", cp), {"certificate", "xi"});
        const json& perm_j = rd.array(rd.member(cj, "permutation", cp), {"certificate", "permutation"});
        std::vector<std::size_t> perm;
        for (std::size_t k = 0; k < perm_j.size(); ++k) {
            if (!perm_j[k].is_number_unsigned() || perm_j[k].get<std::size_t>() >= n)
                rd.fail({"certificate", "permutation", k}, "permutation entry must be a basis index < n");
            perm.push_back(perm_j[k].get<std::size_t>());
        }
        std::optional<ScalarProfile> profile;
        std::vector<double> kappas;
        if (auto pit = cj.find("profile"); pit != cj.end()) {
            const JsonPath pp{"certificate", "profile"};
            const json& pj = *pit;
            const json& kind_j = rd.member(pj, "kind", pp);
            if (!kind_j.is_string()) rd.fail({"certificate", "profile", "kind"}, "expected a string");
            try {
                ScalarProfile p;
                p.kind = parse_profile_kind(kind_j.get<std::string>());
                p.xi = rd.number(rd.member(pj, "xi", pp), {"certificate", "profile", "xi"});
                p.c = rd.number(rd.member(pj, "c", pp), {"certificate", "profile", "c"});
                if (pj.contains("r")) p.r = rd.number(pj["r"], {"certificate", "profile", "r"});
                if (pj.contains("p")) p.p = rd.number(pj["p"], {"certificate", "profile", "p"});
                if (pj.contains("reciprocal")) {
                    if (!pj["reciprocal"].is_boolean())
                        rd.fail({"certificate", "profile", "reciprocal"}, "expected a boolean");
                    p.reciprocal = pj["reciprocal"].get<bool>();
                }
                p.validate();
                profile = p;
            } catch (const Error& e) {
                rd.fail(pp, e.what());
            }
            for (std::size_t k = 0; k < perm.size(); ++k) kappas.push_back(profile->eval(k + 1) - xi);
        } else {
            const json& kj = rd.array(rd.member(cj, "k_eigenvalues", cp), {"certificate", "k_eigenvalues"});
            if (kj.size() != perm.size()) rd.fail({"certificate", "k_eigenvalues"}, "length differs from permutation");
            for (std::size_t k = 0; k < kj.size(); ++k) kappas.push_back(rd.number(kj[k], {"certificate", "k_eigenvalues", k}));
        }
        CompactTightCert cert{xi, profile, perm, diagonal_operator(shape, perm, kappas)};
        const ModuleOperator& s = out.frame.frame_operator();
        const double residual = certificate_residual(cert, s);
        if (residual > kCertificateTol * std::max(1.0, s.mat().frobenius_norm()))
            rd.fail(cp, "certificate does not match the vectors (residual " + std::to_string(residual) + ")");
        out.cert = std::move(cert);
    }
    return out;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

inline FrameFile load_frame(const std::string& path) {
    const std::string text = read_text(path);
    try {
        return parse_frame(text);
    } catch (const ParseError& e) {
        throw ParseError::in_file(path, e);
    } catch (const DimensionError& e) {
        throw DimensionError(path + ": " + e.what());
    }
}

inline std::string serialize_partition(const Partition& part, const std::vector<std::size_t>& sigma) {
    const json j = {{"schema", kPartitionSchema},
                    {"version", kSchemaVersion},
                    {"assignment", part.assignment},
                    {"sigma", sigma}};
    return j.dump(1) + "\n";
}

inline Partition parse_partition(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        detail::Locator loc(text);
        const auto [line, col] = loc.line_col(e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError("malformed JSON", line, col);
    } catch (const json::out_of_range& e) {
        throw ParseError(std::string("number out of range: ") + e.what());
    }
    const detail::Reader rd(text);
    const json& a = rd.array(rd.member(doc, "assignment", {}), {"assignment"});
    Partition p;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!a[k].is_number_unsigned()) rd.fail({"assignment", k}, "expected a family index");
        p.assignment.push_back(a[k].get<std::size_t>());
    }
    return p;
}

} // namespace cstar_frames::io
