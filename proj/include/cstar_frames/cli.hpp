#pragma once

// Command-line front end.  `run_cli` is the whole program; tools/ only wraps
// it in main().  Exit codes: 0 ok, 2 parse error, 3 shape/length mismatch,
// 4 invalid flags, 5 partition cap exceeded, 6 not a frame, 1 anything else.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "decomposition.hpp"
#include "frame_file.hpp"
#include "weaving.hpp"

namespace cstar_frames::cli {

using json = nlohmann::json;

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kParse = 2,
    kShape = 3,
    kFlags = 4,
    kCap = 5,
    kNotAFrame = 6,
};

inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

// Flattens a JSON report into `a.b.c=value` lines for --format text.
inline void flatten(const json& j, const std::string& prefix, std::ostream& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        bool scalar = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
        if (scalar) {
            out << prefix << '=';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out << ',';
                if (j[i].is_number_float()) out << fmt_double(j[i].get<double>());
                else out << j[i].dump();
            }
            out << '\n';
        } else {
            for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
        }
    } else if (j.is_number_float()) {
        out << prefix << '=' << fmt_double(j.get<double>()) << '\n';
    } else if (j.is_string()) {
        out << prefix << '=' << j.get<std::string>() << '\n';
    } else {
        out << prefix << '=' << j.dump() << '\n';
    }
}

inline void emit(const json& report, const std::string& format, std::ostream& out) {
    if (format == "json") out << report.dump(2) << '\n';
    else flatten(report, "", out);
}

inline json claim_json(const ClaimCheck& c) {
    return {{"premise", c.premise}, {"conclusion", c.conclusion}, {"slack", c.slack}, {"holds", c.holds()}};
}

inline json bounds_json(const BoundsReport& b) {
    return {{"lower", b.lower}, {"upper", b.upper}, {"tight", b.tight}, {"isFrame", b.is_frame},
            {"isBessel", b.is_bessel}};
}

inline double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string output_base(const std::string& out) {
    const std::string ext = ".json";
    if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
        return out.substr(0, out.size() - ext.size());
    return out;
}

// "kind:c[:r|p]" with limit 0, e.g. "gaussian:1" or "geometric:1:0.5".
inline ScalarProfile parse_profile_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() < 2 || parts.size() > 3)
        throw Error(ErrorCode::InvalidProfile, "profile spec '" + spec + "' must be kind:c[:param]");
    const ProfileKind kind = parse_profile_kind(parts[0]);
    const double c = std::stod(parts[1]);
    double r = 0.5, p = 1.0;
    if (parts.size() == 3) {
        if (kind == ProfileKind::Geometric) r = std::stod(parts[2]);
        else if (kind == ProfileKind::Power) p = std::stod(parts[2]);
        else throw Error(ErrorCode::InvalidProfile, "profile '" + parts[0] + "' takes no parameter");
    }
    return ScalarProfile::make(kind, 0.0, c, r, p);
}

struct FlagError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace detail

struct AnalyzeOptions {
    std::optional<double> xi, eta, alpha;
    double tol = kDefaultTol;
};

/// Analysis report for one frame file.  `timing.seconds` is the only field
/// that differs between identical runs.
inline json analyze_report(const io::FrameFile& file, const AnalyzeOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const FrameSystem& frame = file.frame;
    const BoundsReport b = optimal_bounds(frame, opt.tol);
    json report = {{"shape", {{"d", frame.shape().d}, {"n", frame.shape().n}, {"N", frame.size()}}},
                   {"bounds", detail::bounds_json(b)}};

    if (opt.xi) {
        const ShiftDecomposition dec = shift_decompose(frame, *opt.xi);
        const ShiftClaimsReport claims = check_shift_claims(frame, *opt.xi, opt.tol);
        const double eta = opt.eta.value_or(0.0);
        const LowerBoundEstimate est = shift_lower_bound(dec, eta);
        json dj = {{"xi", *opt.xi},
                   {"tNorm", operator_norm(dec.t)},
                   {"tPositive", claims.t_positive},
                   {"besselBound", claims.bessel_bound},
                   {"part1", detail::claim_json(claims.part1)},
                   {"part2", detail::claim_json(claims.part2)},
                   {"part3", detail::claim_json(claims.part3)},
                   {"allPass", claims.all_hold()},
                   {"lowerEstimate",
                    {{"eta", eta},
                     {"rho", est.rho},
                     {"value", est.value},
                     {"tPositive", est.t_positive},
                     {"formulaOnly", est.formula_only},
                     {"certified", est.value > 0.0 && !est.formula_only && b.lower >= est.value - 1e-9}}}};
        if (opt.alpha && opt.eta) {
            const DeviationCertificate cert = deviation_check(dec.t, *opt.alpha, *opt.eta);
            dj["deviation"] = {{"alpha", cert.alpha}, {"eta", cert.eta}, {"holds", cert.holds}, {"slack", cert.slack}};
        }
        report["decomposition"] = std::move(dj);
        report["besselBound"] = claims.bessel_bound;
    }

    if (file.cert) {
        const CompactTightCert& c = *file.cert;
        json cj = {{"xi", c.xi},
                   {"residual", certificate_residual(c, frame.frame_operator())},
                   {"kLimit", c.k_limit()},
                   {"compact", std::abs(c.k_limit()) <= 1e-12},
                   {"kRank", [&] {
                        std::size_t rank = 0;
                        for (double k : io::certificate_kappas(c)) rank += std::abs(k) > opt.tol ? frame.shape().d : 0;
                        return rank;
                    }()}};
        if (c.profile) {
            cj["profile"] = io::profile_to_json(*c.profile);
            cj["asymptoticLower"] = c.profile->infimum();
            cj["supremum"] = c.profile->supremum();
        }
        report["certificate"] = std::move(cj);
    }
    report["timing"] = {{"seconds", detail::elapsed(t0)}};
    return report;
}

struct PerturbOptions {
    double xi = 0.0;
    double eta = 0.0;
    double tol = kDefaultTol;
};

inline json perturb_report(const io::FrameFile& ff, const io::FrameFile& gf, const PerturbOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const double mu = perturbation_distance(ff.frame, gf.frame);
    const ShiftDecomposition dec = shift_decompose(ff.frame, opt.xi);
    const PerturbedBounds pred = perturbed_frame_bounds(dec, opt.eta, mu);
    const BoundsReport actual = optimal_bounds(gf.frame, opt.tol);

    json report = {{"mu", mu},
                   {"xi", opt.xi},
                   {"eta", opt.eta},
                   {"lowerEstimate", pred.lower_bound},
                   {"actual", detail::bounds_json(actual)}};
    if (pred.applicable) {
        const bool pass = pred.low - 1e-9 <= actual.lower && actual.upper <= pred.high + 1e-9;
        report["prediction"] = {{"status", "Applicable"},
                                {"low", pred.low},
                                {"high", pred.high},
                                {"lowAlt", pred.low_alt},
                                {"sandwich", pass}};
    } else {
        report["prediction"] = {{"status", "NotApplicable"}, {"high", pred.high}};
    }
    report["timing"] = {{"seconds", detail::elapsed(t0)}};
    return report;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Frames in Hilbert C*-modules over matrix algebras"};
    app.require_subcommand(1);

    std::string format = "text";
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
    };

    // analyze
    auto* analyze = app.add_subcommand("analyze", "optimal bounds and shift-decomposition diagnostics");
    std::string a_file;
    std::optional<double> a_xi, a_eta, a_alpha;
    double tol = kDefaultTol;
    analyze->add_option("file", a_file)->required();
    analyze->add_option("--xi", a_xi);
    analyze->add_option("--eta", a_eta);
    analyze->add_option("--alpha", a_alpha);
    analyze->add_option("--tol", tol);
    add_format(analyze);

    // construct
    auto* construct = app.add_subcommand("construct", "build a frame file");
    construct->require_subcommand(1);
    std::string c_out;
    std::size_t c_n = 0, c_d = 1;
    std::optional<std::size_t> c_count;

    auto* scaled = construct->add_subcommand("scaled-basis", "{sqrt(l_k) e_k} for a scalar profile");
    scaled->alias("t4");
    std::string s_kind = "gaussian";
    double s_xi = 1.0, s_c = 1.0, s_r = 0.5, s_p = 1.0;
    scaled->add_option("--kind", s_kind)->check(CLI::IsMember({"constant", "gaussian", "geometric", "power"}));
    scaled->add_option("--xi", s_xi);
    scaled->add_option("--c", s_c);
    scaled->add_option("--r", s_r);
    scaled->add_option("--p", s_p);
    scaled->add_option("--n", c_n)->required();
    scaled->add_option("--d", c_d);
    scaled->add_option("--count", c_count, "truncation N (default n)");
    scaled->add_option("--out", c_out)->required();

    auto* repetition = construct->add_subcommand("repetition", "orthonormal basis with repeated members");
    std::vector<std::string> r_repeat;
    repetition->add_option("--n", c_n)->required();
    repetition->add_option("--d", c_d);
    repetition->add_option("--repeat", r_repeat, "index:count with 1-based index")->take_all();
    repetition->add_option("--out", c_out)->required();

    auto* unweavable = construct->add_subcommand("unweavable", "two compact-tight frames that cannot be woven");
    unweavable->alias("t49");
    std::string u_p1, u_p2;
    unweavable->add_option("--n", c_n)->required();
    unweavable->add_option("--d", c_d);
    unweavable->add_option("--profile1", u_p1)->required();
    unweavable->add_option("--profile2", u_p2)->required();
    unweavable->add_option("--out", c_out, "output base name")->required();

    // perturb
    auto* perturb = app.add_subcommand("perturb", "perturbation distance and predicted bounds");
    std::string p_f, p_g;
    PerturbOptions p_opt;
    perturb->add_option("fileF", p_f)->required();
    perturb->add_option("fileG", p_g)->required();
    perturb->add_option("--xi", p_opt.xi);
    perturb->add_option("--eta", p_opt.eta);
    perturb->add_option("--tol", tol);
    add_format(perturb);

    // weave
    auto* weave = app.add_subcommand("weave", "exhaustive universal weaving bounds");
    std::vector<std::string> w_files;
    std::uint64_t w_cap = kDefaultMaxPartitions;
    std::string w_sweep, w_partition;
    weave->add_option("files", w_files)->required()->expected(2, 4);
    weave->add_option("--max-partitions", w_cap);
    weave->add_option("--sweep", w_sweep, "comma-separated N list for the decay table");
    weave->add_option("--partition", w_partition, "partition file to evaluate");
    weave->add_option("--tol", tol);
    add_format(weave);

    // dual
    auto* dual = app.add_subcommand("dual", "canonical dual frame");
    std::string d_file, d_out;
    dual->add_option("file", d_file)->required();
    dual->add_option("--out", d_out)->required();
    dual->add_option("--tol", tol);

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("cstar-frames");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kFlags;
    }

    try {
        if (*analyze) {
            const io::FrameFile file = io::load_frame(a_file);
            AnalyzeOptions opt{a_xi, a_eta, a_alpha, tol};
            detail::emit(analyze_report(file, opt), format, out);
            return kOk;
        }

        if (*construct) {
            try {
                if (*scaled) {
                    const ScalarProfile profile = ScalarProfile::make(parse_profile_kind(s_kind), s_xi,
                                                                      s_kind == "constant" ? 0.0 : s_c, s_r, s_p);
                    const auto built = scaled_basis_frame(profile, ModuleShape(c_d, c_n), c_count.value_or(c_n));
                    io::write_text(c_out, io::serialize_frame(built.frame, built.cert));
                    out << "wrote " << c_out << '\n';
                } else if (*repetition) {
                    std::map<std::size_t, std::size_t> mult;
                    for (const auto& spec : r_repeat) {
                        const auto colon = spec.find(':');
                        if (colon == std::string::npos) throw detail::FlagError("--repeat expects index:count");
                        const long idx = std::stol(spec.substr(0, colon));
                        const long cnt = std::stol(spec.substr(colon + 1));
                        if (idx < 1 || cnt < 0) throw detail::FlagError("--repeat " + spec + " out of range");
                        mult[static_cast<std::size_t>(idx - 1)] = static_cast<std::size_t>(cnt);
                    }
                    const auto built = repetition_frame(ModuleShape(c_d, c_n), mult);
                    io::write_text(c_out, io::serialize_frame(built.frame, built.cert));
                    out << "wrote " << c_out << '\n';
                } else if (*unweavable) {
                    const auto sc = unweavable_scenario(c_n, detail::parse_profile_spec(u_p1),
                                                        detail::parse_profile_spec(u_p2), c_d);
                    const std::string base = detail::output_base(c_out);
                    io::write_text(base + "_F.json", io::serialize_frame(sc.f, sc.cert_f));
                    io::write_text(base + "_G.json", io::serialize_frame(sc.g, sc.cert_g));
                    io::write_text(base + "_partition.json", io::serialize_partition(sc.adversarial, sc.sigma));
                    out << "wrote " << base << "_F.json " << base << "_G.json " << base << "_partition.json\n";
                }
            } catch (const Error& e) {
                err << "error: " << e.what() << '\n';
                return kFlags;
            } catch (const std::logic_error& e) {  // stol / stod
                err << "error: invalid number: " << e.what() << '\n';
                return kFlags;
            } catch (const detail::FlagError& e) {
                err << "error: " << e.what() << '\n';
                return kFlags;
            }
            return kOk;
        }

        if (*perturb) {
            p_opt.tol = tol;
            const io::FrameFile ff = io::load_frame(p_f);
            const io::FrameFile gf = io::load_frame(p_g);
            detail::emit(perturb_report(ff, gf, p_opt), format, out);
            return kOk;
        }

        if (*weave) {
            const auto t0 = std::chrono::steady_clock::now();
            std::vector<io::FrameFile> files;
            std::vector<FrameSystem> families;
            for (const auto& f : w_files) {
                files.push_back(io::load_frame(f));
                families.push_back(files.back().frame);
            }
            const WeavingReport wr = universal_bounds(families, tol, w_cap);
            json report = {{"universalLower", wr.universal_lower},
                           {"universalUpper", wr.universal_upper},
                           {"worstPartition", wr.worst_partition.assignment},
                           {"isWoven", wr.is_woven},
                           {"partitionsChecked", wr.partitions_checked},
                           {"tol", tol}};
            if (!w_partition.empty()) {
                const Partition part = io::parse_partition(io::read_text(w_partition));
                const SpectralResult spec = hermitian_eigen(weaving_operator(families, part).mat());
                report["partition"] = {{"assignment", part.assignment},
                                       {"lower", std::max(spec.min(), 0.0)},
                                       {"upper", spec.max()}};
            }
            if (!w_sweep.empty()) {
                if (files.size() < 2 || !files[0].cert || !files[1].cert || !files[0].cert->profile ||
                    !files[1].cert->profile)
                    throw detail::FlagError("--sweep needs two files with profile certificates");
                std::vector<std::size_t> sizes;
                std::stringstream ss(w_sweep);
                for (std::string item; std::getline(ss, item, ',');) sizes.push_back(std::stoul(item));
                const ScalarProfile p1 = files[0].cert->profile->shifted(0.0);
                const ScalarProfile p2 = files[1].cert->profile->shifted(0.0);
                json rows = json::array();
                for (const DecayRow& row : decay_study(sizes, p1, p2, families[0].shape().d))
                    rows.push_back({{"N", row.n},
                                    {"lambdaMin", row.lambda_min},
                                    {"envelope", row.envelope},
                                    {"identityResidual", row.k_identity_residual},
                                    {"woven", row.lambda_min > tol}});
                report["decay"] = std::move(rows);
            }
            report["timing"] = {{"seconds", detail::elapsed(t0)}};
            detail::emit(report, format, out);
            return kOk;
        }

        if (*dual) {
            const io::FrameFile file = io::load_frame(d_file);
            const FrameSystem dual_frame_sys = dual_frame(file.frame, tol);
            std::optional<CompactTightCert> dual_cert;
            if (file.cert) {
                const CompactTightCert& c = *file.cert;
                const DualDecomposition dd = dual_decomposition(c.xi, c.k, file.frame.frame_operator(), tol);
                std::optional<ScalarProfile> profile;
                if (c.profile) profile = c.profile->reciprocal_profile();
                dual_cert = CompactTightCert{dd.xi_inverse, profile, c.permutation, dd.t};
            }
            io::write_text(d_out, io::serialize_frame(dual_frame_sys, dual_cert));
            out << "wrote " << d_out << '\n';
            return kOk;
        }
    } catch (const io::ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const io::DimensionError& e) {
        err << "dimension mismatch: " << e.what() << '\n';
        return kShape;
    } catch (const detail::FlagError& e) {
        err << "error: " << e.what() << '\n';
        return kFlags;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.code()) {
        case ErrorCode::ShapeMismatch:
        case ErrorCode::LengthMismatch: return kShape;
        case ErrorCode::TooManyPartitions: return kCap;
        case ErrorCode::NotAFrame:
        case ErrorCode::Singular:
        case ErrorCode::SingularS: return kNotAFrame;
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidProfile:
        case ErrorCode::NegativeEta:
        case ErrorCode::NegativeMu: return kFlags;
        default: return kFailure;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}

} // namespace cstar_frames::cli
