// linefib command-line front end: audits a closed-form vector field on R^3
// for the line-fibration and contact properties, classifies the rank of dV,
// runs the winding / kernel-flow checks, and recovers the rank-1 normal
// form. Every subcommand emits one JSON report with the resolved
// configuration embedded, so identical invocations reproduce identical
// bytes.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <linefib/linefib.hpp>
#include <linefib/report.hpp>

namespace {

using namespace linefib;

std::vector<std::string> split_top_level(const std::string& s) {
    std::vector<std::string> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        else if (s[i] == ')') --depth;
        else if (s[i] == ',' && depth == 0) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    parts.push_back(s.substr(start));
    return parts;
}

std::vector<double> parse_numbers(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const std::string& part : split_top_level(s)) {
        try {
            std::size_t used = 0;
            double v = std::stod(part, &used);
            while (used < part.size() && std::isspace(static_cast<unsigned char>(part[used])))
                ++used;
            if (used != part.size()) throw std::invalid_argument(part);
            out.push_back(v);
        } catch (const std::exception&) {
            throw Error(std::string("invalid ") + what + " component '" + part + "'");
        }
    }
    return out;
}

struct Options {
    std::string field_arg;
    bool normalize = false;
    std::string example;
    std::string box_arg = "-1,1";
    int grid = 5;
    unsigned seed = 42;
    std::string out;
    AuditTolerances tol{};

    std::string at_arg = "0,0,0";
    double eps = 0.1;
    int samples = 64;

    double tmax = 2.0;
    double step = 1e-3;

    double window = 2.0;
    int theta_samples = 129;
    std::string theta_arg;
};

struct ResolvedField {
    VectorFieldSpec spec;
    std::array<std::string, 3> components;
    bool normalize = false;
    std::optional<std::string> example;
    std::optional<std::string> theta;
};

ResolvedField resolve_field(const Options& opt) {
    ResolvedField rf;
    if (!opt.example.empty()) {
        const GalleryEntry& entry = find_example(opt.example);
        rf.spec = make_field(entry);
        rf.components = entry.components;
        rf.normalize = entry.normalize;
        rf.example = entry.name;
        rf.theta = entry.theta;
    } else if (!opt.field_arg.empty()) {
        auto parts = split_top_level(opt.field_arg);
        if (parts.size() != 3)
            throw Error("--field expects three comma-separated expressions, got " +
                        std::to_string(parts.size()));
        rf.spec = parse_field(parts[0], parts[1], parts[2], opt.normalize);
        rf.components = {parts[0], parts[1], parts[2]};
        rf.normalize = opt.normalize;
    } else {
        throw Error("no field given: use --field \"e1,e2,e3\" or --example NAME");
    }
    if (!opt.theta_arg.empty()) rf.theta = opt.theta_arg;
    return rf;
}

Box resolve_box(const Options& opt) {
    auto v = parse_numbers(opt.box_arg, "box");
    if (v.size() == 2) {
        if (!(v[0] < v[1])) throw Error("--box lo,hi requires lo < hi");
        return Box{Point3(v[0], v[0], v[0]), Point3(v[1], v[1], v[1])};
    }
    if (v.size() == 6) {
        Box b{Point3(v[0], v[2], v[4]), Point3(v[1], v[3], v[5])};
        for (int i = 0; i < 3; ++i)
            if (!(b.min(i) < b.max(i))) throw Error("--box requires min < max per axis");
        return b;
    }
    throw Error("--box expects 2 numbers (cube) or 6 numbers (x0,x1,y0,y1,z0,z1)");
}

Point3 resolve_at(const Options& opt) {
    auto v = parse_numbers(opt.at_arg, "--at");
    if (v.size() != 3) throw Error("--at expects three comma-separated coordinates");
    return Point3(v[0], v[1], v[2]);
}

json config_json(const std::string& subcommand, const Options& opt,
                 const ResolvedField* rf, const Box* box) {
    json field = nullptr;
    if (rf) {
        field = json{{"v1", rf->components[0]},
                     {"v2", rf->components[1]},
                     {"v3", rf->components[2]},
                     {"normalize", rf->normalize},
                     {"example", rf->example ? json(*rf->example) : json(nullptr)},
                     {"theta", rf->theta ? json(*rf->theta) : json(nullptr)}};
    }
    json cfg{{"subcommand", subcommand},
             {"field", field},
             {"box", box ? to_json(*box) : json(nullptr)},
             {"grid", opt.grid},
             {"seed", opt.seed},
             {"tolerances", to_json(opt.tol)}};
    if (subcommand == "winding")
        cfg["winding"] = json{{"at", opt.at_arg}, {"eps", opt.eps}, {"samples", opt.samples}};
    if (subcommand == "flow")
        cfg["flow"] = json{{"at", opt.at_arg}, {"t_max", opt.tmax}, {"step", opt.step}};
    if (subcommand == "standardize")
        cfg["standardize"] =
            json{{"window", opt.window}, {"theta_samples", opt.theta_samples}};
    return cfg;
}

json report_skeleton(const std::string& subcommand, const Options& opt,
                     const ResolvedField* rf, const Box* box) {
    return json{{"tool", "linefib"},
                {"version", kVersion},
                {"config", config_json(subcommand, opt, rf, box)}};
}

void emit(const json& report, const Options& opt) {
    std::string text = report.dump(2);
    text += '\n';
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(opt.out, std::ios::binary);
        if (!f) throw Error("cannot open output file '" + opt.out + "'");
        f << text;
    }
}

void add_common_options(CLI::App* cmd, Options& opt, bool wants_grid = true) {
    cmd->add_option("--field", opt.field_arg,
                    "three comma-separated component expressions, e.g. \"cos(z),-sin(z),0\"");
    cmd->add_flag("--normalize", opt.normalize, "divide the field by its norm pointwise");
    cmd->add_option("--example", opt.example, "use a built-in example field (see `examples`)");
    cmd->add_option("--out", opt.out, "write the JSON report to this file instead of stdout");
    cmd->add_option("--seed", opt.seed, "RNG seed for random-point suites");
    if (wants_grid) {
        cmd->add_option("--box", opt.box_arg, "audit box: lo,hi (cube) or x0,x1,y0,y1,z0,z1");
        // the pairwise line scan is O(n^6) in the per-axis resolution; 16^3
        // samples is already ~8.4M pairs
        cmd->add_option("--grid", opt.grid, "grid resolution per axis")->check(CLI::Range(2, 16));
        cmd->add_option("--tol-unit", opt.tol.unit, "unit-length defect tolerance");
        cmd->add_option("--tol-straightness", opt.tol.straightness, "straightness tolerance");
        cmd->add_option("--tol-gap", opt.tol.intersection_gap, "intersection gap tolerance");
        cmd->add_option("--tol-angle", opt.tol.angle, "parallelism angle tolerance (rad)");
        cmd->add_option("--tol-contact", opt.tol.contact, "contact defect zero tolerance");
        cmd->add_option("--tol-rank", opt.tol.rank, "singular value rank tolerance");
    }
}

int run_grid_command(const std::string& name, const Options& opt) {
    ResolvedField rf = resolve_field(opt);
    Box box = resolve_box(opt);
    AuditReport audit = fibration_audit(rf.spec, box, opt.grid, opt.tol);
    json report = report_skeleton(name, opt, &rf, &box);
    report["audit"] = audit_block(audit);
    report["contact"] = contact_block(audit);
    if (name == "skew") {
        json pairs = json::array();
        for (const auto& pr : audit.parallel_pairs)
            pairs.push_back(json{{"i", pr.i}, {"j", pr.j}, {"angle", pr.angle}});
        report["skew"] = json{{"parallel_pairs", pairs}};
    }
    emit(report, opt);
    return 0;
}

int run_winding(const Options& opt) {
    ResolvedField rf = resolve_field(opt);
    Point3 at = resolve_at(opt);
    WindingResult w = winding_number(rf.spec, at, opt.eps, opt.samples);
    json report = report_skeleton("winding", opt, &rf, nullptr);
    report["lemma_checks"] =
        json{{"winding", json::array({winding_entry(at, opt.eps, w)})},
             {"flow", json::array()}};
    emit(report, opt);
    return w.degenerate ? 2 : 0;
}

int run_flow(const Options& opt) {
    ResolvedField rf = resolve_field(opt);
    Point3 at = resolve_at(opt);
    FlowCurve curve = flow_kernel_field(rf.spec, at, opt.tmax, opt.step);
    Vec3 v0 = evaluate(rf.spec, at);
    double constancy = constancy_along_flow(rf.spec, curve);
    double straightness = projected_straightness(curve, v0);
    json report = report_skeleton("flow", opt, &rf, nullptr);
    report["lemma_checks"] =
        json{{"winding", json::array()},
             {"flow", json::array({flow_entry(at, opt.tmax, curve, constancy, straightness)})}};
    emit(report, opt);
    return 0;
}

int run_standardize(const Options& opt) {
    ResolvedField rf = resolve_field(opt);
    Box box = resolve_box(opt);
    ClassifyOptions copts;
    copts.window = opt.window;
    copts.theta_samples = opt.theta_samples;
    copts.seed = opt.seed;
    if (rf.theta) copts.theta_closed_form = parse_expression(*rf.theta);
    ClassifyResult res = classify_field(rf.spec, box, opt.grid, opt.tol, copts);
    json report = report_skeleton("standardize", opt, &rf, &box);
    report["audit"] = audit_block(res.audit);
    report["contact"] = contact_block(res.audit);
    report["standardization"] = standardization_block(res);
    emit(report, opt);
    return 0;
}

int run_examples(const Options& opt) {
    json list = json::array();
    for (const auto& e : example_gallery())
        list.push_back(json{{"name", e.name},
                            {"field", {e.components[0], e.components[1], e.components[2]}},
                            {"normalize", e.normalize},
                            {"theta", e.theta ? json(*e.theta) : json(nullptr)},
                            {"description", e.description}});
    json report = report_skeleton("examples", opt, nullptr, nullptr);
    report["examples"] = list;
    emit(report, opt);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linefib: audits line fibrations of R^3 and the contact structures "
                 "they induce"};
    app.require_subcommand(1);

    Options opt;

    CLI::App* audit = app.add_subcommand("audit", "grid fibration audit of the field");
    add_common_options(audit, opt);
    CLI::App* contact = app.add_subcommand("contact", "contact defect statistics on the box");
    add_common_options(contact, opt);
    CLI::App* rank = app.add_subcommand("rank", "rank profile of dV on the box");
    add_common_options(rank, opt);
    CLI::App* skew = app.add_subcommand("skew", "parallel-pair scan of the sampled lines");
    add_common_options(skew, opt);

    CLI::App* winding = app.add_subcommand("winding", "winding of the projected field "
                                                      "around a base point");
    add_common_options(winding, opt, false);
    winding->add_option("--at", opt.at_arg, "base point x,y,z");
    winding->add_option("--eps", opt.eps, "circle radius")->check(CLI::PositiveNumber);
    winding->add_option("--samples", opt.samples, "initial circle samples")
        ->check(CLI::Range(16, 1 << 20));

    CLI::App* flow = app.add_subcommand("flow", "integrate the kernel line field from a "
                                                "base point");
    add_common_options(flow, opt, false);
    flow->add_option("--at", opt.at_arg, "base point x,y,z");
    flow->add_option("--tmax", opt.tmax, "integration half-interval")
        ->check(CLI::PositiveNumber);
    flow->add_option("--step", opt.step, "integration step")->check(CLI::PositiveNumber);

    CLI::App* standardize = app.add_subcommand("standardize", "full classification "
                                                              "pipeline with normal-form "
                                                              "recovery");
    add_common_options(standardize, opt);
    standardize->add_option("--window", opt.window, "theta recovery half-width")
        ->check(CLI::PositiveNumber);
    standardize->add_option("--theta-samples", opt.theta_samples, "theta grid samples")
        ->check(CLI::Range(5, 100000));
    standardize->add_option("--theta", opt.theta_arg,
                            "closed-form theta(z) used for the pullback check");

    CLI::App* examples = app.add_subcommand("examples", "list the built-in example fields");
    examples->add_option("--out", opt.out, "write the JSON report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (audit->parsed()) return run_grid_command("audit", opt);
        if (contact->parsed()) return run_grid_command("contact", opt);
        if (rank->parsed()) return run_grid_command("rank", opt);
        if (skew->parsed()) return run_grid_command("skew", opt);
        if (winding->parsed()) return run_winding(opt);
        if (flow->parsed()) return run_flow(opt);
        if (standardize->parsed()) return run_standardize(opt);
        if (examples->parsed()) return run_examples(opt);
    } catch (const ParseError& e) {
        std::cerr << "linefib: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "linefib: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "linefib: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "linefib: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
