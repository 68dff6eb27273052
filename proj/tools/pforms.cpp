#include "pf/equivalence.hpp"
#include "pf/polycone.hpp"
#include "pf/qform.hpp"
#include "pf/voronoi.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace pf;
using json = nlohmann::ordered_json;

namespace {

constexpr int kComplete = 0;
constexpr int kError = 1;
constexpr int kPartial = 2;

struct Options {
    std::string format = "table";

    std::size_t dim = 0;
    std::string statePath;
    bool noState = false;
    bool resume = false;
    std::size_t maxForms = 0;
    double wallClock = 0;
    std::size_t workers = 1;
    std::size_t recursionThreshold = 0;
    std::size_t plainThreshold = 0;
    bool noBank = false;
    bool fullAutOnFaces = false;
    bool months = false;
    std::string reportPath;

    std::string formFile;
    std::string formFile2;
    std::string coneFile;
    long facet = -1;
    long orbit = -1;
};

json matrixJson(const RationalMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(toString(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vectorJson(const std::vector<Integer>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(x.get_str());
    return out;
}

std::string matrixText(const RationalMatrix& m) {
    std::ostringstream s;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) s << (j ? " " : "") << toString(m(i, j));
        s << "\n";
    }
    return s.str();
}

VoronoiPolicy policyFrom(const Options& o) {
    VoronoiPolicy p;
    p.adm.recursionThreshold = o.recursionThreshold;
    p.adm.useBank = !o.noBank;
    p.adm.fullAutOnFaces = o.fullAutOnFaces;
    p.plainThreshold = o.plainThreshold;
    p.workers = o.workers;
    return p;
}

void emit(const Options& o, const json& j, const std::string& table) {
    if (o.format == "json")
        std::cout << j.dump(1) << "\n";
    else
        std::cout << table;
}

std::string defaultStatePath(std::size_t dim) {
    std::filesystem::path dir = ".";
    if (const char* env = std::getenv("VORONOI_STATE_DIR"); env && *env) dir = env;
    return (dir / ("classify-d" + std::to_string(dim) + ".json")).string();
}

int cmdClassify(const Options& o) {
    if (o.dim < 2) throw PreconditionError("--dim must be at least 2");
    if (o.dim >= 8 && !o.months)
        throw PreconditionError("dimension " + std::to_string(o.dim) +
                                " runs for months of CPU time; pass --i-know-this-takes-months to start it");
    const std::string path = o.statePath.empty() ? defaultStatePath(o.dim) : o.statePath;

    ClassificationState state;
    if (o.resume) {
        state = loadState(path);
        if (state.dim != o.dim)
            throw PreconditionError("state file " + path + " is for dimension " + std::to_string(state.dim));
    } else {
        state = initialState(o.dim);
    }

    ClassifyLimits limits;
    limits.maxForms = o.maxForms;
    limits.wallClock = o.wallClock;
    const auto start = std::chrono::steady_clock::now();
    auto checkpoint = [&](const ClassificationState& s) {
        if (!o.noState) saveState(s, path);
        std::cerr << "closed " << s.closed.size() << "/" << s.records.size() << " classes, " << s.open.size()
                  << " open\n";
    };
    if (!o.noState) saveState(state, path);
    const bool complete = advance(state, limits, policyFrom(o), checkpoint);
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::cerr << "elapsed " << elapsed.count() << " s" << (complete ? "" : ", stopped at a limit") << "\n";

    ClassificationReport report = buildReport(state);
    std::string text = o.format == "json" ? reportJson(report) : reportTable(report);
    if (!o.reportPath.empty()) {
        std::ofstream out(o.reportPath, std::ios::binary | std::ios::trunc);
        if (!out) throw PreconditionError("cannot write report file " + o.reportPath);
        out << text;
    } else {
        std::cout << text;
    }
    return complete ? kComplete : kPartial;
}

int cmdAnalyze(const Options& o) {
    QuadraticForm a = readFormFile(o.formFile);
    requirePositiveDefinite(a, "analyze");
    MinimalVectorSet m = arithmeticalMinimum(a);
    const bool perfect = isPerfect(a, m);
    EutaxyResult eu = eutaxy(a, m);
    FormAutomorphisms aut = autGroup(a, m);
    Rational det = determinant(a.gram());
    Rational hp = hermitePower(a, m.minimum);
    json j = {{"version", 1},
              {"dimension", a.dim()},
              {"minimum", toString(m.minimum)},
              {"kissingNumber", m.kissingNumber()},
              {"determinant", toString(det)},
              {"hermitePower", toString(hp)},
              {"perfect", perfect},
              {"eutactic", eu.eutactic},
              {"extreme", perfect && eu.eutactic},
              {"autOrder", aut.order.get_str()}};
    std::ostringstream t;
    t << "dimension      " << a.dim() << "\n"
      << "minimum        " << toString(m.minimum) << "\n"
      << "|Min|          " << m.kissingNumber() << "\n"
      << "determinant    " << toString(det) << "\n"
      << "gamma^d        " << toString(hp) << "\n"
      << "perfect        " << (perfect ? "yes" : "no") << "\n"
      << "eutactic       " << (eu.eutactic ? "yes" : "no") << "\n"
      << "extreme        " << (perfect && eu.eutactic ? "yes" : "no") << "\n"
      << "|Aut|          " << aut.order.get_str() << "\n";
    emit(o, j, t.str());
    return kComplete;
}

int cmdFacets(const Options& o) {
    QuadraticForm a = readFormFile(o.formFile);
    FacetOrbitData fo = facetOrbits(a, policyFrom(o));
    json orbits = json::array();
    std::ostringstream t;
    t << "rays " << fo.domain.rays.size() << ", facet orbits " << fo.orbits.size() << ", facets "
      << fo.facetCount().get_str() << "\n";
    for (std::size_t k = 0; k < fo.orbits.size(); ++k) {
        const auto& r = fo.orbits[k];
        orbits.push_back({{"size", r.orbitSize.get_str()},
                          {"incidence", r.representative.incidence},
                          {"functional", vectorJson(r.representative.functional)}});
        t << "orbit " << k << ": size " << r.orbitSize.get_str() << ", incidence " << r.incidence() << "\n";
    }
    json j = {{"version", 1},
              {"rays", fo.domain.rays.size()},
              {"orbitCount", fo.orbits.size()},
              {"facetCount", fo.facetCount().get_str()},
              {"orbits", std::move(orbits)}};
    emit(o, j, t.str());
    return kComplete;
}

int cmdFlip(const Options& o) {
    QuadraticForm a = readFormFile(o.formFile);
    requirePositiveDefinite(a, "flip");
    MinimalVectorSet m = arithmeticalMinimum(a);
    ConeV dom = perfectDomain(a, m);
    Face facet;
    if (o.orbit >= 0) {
        FacetOrbitData fo = facetOrbits(a, policyFrom(o));
        if (static_cast<std::size_t>(o.orbit) >= fo.orbits.size())
            throw PreconditionError("--orbit " + std::to_string(o.orbit) + " out of range (" +
                                    std::to_string(fo.orbits.size()) + " orbits)");
        facet = fo.orbits[o.orbit].representative;
    } else {
        std::vector<Face> all = facetsOf(dom);
        std::size_t k = o.facet < 0 ? 0 : static_cast<std::size_t>(o.facet);
        if (k >= all.size())
            throw PreconditionError("--facet " + std::to_string(k) + " out of range (" + std::to_string(all.size()) +
                                    " facets)");
        facet = all[k];
    }
    QuadraticForm b = flip(a, m, dom, facet);
    json j = {{"version", 1}, {"neighbour", matrixJson(b.gram())}, {"facet", vectorJson(facet.functional)}};
    emit(o, j, formatForm(b));
    return kComplete;
}

int cmdIsom(const Options& o) {
    QuadraticForm a = readFormFile(o.formFile);
    QuadraticForm b = readFormFile(o.formFile2);
    auto p = arithmeticEquivalence(a, b);
    json j = {{"version", 1}, {"equivalent", p.has_value()}};
    std::string t = "not equivalent\n";
    if (p) {
        j["transform"] = matrixJson(*p);
        t = "equivalent, B = P^T A P with P =\n" + matrixText(*p);
    }
    emit(o, j, t);
    return kComplete;
}

int cmdDualDesc(const Options& o) {
    ConeFile in = readConeFile(o.coneFile);
    ConeFile out;
    out.ambientDim = in.ambientDim;
    if (in.generators) {
        out.generators = false;
        out.vectors = dualDescription(ConeV(in.ambientDim, in.vectors)).facets;
    } else {
        out.generators = true;
        out.vectors = extremeRays(ConeH{in.ambientDim, in.vectors}).rays;
    }
    json vs = json::array();
    for (const auto& v : out.vectors) vs.push_back(vectorJson(v));
    json j = {{"version", 1}, {"kind", out.generators ? "V" : "H"}, {"ambientDim", out.ambientDim}, {"vectors", vs}};
    emit(o, j, formatConeFile(out));
    return kComplete;
}

int cmdAutgroup(const Options& o) {
    QuadraticForm a = readFormFile(o.formFile);
    FormAutomorphisms aut = autGroup(a);
    json gens = json::array();
    std::ostringstream t;
    t << "|Aut| " << aut.order.get_str() << "\n"
      << "action on Min/+-: " << aut.minAction.order().get_str() << " on " << aut.minimal.vectors.size()
      << " points\n";
    for (std::size_t k = 0; k < aut.generators.size(); ++k) {
        gens.push_back(matrixJson(aut.generators[k]));
        t << "generator " << k << ":\n" << matrixText(aut.generators[k]);
    }
    json j = {{"version", 1},
              {"order", aut.order.get_str()},
              {"minActionOrder", aut.minAction.order().get_str()},
              {"generators", std::move(gens)}};
    emit(o, j, t.str());
    return kComplete;
}

void addPolicyFlags(CLI::App* sub, Options& o) {
    sub->add_option("--recursion-threshold", o.recursionThreshold, "Faces with more rays recurse into ADM (0: 2m)");
    sub->add_option("--plain-threshold", o.plainThreshold, "Domains with at most this many rays skip ADM (0: 2m)");
    sub->add_flag("--no-bank", o.noBank, "Disable the face bank");
    sub->add_flag("--full-aut-on-faces", o.fullAutOnFaces, "Use the full face symmetry group");
}

void addFormat(CLI::App* sub, Options& o) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "table"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perfect quadratic forms by Voronoi's algorithm"};
    app.require_subcommand(1);
    Options o;

    auto* classify = app.add_subcommand("classify", "Enumerate perfect forms of a dimension");
    classify->add_option("--dim", o.dim, "Dimension")->required()->check(CLI::Range(2, 64));
    auto* state = classify->add_option("--state", o.statePath, "State file (default $VORONOI_STATE_DIR/classify-d<d>.json)");
    auto* noState = classify->add_flag("--no-state", o.noState, "Do not write a state file");
    auto* resume = classify->add_flag("--resume", o.resume, "Continue from the state file");
    noState->excludes(state)->excludes(resume);
    classify->add_option("--max-forms", o.maxForms, "Close at most this many forms in this run");
    classify->add_option("--wall-clock", o.wallClock, "Stop after this many seconds");
    classify->add_option("--workers", o.workers, "Flip worker threads")->check(CLI::PositiveNumber);
    classify->add_option("--report", o.reportPath, "Write the report here instead of stdout");
    classify->add_flag("--i-know-this-takes-months", o.months, "Allow dimension 8 and above");
    addPolicyFlags(classify, o);
    addFormat(classify, o);

    auto* analyze = app.add_subcommand("analyze", "Invariants of one form");
    analyze->add_option("form", o.formFile, "Form file")->required();
    addFormat(analyze, o);

    auto* facets = app.add_subcommand("facets", "Facet orbits of a perfect domain");
    facets->add_option("form", o.formFile, "Form file")->required();
    addPolicyFlags(facets, o);
    addFormat(facets, o);

    auto* flipCmd = app.add_subcommand("flip", "Neighbouring perfect form across a facet");
    flipCmd->add_option("form", o.formFile, "Form file")->required();
    auto* facetOpt = flipCmd->add_option("--facet", o.facet, "Index among all facets, sorted by functional");
    auto* orbitOpt = flipCmd->add_option("--orbit", o.orbit, "Facet orbit representative");
    facetOpt->excludes(orbitOpt);
    addPolicyFlags(flipCmd, o);
    addFormat(flipCmd, o);

    auto* isom = app.add_subcommand("isom", "Arithmetic equivalence of two forms");
    isom->add_option("a", o.formFile, "Form file A")->required();
    isom->add_option("b", o.formFile2, "Form file B")->required();
    addFormat(isom, o);

    auto* dual = app.add_subcommand("dual-desc", "Dual description of a cone file");
    dual->add_option("cone", o.coneFile, "Cone file")->required();
    addFormat(dual, o);

    auto* aut = app.add_subcommand("autgroup", "Automorphism group of a form");
    aut->add_option("form", o.formFile, "Form file")->required();
    addFormat(aut, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kComplete : kError;
    }

    try {
        if (*classify) return cmdClassify(o);
        if (*analyze) return cmdAnalyze(o);
        if (*facets) return cmdFacets(o);
        if (*flipCmd) return cmdFlip(o);
        if (*isom) return cmdIsom(o);
        if (*dual) return cmdDualDesc(o);
        if (*aut) return cmdAutgroup(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
