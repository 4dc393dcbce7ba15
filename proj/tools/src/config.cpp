#include <fiber/cli/config.hpp>
#include <fiber/cli/io.hpp>

#include <set>
#include <sstream>

namespace fiber::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& path, const std::string& why)
{
    throw InvalidConfiguration("config key '" + path + "': " + why);
}

void allow_only(const json& obj, const std::string& path, std::initializer_list<const char*> keys)
{
    if (!obj.is_object())
        bad_key(path, "expected an object");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& item : obj.items())
        if (!ok.count(item.key()))
            bad_key(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
}

std::string join(const std::string& path, const char* key)
{
    return path.empty() ? std::string(key) : path + "." + key;
}

template <class T>
void read(const json& obj, const std::string& path, const char* key, T& out)
{
    if (!obj.contains(key))
        return;
    const json& v = obj.at(key);
    if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number())
            bad_key(join(path, key), "expected a number");
    } else if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer())
            bad_key(join(path, key), "expected an integer");
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean())
            bad_key(join(path, key), "expected true or false");
    } else {
        if (!v.is_string())
            bad_key(join(path, key), "expected a string");
    }
    out = v.get<T>();
}

template <class Parse>
auto read_enum(const json& obj, const std::string& path, const char* key, Parse parse, decltype(parse("")) fallback)
{
    std::string text;
    if (!obj.contains(key))
        return fallback;
    read(obj, path, key, text);
    try {
        return parse(text);
    } catch (const InvalidConfiguration& e) {
        bad_key(join(path, key), e.what());
    }
}

Vector read_vector(const json& v, const std::string& path)
{
    if (!v.is_array())
        bad_key(path, "expected an array of numbers");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            bad_key(path, "expected an array of numbers");
        out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
}

RankPolicy parse_rank_policy(const std::string& s)
{
    if (s == "strict")
        return RankPolicy::Strict;
    if (s == "dropDependent")
        return RankPolicy::DropDependent;
    throw InvalidConfiguration("unknown rank policy '" + s + "'");
}

std::string rank_policy_name(RankPolicy p)
{
    return p == RankPolicy::Strict ? "strict" : "dropDependent";
}

json vector_json(const Vector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

json force_json(const ForceField& force)
{
    json out;
    out["kind"] = force_name(force);
    if (const auto* c = std::get_if<CombinedForce>(&force))
        out["params"] = {{"omega", c->omega}};
    if (const auto* t = std::get_if<TabulatedForce>(&force)) {
        json values = json::array();
        for (const auto& v : t->values)
            values.push_back(vector_json(v));
        out["params"] = {{"positions", t->positions}, {"values", values}};
    }
    return out;
}

} // namespace

ForceField parse_force(const json& doc, const ModelParams& params)
{
    allow_only(doc, "force", {"kind", "params"});
    std::string kind = "zero";
    read(doc, "force", "kind", kind);
    const json params_doc = doc.contains("params") ? doc.at("params") : json::object();
    if (kind == "zero" || kind == "caseA" || kind == "caseB") {
        allow_only(params_doc, "force.params", {});
        if (kind == "caseA")
            return CaseAForce{};
        if (kind == "caseB")
            return CaseBForce{};
        return ZeroForce{};
    }
    if (kind == "combined") {
        allow_only(params_doc, "force.params", {"omega"});
        CombinedForce f{params.omega};
        read(params_doc, "force.params", "omega", f.omega);
        return f;
    }
    if (kind == "tabulated") {
        allow_only(params_doc, "force.params", {"positions", "values"});
        if (!params_doc.contains("positions") || !params_doc.contains("values"))
            bad_key("force.params", "tabulated force needs positions and values");
        TabulatedForce f;
        const Vector pos = read_vector(params_doc.at("positions"), "force.params.positions");
        f.positions.assign(pos.data(), pos.data() + pos.size());
        const json& vals = params_doc.at("values");
        if (!vals.is_array() || vals.size() != f.positions.size())
            bad_key("force.params.values", "expected one vector per position");
        for (const auto& v : vals) {
            f.values.push_back(read_vector(v, "force.params.values"));
            if (f.values.back().size() != params.dim)
                bad_key("force.params.values", "vector length must equal model.dim");
        }
        for (std::size_t i = 1; i < f.positions.size(); ++i)
            if (!(f.positions[i] > f.positions[i - 1]))
                bad_key("force.params.positions", "positions must increase");
        if (f.positions.empty())
            bad_key("force.params.positions", "needs at least one sample");
        return f;
    }
    bad_key("force.kind", "unknown force '" + kind + "'");
}

RunConfig parse_config(const json& doc)
{
    allow_only(doc, "", {"model", "grid", "time", "force", "constraints", "optimizer", "study"});
    RunConfig cfg;
    Scenario& sc = cfg.scenario;
    const json empty = json::object();
    auto section = [&](const char* key) -> const json& { return doc.contains(key) ? doc.at(key) : empty; };

    const json& model = section("model");
    allow_only(model, "model", {"omega", "bend", "l", "T", "dim", "gravityDir"});
    read(model, "model", "omega", sc.params.omega);
    read(model, "model", "bend", sc.params.bend);
    read(model, "model", "l", sc.params.length);
    read(model, "model", "T", sc.params.end_time);
    read(model, "model", "dim", sc.params.dim);
    if (model.contains("gravityDir"))
        sc.params.gravity_dir = read_vector(model.at("gravityDir"), "model.gravityDir");

    const json& grid = section("grid");
    allow_only(grid, "grid", {"M"});
    read(grid, "grid", "M", sc.node_count);

    const json& time = section("time");
    allow_only(time, "time", {"tau"});
    read(time, "time", "tau", sc.tau);

    const json& cons = section("constraints");
    allow_only(cons, "constraints", {"density"});
    sc.density = read_enum(cons, "constraints", "density", parse_density, sc.density);

    OptimizerConfig& oc = sc.config;
    const json& opt = section("optimizer");
    allow_only(opt, "optimizer",
               {"tolA", "tolR", "maxIter", "sigma0", "beta", "c", "sigmaMin", "projection", "gradientMetric",
                "stationarityNorm", "start", "rankPolicy", "rankTolerance"});
    read(opt, "optimizer", "tolA", oc.tol_a);
    read(opt, "optimizer", "tolR", oc.tol_r);
    read(opt, "optimizer", "maxIter", oc.max_iter);
    read(opt, "optimizer", "sigma0", oc.sigma0);
    read(opt, "optimizer", "beta", oc.beta);
    read(opt, "optimizer", "c", oc.armijo_c);
    read(opt, "optimizer", "sigmaMin", oc.sigma_min);
    read(opt, "optimizer", "rankTolerance", oc.rank_tolerance);
    oc.projection = read_enum(opt, "optimizer", "projection", parse_metric, oc.projection);
    oc.gradient_metric = read_enum(opt, "optimizer", "gradientMetric", parse_metric, oc.gradient_metric);
    oc.stationarity_norm = read_enum(opt, "optimizer", "stationarityNorm", parse_metric, oc.stationarity_norm);
    oc.start = read_enum(opt, "optimizer", "start", parse_start_guess, oc.start);
    oc.rank_policy = read_enum(opt, "optimizer", "rankPolicy", parse_rank_policy, oc.rank_policy);

    sc.force = parse_force(section("force"), sc.params);

    StudySection& st = cfg.study;
    const json& study = section("study");
    allow_only(study, "study",
               {"cases", "density", "densities", "tStar", "firstIndex", "lastIndex", "referenceIndex", "baseTau",
                "timing", "threads"});
    if (study.contains("cases")) {
        const json& c = study.at("cases");
        if (!c.is_array() || c.empty())
            bad_key("study.cases", "expected a non-empty array");
        st.cases.clear();
        for (const auto& v : c) {
            if (!v.is_string() || (v != "caseA" && v != "caseB"))
                bad_key("study.cases", "entries must be \"caseA\" or \"caseB\"");
            st.cases.push_back(v.get<std::string>());
        }
    }
    st.density = read_enum(study, "study", "density", parse_density, st.density);
    if (study.contains("densities")) {
        const json& d = study.at("densities");
        if (!d.is_array() || d.empty())
            bad_key("study.densities", "expected a non-empty array");
        st.densities.clear();
        for (const auto& v : d) {
            if (!v.is_string())
                bad_key("study.densities", "expected density names");
            try {
                st.densities.push_back(parse_density(v.get<std::string>()));
            } catch (const InvalidConfiguration& e) {
                bad_key("study.densities", e.what());
            }
        }
    }
    read(study, "study", "tStar", st.t_star);
    read(study, "study", "firstIndex", st.first_index);
    read(study, "study", "lastIndex", st.last_index);
    read(study, "study", "referenceIndex", st.reference_index);
    read(study, "study", "baseTau", st.base_tau);
    read(study, "study", "timing", st.timing);
    read(study, "study", "threads", st.threads);
    if (st.threads < 0)
        bad_key("study.threads", "must be non-negative");

    sc.params.validate();
    sc.config.validate();
    if (sc.node_count < 3)
        bad_key("grid.M", "needs at least 3 nodes");
    level_count(sc.params.end_time, sc.tau);
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    const std::string text = read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidConfiguration(path + ": malformed JSON: " + e.what());
    }
    return parse_config(doc);
}

json to_json(const RunConfig& config)
{
    const Scenario& sc = config.scenario;
    const OptimizerConfig& oc = sc.config;
    json out;
    out["model"] = {{"omega", sc.params.omega}, {"bend", sc.params.bend}, {"l", sc.params.length},
                    {"T", sc.params.end_time},  {"dim", sc.params.dim},   {"gravityDir", vector_json(sc.params.gravity())}};
    out["grid"] = {{"M", sc.node_count}};
    out["time"] = {{"tau", sc.tau}};
    out["force"] = force_json(sc.force);
    out["constraints"] = {{"density", to_string(sc.density)}};
    out["optimizer"] = {{"tolA", oc.tol_a},
                        {"tolR", oc.tol_r},
                        {"maxIter", oc.max_iter},
                        {"sigma0", oc.sigma0},
                        {"beta", oc.beta},
                        {"c", oc.armijo_c},
                        {"sigmaMin", oc.sigma_min},
                        {"projection", to_string(oc.projection)},
                        {"gradientMetric", to_string(oc.gradient_metric)},
                        {"stationarityNorm", to_string(oc.stationarity_norm)},
                        {"start", to_string(oc.start)},
                        {"rankPolicy", rank_policy_name(oc.rank_policy)},
                        {"rankTolerance", oc.rank_tolerance}};
    const StudySection& st = config.study;
    json dens = json::array();
    for (auto d : st.densities)
        dens.push_back(to_string(d));
    out["study"] = {{"cases", st.cases},
                    {"density", to_string(st.density)},
                    {"densities", dens},
                    {"tStar", st.t_star},
                    {"firstIndex", st.first_index},
                    {"lastIndex", st.last_index},
                    {"referenceIndex", st.reference_index},
                    {"baseTau", st.base_tau},
                    {"timing", st.timing},
                    {"threads", st.threads}};
    return out;
}

StudyOptions study_options(const RunConfig& config)
{
    StudyOptions o;
    o.params = config.scenario.params;
    o.t_star = config.study.t_star;
    o.first_index = config.study.first_index;
    o.last_index = config.study.last_index;
    o.reference_index = config.study.reference_index;
    o.base_tau = config.study.base_tau;
    o.node_count = config.scenario.node_count;
    o.config = config.scenario.config;
    o.record_timing = config.study.timing;
    o.threads = config.study.threads;
    return o;
}

BoundOptions bound_options(const RunConfig& config)
{
    BoundOptions o;
    o.params = config.scenario.params;
    o.tau = config.scenario.tau;
    o.node_count = config.scenario.node_count;
    o.config = config.scenario.config;
    o.densities = {ConstraintDensity::Nodal, ConstraintDensity::Half, ConstraintDensity::Third};
    o.record_timing = config.study.timing;
    o.threads = config.study.threads;
    return o;
}

} // namespace fiber::cli
