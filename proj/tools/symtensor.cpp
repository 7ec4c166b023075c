#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symtensor/cones.hpp"
#include "symtensor/decomposition.hpp"
#include "symtensor/examples.hpp"
#include "symtensor/io.hpp"
#include "symtensor/spectral.hpp"

namespace
{

using namespace symtensor;
using io::json;

enum Exit : int
{
    exit_in = 0,
    exit_out = 1,
    exit_inconclusive = 2,
    exit_input_error = 3
};

int exit_for(Membership m)
{
    switch (m)
    {
    case Membership::in: return exit_in;
    case Membership::out: return exit_out;
    case Membership::inconclusive: return exit_inconclusive;
    }
    return exit_inconclusive;
}

int exit_for(ProbeStatus s)
{
    switch (s)
    {
    case ProbeStatus::positive: return exit_in;
    case ProbeStatus::negative_witness: return exit_out;
    case ProbeStatus::zero_boundary: return exit_inconclusive;
    }
    return exit_inconclusive;
}

struct Settings
{
    std::vector<std::string> inputs;
    std::string target;
    std::uint64_t seed = 0;
    std::optional<double> tol;
    int restarts = 0;
    std::string out;
    std::string format = "json";
    std::string point;
    int q = 0;
    int p = 0;
    int order = 0;
    int dim = 0;
    int samples = 100;
    std::string example;
};

/// Flat text rendering: one "key: value" line per scalar leaf, arrays inline.
void render_text(std::ostream& os, const json& j, const std::string& prefix)
{
    if (j.is_object())
    {
        for (auto it = j.begin(); it != j.end(); ++it)
        {
            render_text(os, it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
        }
        return;
    }
    if (j.is_array() && !std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); }) &&
        !std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_array(); }))
    {
        for (std::size_t i = 0; i < j.size(); ++i)
        {
            render_text(os, j[i], prefix + "[" + std::to_string(i) + "]");
        }
        return;
    }
    std::string text = io::dump(j, 0);
    if (text.size() > 160)
    {
        text = text.substr(0, 157) + "...";
    }
    os << prefix << ": " << text << '\n';
}

void emit(const Settings& s, const json& report)
{
    std::string text;
    if (s.format == "text")
    {
        std::ostringstream os;
        render_text(os, report, "");
        text = os.str();
    }
    else
    {
        text = io::dump(report);
    }
    if (s.out.empty())
    {
        std::cout << text;
    }
    else
    {
        io::write_file(s.out, text);
    }
}

const std::string& single_input(const Settings& s)
{
    if (s.inputs.size() != 1)
    {
        throw io::input_error("expected exactly one --input, got " + std::to_string(s.inputs.size()));
    }
    return s.inputs.front();
}

Vector parse_point(const std::string& text)
{
    std::vector<double> xs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        try
        {
            std::size_t used = 0;
            xs.push_back(std::stod(item, &used));
            if (used != item.size())
            {
                throw std::invalid_argument(item);
            }
        }
        catch (const std::exception&)
        {
            throw io::input_error("field '--x' has a non-numeric component '" + item + "'");
        }
    }
    return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

SearchOptions search(const Settings& s) { return {s.restarts, s.seed, 5000, 1e-10}; }

ConeOptions cone_options(const Settings& s)
{
    ConeOptions c;
    c.tol = s.tol.value_or(1e-8);
    c.seed = s.seed;
    return c;
}

int run_eval(const Settings& s)
{
    const SymmetricTensor a = io::any_tensor(io::read_json(single_input(s)), s.order);
    const Vector x = s.point.empty() ? Vector::Zero(a.dim()) : parse_point(s.point);
    if (x.size() != a.dim())
    {
        throw io::input_error("field '--x' has " + std::to_string(x.size()) +
                              " components, tensor dim is " + std::to_string(a.dim()));
    }
    emit(s, {{"verb", "eval"}, {"x", io::to_json(x)}, {"value", eval(a, x)},
             {"gradient", io::to_json(grad(a, x))}});
    return exit_in;
}

int run_hankel_build(const Settings& s)
{
    const json in = io::read_json(single_input(s));
    const auto kind = io::classify(in);
    if (kind != io::InputKind::generating && kind != io::InputKind::vandermonde)
    {
        throw io::input_error("hankel-build needs a generating vector ('h') or nodes/weights input");
    }
    emit(s, io::to_json(io::any_tensor(in)));
    return exit_in;
}

GeneratingVector generating_input(const json& in)
{
    switch (io::classify(in))
    {
    case io::InputKind::generating: return io::generating_from_json(in);
    case io::InputKind::vandermonde: return io::vandermonde_from_json(in).generating();
    case io::InputKind::tensor:
        try
        {
            return generating_from_hankel(io::tensor_from_json(in));
        }
        catch (const not_hankel& e)
        {
            throw io::input_error(std::string("field 'entries': ") + e.what());
        }
    case io::InputKind::decomposition: break;
    }
    throw io::input_error("input must be a Hankel tensor, a generating vector or nodes/weights");
}

int run_prony(const Settings& s)
{
    const GeneratingVector h = generating_input(io::read_json(single_input(s)));
    const PronyResult r = prony_decompose(h, s.tol.value_or(1e-10));
    json rep = io::to_json(r);
    emit(s, rep);
    return r.ok() ? exit_in : exit_inconclusive;
}

int run_inherit(const Settings& s)
{
    const GeneratingVector h = generating_input(io::read_json(single_input(s)));
    try
    {
        emit(s, io::to_json(inherit_reshape(h, s.q, s.p)));
    }
    catch (const std::invalid_argument& e)
    {
        throw io::input_error(std::string("fields '--q'/'--p': ") + e.what());
    }
    return exit_in;
}

int run_hadamard(const Settings& s)
{
    if (s.inputs.size() != 2)
    {
        throw io::input_error("hadamard needs two --input files");
    }
    const json a = io::read_json(s.inputs[0]);
    const json b = io::read_json(s.inputs[1]);
    json rep;
    if (io::classify(a) == io::InputKind::decomposition &&
        io::classify(b) == io::InputKind::decomposition)
    {
        const int m = s.order != 0 ? s.order : (a.contains("order") ? a.at("order").get<int>() : 0);
        if (m == 0)
        {
            throw io::input_error("field 'order' (or --order) is required for decomposition inputs");
        }
        const auto da = io::decomposition_from_json(a);
        const auto db = io::decomposition_from_json(b);
        const auto prod = schur_decomposed(da, db);
        rep["tensor"] = io::to_json(hadamard(from_weighted_powers(da, m), from_weighted_powers(db, m)));
        rep["decomposition"] = io::to_json(prod);
        rep["spans"] = spans(prod);
    }
    else
    {
        rep["tensor"] = io::to_json(hadamard(io::any_tensor(a, s.order), io::any_tensor(b, s.order)));
    }
    emit(s, rep);
    return exit_in;
}

int run_check(const Settings& s)
{
    const json in = io::read_json(single_input(s));
    const std::string& t = s.target;
    if (t == "cp-witness")
    {
        if (io::classify(in) != io::InputKind::decomposition)
        {
            throw io::input_error("cp-witness needs a decomposition input ('vectors')");
        }
        const auto r = check_cp_witness(io::decomposition_from_json(in));
        emit(s, io::to_json(r));
        return exit_for(r.status);
    }
    if (t == "cd-hankel")
    {
        const auto r = check_cd_hankel(generating_input(in), cone_options(s));
        emit(s, io::to_json(r));
        return exit_for(r.status);
    }
    const SymmetricTensor a = io::any_tensor(in, s.order);
    if (t == "pd-probe" || t == "cop-probe")
    {
        const auto r = t == "pd-probe" ? numeric_pd_check(a, search(s)) : copositive_min(a, search(s));
        emit(s, io::to_json(r, t));
        return exit_for(r.status);
    }
    MembershipReport r;
    if (t == "sos") r = check_sos(a, cone_options(s));
    else if (t == "ssos") r = check_ssos(a, cone_options(s));
    else if (t == "sos-star") r = check_sos_star(a, cone_options(s));
    else throw io::input_error("unknown --target '" + t + "'");
    emit(s, io::to_json(r));
    return exit_for(r.status);
}

int run_harness(const Settings& s)
{
    const int m = s.order != 0 ? s.order : 4;
    const int n = s.dim != 0 ? s.dim : 3;
    const auto rep = cone_chain_harness(m, n, s.samples, s.seed, s.tol.value_or(1e-8));
    emit(s, io::to_json(rep));
    return rep.violations.empty() ? exit_in : exit_out;
}

/// One pipeline step compared with the published claim.
json step(const std::string& name, const std::string& claim, const std::string& observed,
          bool agrees, json detail)
{
    return {{"step", name}, {"claim", claim}, {"observed", observed}, {"agrees", agrees},
            {"detail", std::move(detail)}};
}

int run_reproduce(const Settings& s)
{
    const bool not_cd = s.example == "hankel-not-cd";
    if (!not_cd && s.example != "hankel-not-sos")
    {
        throw io::input_error("unknown example '" + s.example +
                              "' (expected hankel-not-cd or hankel-not-sos)");
    }
    const VandermondeDecomposition v =
        not_cd ? examples::hankel_not_cd() : examples::hankel_quartic_four();
    const SymmetricTensor a = build_from_vandermonde(v);
    const SearchOptions so{s.restarts != 0 ? s.restarts : 16, s.seed, 5000, 1e-10};
    json steps = json::array();

    if (not_cd)
    {
        const auto pair = min_h_eigenvalue(a, so);
        steps.push_back(step("min_h_eigenvalue", "approximately 0.9956",
                             std::to_string(pair.lambda), std::abs(pair.lambda - 0.9956) <= 1e-3,
                             {{"lambda", pair.lambda}, {"x", io::to_json(pair.x)},
                              {"kkt_residual", pair.kkt_residual}}));
    }
    const auto pd = numeric_pd_check(a, so);
    steps.push_back(step("pd_probe", "PD", to_string(pd.status),
                         pd.status == ProbeStatus::positive, io::to_json(pd, "pd-probe")));
    const auto sos = check_sos(a, cone_options(s));
    steps.push_back(step("check_sos", not_cd ? "In" : "Out", to_string(sos.status),
                         sos.status == (not_cd ? Membership::in : Membership::out),
                         io::to_json(sos)));
    const auto cd = check_cd_hankel(v.generating(), cone_options(s));
    steps.push_back(step("check_cd_hankel", "Out", to_string(cd.status),
                         cd.status == Membership::out, io::to_json(cd)));
    const auto pr = prony_decompose(v.generating());
    steps.push_back(step("prony_decompose", "recovers the defining nodes and weights",
                         to_string(pr.status),
                         pr.ok() && pr.decomposition.nodes.size() == v.nodes.size(),
                         io::to_json(pr)));

    bool all = true;
    for (const auto& st : steps)
    {
        all = all && st.at("agrees").get<bool>();
    }
    json rep = {{"example", s.example},
                {"status", all ? "reproduced" : "contradicted"},
                {"input", io::to_json(v)},
                {"steps", steps}};
    emit(s, rep);
    return all ? exit_in : exit_out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Symmetric tensor cone checks and certificates"};
    app.require_subcommand(1, 1);
    Settings s;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", s.out, "Write the report to this file");
        sub->add_option("--format", s.format, "Report format")->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--seed", s.seed, "Random seed");
        sub->add_option("--tol", s.tol, "Relative tolerance (default 1e-8; prony 1e-10)");
        sub->add_option("--restarts", s.restarts, "Multi-start count (0 = 8 n)");
    };
    auto with_input = [&](CLI::App* sub) {
        sub->add_option("--input", s.inputs, "Input JSON file")->required();
        sub->add_option("--order", s.order, "Order for decomposition inputs without one");
        common(sub);
    };

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate A x^m and A x^{m-1}");
    with_input(eval_cmd);
    eval_cmd->add_option("--x", s.point, "Point as comma-separated values (default 0)");

    with_input(app.add_subcommand("hankel-build", "Hankel tensor from h or nodes/weights"));
    with_input(app.add_subcommand("prony", "Vandermonde decomposition of a Hankel tensor"));

    auto* inherit_cmd = app.add_subcommand("inherit", "Reshape a generating vector to S_{qm,p}");
    with_input(inherit_cmd);
    inherit_cmd->add_option("--q", s.q)->required();
    inherit_cmd->add_option("--p", s.p)->required();

    with_input(app.add_subcommand("hadamard", "Entrywise product of two tensors"));

    auto* check_cmd = app.add_subcommand("check", "Cone membership check");
    with_input(check_cmd);
    check_cmd->add_option("--target", s.target)
        ->required()
        ->check(CLI::IsMember(
            {"sos", "ssos", "sos-star", "pd-probe", "cop-probe", "cd-hankel", "cp-witness"}));

    auto* harness_cmd = app.add_subcommand("harness", "Seeded cone-chain and duality sampling");
    common(harness_cmd);
    harness_cmd->add_option("--order", s.order);
    harness_cmd->add_option("--dim", s.dim);
    harness_cmd->add_option("--samples", s.samples);

    auto* reproduce_cmd = app.add_subcommand("reproduce", "Run a built-in example end to end");
    common(reproduce_cmd);
    reproduce_cmd->add_option("example", s.example, "hankel-not-cd | hankel-not-sos")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_input_error;
    }

    const std::string verb = app.get_subcommands().front()->get_name();
    try
    {
        if (verb == "eval") return run_eval(s);
        if (verb == "hankel-build") return run_hankel_build(s);
        if (verb == "prony") return run_prony(s);
        if (verb == "inherit") return run_inherit(s);
        if (verb == "hadamard") return run_hadamard(s);
        if (verb == "check") return run_check(s);
        if (verb == "harness") return run_harness(s);
        return run_reproduce(s);
    }
    catch (const io::input_error& e)
    {
        std::cerr << "input error: " << e.what() << '\n';
        if (!s.out.empty())
        {
            io::write_file(s.out, io::dump({{"status", "input_error"}, {"error", e.what()}}));
        }
        return exit_input_error;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "input error: " << e.what() << '\n';
        if (!s.out.empty())
        {
            io::write_file(s.out, io::dump({{"status", "input_error"}, {"error", e.what()}}));
        }
        return exit_input_error;
    }
}
