#ifndef SYMTENSOR_IO_HPP
#define SYMTENSOR_IO_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "symtensor/cones.hpp"
#include "symtensor/decomposition.hpp"
#include "symtensor/spectral.hpp"
#include "symtensor/tensor.hpp"

namespace symtensor::io
{

using json = nlohmann::ordered_json;

/// Malformed input; the message names the offending field.
class input_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

namespace detail
{

inline void write_number(std::ostream& os, double v)
{
    if (!std::isfinite(v))
    {
        os << "null";
        return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

inline void write(std::ostream& os, const json& j, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type())
    {
    case json::value_t::object:
    {
        if (j.empty())
        {
            os << "{}";
            return;
        }
        os << '{' << nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it)
        {
            if (!first)
            {
                os << ',' << nl;
            }
            first = false;
            os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
            write(os, it.value(), indent, depth + 1);
        }
        os << nl << close << '}';
        return;
    }
    case json::value_t::array:
    {
        if (j.empty())
        {
            os << "[]";
            return;
        }
        // arrays of scalars stay on one line
        const bool flat = std::all_of(j.begin(), j.end(),
                                      [](const json& e) { return e.is_primitive(); });
        os << '[';
        bool first = true;
        for (const auto& e : j)
        {
            if (!first)
            {
                os << (flat ? ", " : ",");
            }
            first = false;
            if (!flat)
            {
                os << nl << pad;
            }
            write(os, e, indent, depth + 1);
        }
        if (!flat)
        {
            os << nl << close;
        }
        os << ']';
        return;
    }
    case json::value_t::number_float:
        write_number(os, j.get<double>());
        return;
    default:
        os << j.dump();
        return;
    }
}

inline const json& field(const json& j, const char* name, const std::string& where)
{
    if (!j.is_object() || !j.contains(name))
    {
        throw input_error("missing field '" + where + name + "'");
    }
    return j.at(name);
}

inline int int_field(const json& j, const char* name, const std::string& where = "")
{
    const json& v = field(j, name, where);
    if (!v.is_number_integer())
    {
        throw input_error("field '" + where + name + "' must be an integer");
    }
    return v.get<int>();
}

inline double number(const json& v, const std::string& path)
{
    if (!v.is_number())
    {
        throw input_error("field '" + path + "' must be a number");
    }
    return v.get<double>();
}

inline Vector number_array(const json& v, const std::string& path)
{
    if (!v.is_array())
    {
        throw input_error("field '" + path + "' must be an array of numbers");
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        out[static_cast<Eigen::Index>(i)] = number(v[i], path + "[" + std::to_string(i) + "]");
    }
    return out;
}

} // namespace detail

/// Serializes with 17 significant digits and fixed key order.
inline std::string dump(const json& j, int indent = 2)
{
    std::ostringstream os;
    detail::write(os, j, indent, 0);
    if (indent > 0)
    {
        os << '\n';
    }
    return os.str();
}

inline json to_json(const Vector& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
        a.push_back(v[i]);
    }
    return a;
}

inline json to_json(const SymMatrix& m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        json row = json::array();
        for (std::size_t j = 0; j < m.size(); ++j)
        {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const SymmetricTensor& a)
{
    json entries = json::array();
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        entries.push_back({{"alpha", a.indices()[i].exponents()}, {"value", a[i]}});
    }
    return {{"order", a.order()}, {"dim", a.dim()}, {"entries", std::move(entries)}};
}

inline json to_json(const DecompositionList& d)
{
    json vectors = json::array();
    for (const auto& v : d.vectors)
    {
        vectors.push_back(to_json(v));
    }
    return {{"dim", d.dim}, {"weights", d.weights}, {"vectors", std::move(vectors)}};
}

inline json to_json(const GeneratingVector& h)
{
    return {{"order", h.order}, {"dim", h.dim}, {"h", to_json(h.values)}};
}

inline json to_json(const VandermondeDecomposition& v)
{
    json j = {{"order", v.order}, {"dim", v.dim}, {"nodes", v.nodes}, {"weights", v.weights}};
    j["infinity_weight"] = v.infinity_weight ? json(*v.infinity_weight) : json(nullptr);
    return j;
}

inline SymmetricTensor tensor_from_json(const json& j)
{
    const int m = detail::int_field(j, "order");
    const int n = detail::int_field(j, "dim");
    const json& entries = detail::field(j, "entries", "");
    if (!entries.is_array())
    {
        throw input_error("field 'entries' must be an array");
    }
    std::vector<std::pair<MultiIndex, double>> list;
    for (std::size_t i = 0; i < entries.size(); ++i)
    {
        const std::string where = "entries[" + std::to_string(i) + "].";
        const json& alpha = detail::field(entries[i], "alpha", where);
        if (!alpha.is_array() || !std::all_of(alpha.begin(), alpha.end(),
                                              [](const json& e) { return e.is_number_integer(); }))
        {
            throw input_error("field '" + where + "alpha' must be an array of integers");
        }
        const double value = detail::number(detail::field(entries[i], "value", where), where + "value");
        if (alpha.size() != static_cast<std::size_t>(n))
        {
            throw input_error("field '" + where + "alpha' has length " + std::to_string(alpha.size()) +
                              ", expected dim = " + std::to_string(n));
        }
        int degree = 0;
        for (const json& e : alpha)
        {
            degree += e.get<int>();
        }
        if (degree != m)
        {
            throw input_error("field '" + where + "alpha' has degree " + std::to_string(degree) +
                              ", expected order = " + std::to_string(m));
        }
        try
        {
            list.emplace_back(MultiIndex(alpha.get<std::vector<int>>()), value);
        }
        catch (const std::invalid_argument& e)
        {
            throw input_error("field '" + where + "alpha': " + e.what());
        }
    }
    try
    {
        return SymmetricTensor::from_entries(m, n, list);
    }
    catch (const std::invalid_argument& e)
    {
        throw input_error(std::string("field 'entries': ") + e.what());
    }
}

inline DecompositionList decomposition_from_json(const json& j)
{
    const int n = detail::int_field(j, "dim");
    const json& vs = detail::field(j, "vectors", "");
    if (!vs.is_array())
    {
        throw input_error("field 'vectors' must be an array");
    }
    std::vector<Vector> vectors;
    for (std::size_t i = 0; i < vs.size(); ++i)
    {
        vectors.push_back(detail::number_array(vs[i], "vectors[" + std::to_string(i) + "]"));
    }
    std::vector<double> weights;
    if (j.contains("weights"))
    {
        const Vector w = detail::number_array(j.at("weights"), "weights");
        weights.assign(w.data(), w.data() + w.size());
    }
    try
    {
        return DecompositionList(n, std::move(vectors), std::move(weights));
    }
    catch (const std::invalid_argument& e)
    {
        throw input_error(std::string("field 'vectors': ") + e.what());
    }
}

inline GeneratingVector generating_from_json(const json& j)
{
    const int m = detail::int_field(j, "order");
    const int n = detail::int_field(j, "dim");
    try
    {
        return GeneratingVector(m, n, detail::number_array(detail::field(j, "h", ""), "h"));
    }
    catch (const shape_error& e)
    {
        throw input_error(std::string("field 'h': ") + e.what());
    }
}

inline VandermondeDecomposition vandermonde_from_json(const json& j)
{
    VandermondeDecomposition v;
    v.order = detail::int_field(j, "order");
    v.dim = detail::int_field(j, "dim");
    const Vector nodes = detail::number_array(detail::field(j, "nodes", ""), "nodes");
    const Vector weights = detail::number_array(detail::field(j, "weights", ""), "weights");
    v.nodes.assign(nodes.data(), nodes.data() + nodes.size());
    v.weights.assign(weights.data(), weights.data() + weights.size());
    if (j.contains("infinity_weight") && !j.at("infinity_weight").is_null())
    {
        v.infinity_weight = detail::number(j.at("infinity_weight"), "infinity_weight");
    }
    try
    {
        v.validate();
    }
    catch (const std::invalid_argument& e)
    {
        throw input_error(std::string("field 'nodes': ") + e.what());
    }
    return v;
}

inline json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw input_error("cannot open input file '" + path + "'");
    }
    try
    {
        return json::parse(in);
    }
    catch (const json::parse_error& e)
    {
        throw input_error("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
    {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << text;
}

/// Input kinds told apart by their distinguishing fields.
enum class InputKind
{
    tensor,
    decomposition,
    generating,
    vandermonde
};

inline InputKind classify(const json& j)
{
    if (!j.is_object())
    {
        throw input_error("input must be a JSON object");
    }
    if (j.contains("entries")) return InputKind::tensor;
    if (j.contains("vectors")) return InputKind::decomposition;
    if (j.contains("h")) return InputKind::generating;
    if (j.contains("nodes")) return InputKind::vandermonde;
    throw input_error("input has none of the fields 'entries', 'vectors', 'h', 'nodes'");
}

/// Any supported input as a tensor; decompositions need the order.
inline SymmetricTensor any_tensor(const json& j, int order_for_decomposition = 0)
{
    switch (classify(j))
    {
    case InputKind::tensor: return tensor_from_json(j);
    case InputKind::generating: return hankel_from_generating(generating_from_json(j));
    case InputKind::vandermonde: return build_from_vandermonde(vandermonde_from_json(j));
    case InputKind::decomposition:
    {
        if (!j.contains("order") && order_for_decomposition == 0)
        {
            throw input_error("decomposition input needs field 'order' to form a tensor");
        }
        const int m = j.contains("order") ? detail::int_field(j, "order") : order_for_decomposition;
        return from_weighted_powers(decomposition_from_json(j), m);
    }
    }
    throw input_error("unsupported input");
}

inline json to_json(const Certificate& c)
{
    json j;
    j["kind"] = c.kind;
    j["scaled"] = c.scaled;
    if (c.scaling)
    {
        j["scaling"] = to_json(*c.scaling);
        j["factor"] = c.factor;
    }
    if (c.gram) j["gram"] = to_json(*c.gram);
    if (c.moment) j["moment"] = to_json(*c.moment);
    if (c.separator) j["separator"] = to_json(*c.separator);
    if (c.vector) j["vector"] = to_json(*c.vector);
    if (c.decomposition) j["decomposition"] = to_json(*c.decomposition);
    if (c.vandermonde) j["vandermonde"] = to_json(*c.vandermonde);
    return j;
}

inline json to_json(const MembershipReport& r)
{
    json res = json::object();
    for (const auto& [k, v] : r.residuals)
    {
        res[k] = v;
    }
    return {{"cone", r.cone},
            {"status", to_string(r.status)},
            {"convention", r.convention},
            {"certificate", to_json(r.certificate)},
            {"residuals", std::move(res)},
            {"assumptions", r.assumptions},
            {"notes", r.notes}};
}

inline json to_json(const ProbeReport& r, const std::string& probe)
{
    return {{"probe", probe},
            {"status", to_string(r.status)},
            {"min_value", r.min_value},
            {"argmin", to_json(r.argmin)},
            {"threshold", r.threshold},
            {"scaling", to_json(r.scaling)},
            {"restarts_used", r.restarts_used}};
}

inline json to_json(const PronyResult& r)
{
    return {{"status", to_string(r.status)},
            {"message", r.message},
            {"rank", r.rank},
            {"balance", r.balance},
            {"residual", r.residual},
            {"residual_original", r.residual_original},
            {"singular_values", to_json(r.singular_values)},
            {"complete_hankel", r.ok() && is_complete_hankel(r.decomposition)},
            {"decomposition", to_json(r.decomposition)}};
}

inline json to_json(const HarnessReport& h)
{
    json checks = json::object();
    for (const auto& [k, v] : h.checks_run)
    {
        checks[k] = v;
    }
    json violations = json::array();
    for (const auto& v : h.violations)
    {
        violations.push_back({{"check", v.check}, {"sample", v.sample}, {"value", v.value}});
    }
    return {{"order", h.order},     {"dim", h.dim},
            {"samples", h.samples}, {"seed", h.seed},
            {"checks", checks},     {"violations", violations}};
}

} // namespace symtensor::io

#endif // SYMTENSOR_IO_HPP
